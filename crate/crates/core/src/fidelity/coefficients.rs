use crate::error::{domain, Result};
use crate::su2::HalfInt;

fn check(j: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<()> {
    j.check_projection(m_a)?;
    j.check_projection(m_b)
}

/// `μ_j = m_A m_B / (j (j+1))`, with `μ_0 = 0`.
pub fn mu(j: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<f64> {
    check(j, m_a, m_b)?;
    if j == HalfInt::ZERO {
        return Ok(0.0);
    }
    let jv = j.value();
    Ok(m_a.value() * m_b.value() / (jv * (jv + 1.0)))
}

/// `|ν_j| = (1/j) sqrt((j² - m_A²)(j² - m_B²) / (4j² - 1))`.
pub fn nu_abs(j: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<f64> {
    check(j, m_a, m_b)?;
    if j < HalfInt::ONE {
        return Err(domain!("nu_j needs j >= 1, got {j}"));
    }
    let (jv, a, b) = (j.value(), m_a.value(), m_b.value());
    let radicand = (jv * jv - a * a) * (jv * jv - b * b) / (4.0 * jv * jv - 1.0);
    Ok(radicand.sqrt() / jv)
}
