//! Clebsch–Gordan coefficients in the Condon–Shortley convention.

use super::factorial::ln_factorial;
use super::HalfInt;
use crate::error::Result;

/// Converts a twice-value combination to a factorial argument, `None` if it is
/// negative or odd.
fn fact_arg(twice: i32) -> Option<usize> {
    (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as usize)
}

/// `⟨j1 m1; j2 m2 | J M⟩` by Racah's alternating sum with log-factorial terms.
///
/// Returns zero when `M ≠ m1 + m2` or the triangle rule fails. Errors only when a
/// `(j, m)` pair is inconsistent.
pub fn cg_coefficient(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j.check_projection(m)?;
    if m1 + m2 != m {
        return Ok(0.0);
    }
    let (j1, m1, j2, m2, j, m) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    let triangle = (
        fact_arg(j1 + j2 - j),
        fact_arg(j1 - j2 + j),
        fact_arg(-j1 + j2 + j),
    );
    let (Some(a), Some(b), Some(c)) = triangle else {
        return Ok(0.0);
    };
    let f = |t: i32| fact_arg(t).expect("valid pair gives integral factorial argument");
    let ln_pref = 0.5
        * ((f64::from(j) + 1.0).ln() + ln_factorial(a) + ln_factorial(b) + ln_factorial(c)
            - ln_factorial(f(j1 + j2 + j + 2))
            + ln_factorial(f(j + m))
            + ln_factorial(f(j - m))
            + ln_factorial(f(j1 - m1))
            + ln_factorial(f(j1 + m1))
            + ln_factorial(f(j2 - m2))
            + ln_factorial(f(j2 + m2)));

    // Summation index k (integer) over all non-negative denominators.
    let k_min = 0.max((j2 - j - m1) / 2).max((j1 - j + m2) / 2);
    let k_max = ((j1 + j2 - j) / 2).min((j1 - m1) / 2).min((j2 + m2) / 2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let t = 2 * k;
        let ln_den = ln_factorial(k as usize)
            + ln_factorial(f(j1 + j2 - j - t))
            + ln_factorial(f(j1 - m1 - t))
            + ln_factorial(f(j2 + m2 - t))
            + ln_factorial(f(j - j2 + m1 + t))
            + ln_factorial(f(j - j1 - m2 + t));
        let term = (ln_pref - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(sum)
}
