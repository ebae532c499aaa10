//! Jacobi polynomials `P_n^{a,b}` with the classical normalization, their largest
//! zeros, and numerical checks of the identities and zero inequalities the
//! fidelity results rest on.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Error, Result};
use crate::su2::HalfInt;

/// First zero of the Bessel function `J_0`.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404825557695773;

/// Largest degree for which zeros are extracted.
pub const MAX_DEGREE: u32 = 300;

const MAX_BISECTION_STEPS: usize = 200;
const ZERO_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: u32,
    pub a: u32,
    pub b: u32,
}

impl JacobiParams {
    pub const fn new(n: u32, a: u32, b: u32) -> Self {
        JacobiParams { n, a, b }
    }

    /// Coefficient `A_n` of `x^n`: `Γ(2n+a+b+1) / (2^n n! Γ(n+a+b+1))`.
    pub fn leading_coefficient(&self) -> f64 {
        // ln Γ(k+1) for integer k as a sum of logs
        let ln_fact = |k: u32| (2..=k).map(|i| f64::from(i).ln()).sum::<f64>();
        (ln_fact(2 * self.n + self.a + self.b)
            - f64::from(self.n) * std::f64::consts::LN_2
            - ln_fact(self.n)
            - ln_fact(self.n + self.a + self.b))
        .exp()
    }
}

/// Values `P_0(x), ..., P_n(x)` by the upward three-term recurrence.
pub fn jacobi_sequence(n: u32, a: u32, b: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    let (af, bf) = (f64::from(a), f64::from(b));
    out.push((af + 1.0) + 0.5 * (af + bf + 2.0) * (x - 1.0));
    for k in 1..n {
        let k = f64::from(k);
        let s = 2.0 * k + af + bf;
        let alpha = 2.0 * (k + 1.0) * (k + af + bf + 1.0) / ((s + 1.0) * (s + 2.0));
        let beta = (bf * bf - af * af) / (s * (s + 2.0));
        let gamma = 2.0 * (k + af) * (k + bf) / (s * (s + 1.0));
        let len = out.len();
        let next = ((x - beta) * out[len - 1] - gamma * out[len - 2]) / alpha;
        out.push(next);
    }
    out
}

/// `P_n^{a,b}(x)`.
pub fn jacobi_eval(params: JacobiParams, x: f64) -> f64 {
    *jacobi_sequence(params.n, params.a, params.b, x)
        .last()
        .expect("sequence is non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub params: JacobiParams,
    pub largest_zero: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Bisection for the largest zero of `P_n` on `(lower, 1]`, where `lower` is the
/// largest zero of `P_{n-1}` (interlacing puts exactly one zero of `P_n` above it).
fn bisect_above(params: JacobiParams, lower: f64) -> Result<ZeroReport> {
    let f = |x: f64| jacobi_eval(params, x);
    let (mut lo, mut hi) = (lower, 1.0);
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return Err(Error::Numeric(format!(
            "{params:?}: interlacing bracket lost its sign change"
        )));
    }
    let mut iterations = 0;
    while iterations < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > ZERO_TOLERANCE {
        return Err(Error::Numeric(format!(
            "{params:?}: bisection did not converge"
        )));
    }
    let (flo, fhi) = (f(lo).abs(), f(hi).abs());
    let (largest_zero, residual) = if flo <= fhi { (lo, flo) } else { (hi, fhi) };
    Ok(ZeroReport {
        params,
        largest_zero,
        iterations,
        residual,
    })
}

/// Largest zeros of `P_1^{a,b}, ..., P_{n_max}^{a,b}`, each bracketed by the
/// previous one.
pub fn largest_zero_chain(n_max: u32, a: u32, b: u32) -> Result<Vec<ZeroReport>> {
    if n_max > MAX_DEGREE {
        return Err(unsupported!("degree {n_max} above the cap {MAX_DEGREE}"));
    }
    let mut out = Vec::with_capacity(n_max as usize);
    if n_max == 0 {
        return Ok(out);
    }
    let first = f64::from(b) - f64::from(a);
    let first = first / f64::from(a + b + 2);
    let p1 = JacobiParams::new(1, a, b);
    out.push(ZeroReport {
        params: p1,
        largest_zero: first,
        iterations: 0,
        residual: jacobi_eval(p1, first).abs(),
    });
    for n in 2..=n_max {
        let lower = out.last().expect("chain seeded").largest_zero;
        out.push(bisect_above(JacobiParams::new(n, a, b), lower)?);
    }
    Ok(out)
}

/// Largest zero `x_n^{a,b}` of `P_n^{a,b}`.
pub fn largest_zero(params: JacobiParams) -> Result<ZeroReport> {
    if params.n == 0 {
        return Err(domain!("degree-0 polynomial has no zeros"));
    }
    Ok(*largest_zero_chain(params.n, params.a, params.b)?
        .last()
        .expect("n >= 1"))
}

/// Memoized largest zeros keyed by `(a, b)`.
#[derive(Debug, Default)]
pub struct ZeroTable {
    chains: HashMap<(u32, u32), Vec<f64>>,
}

impl ZeroTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: u32, a: u32, b: u32) -> Result<f64> {
        if n == 0 {
            return Err(domain!("degree-0 polynomial has no zeros"));
        }
        let chain = self.chains.entry((a, b)).or_default();
        if chain.len() < n as usize {
            *chain = largest_zero_chain(n, a, b)?
                .iter()
                .map(|r| r.largest_zero)
                .collect();
        }
        Ok(chain[n as usize - 1])
    }
}

/// Max over the grid of `|(P_n(x+h) - P_n(x-h)) / 2h - (n+a+b+1)/2 · P_{n-1}^{a+1,b+1}(x)|`
/// with `h = 1e-5`, divided by `max(1, max_grid |P_n'|)`.
pub fn verify_differentiation(params: JacobiParams, x_grid: &[f64]) -> Result<f64> {
    if params.n == 0 {
        return Err(domain!("differentiation check needs n >= 1"));
    }
    const STEP: f64 = 1e-5;
    let lowered = JacobiParams::new(params.n - 1, params.a + 1, params.b + 1);
    let scale = f64::from(params.n + params.a + params.b + 1) / 2.0;
    let pairs: Vec<(f64, f64)> = x_grid
        .iter()
        .map(|&x| {
            let fd = (jacobi_eval(params, x + STEP) - jacobi_eval(params, x - STEP)) / (2.0 * STEP);
            (fd, scale * jacobi_eval(lowered, x))
        })
        .collect();
    let norm = pairs.iter().map(|p| p.1.abs()).fold(1.0, f64::max);
    Ok(pairs
        .iter()
        .map(|(fd, exact)| (fd - exact).abs() / norm)
        .fold(0.0, f64::max))
}

/// Max relative residual over the grid of
///
/// - `(2n+a+b) P_n^{a,b-1} = (n+a+b) P_n^{a,b} + (n+a) P_{n-1}^{a,b}`
/// - `(n+a+b+1) (1+x)/2 P_n^{a,b+1} = (n+1) P_{n+1}^{a,b-1} + b P_n^{a,b}`
///
/// Each residual is divided by `max(1, Σ|terms|)`.
pub fn verify_b_relations(params: JacobiParams, x_grid: &[f64]) -> Result<f64> {
    let JacobiParams { n, a, b } = params;
    if b == 0 {
        return Err(domain!("b-relations need b >= 1"));
    }
    let p = |n: u32, b: u32, x: f64| jacobi_eval(JacobiParams::new(n, a, b), x);
    let (nf, af, bf) = (f64::from(n), f64::from(a), f64::from(b));
    let mut worst: f64 = 0.0;
    for &x in x_grid {
        let prev = if n == 0 { 0.0 } else { p(n - 1, b, x) };
        let l1 = (2.0 * nf + af + bf) * p(n, b - 1, x);
        let r1 = [(nf + af + bf) * p(n, b, x), (nf + af) * prev];
        let res1 = (l1 - r1[0] - r1[1]).abs() / (l1.abs() + r1[0].abs() + r1[1].abs()).max(1.0);

        let l2 = (nf + af + bf + 1.0) * 0.5 * (1.0 + x) * p(n, b + 1, x);
        let r2 = [(nf + 1.0) * p(n + 1, b - 1, x), bf * p(n, b, x)];
        let res2 = (l2 - r2[0] - r2[1]).abs() / (l2.abs() + r2[0].abs() + r2[1].abs()).max(1.0);
        worst = worst.max(res1).max(res2);
    }
    Ok(worst)
}

/// Which zero inequality a sweep entry exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroInequality {
    /// `x_{n-1}^{a+1,b+1} < x_n^{a,b}`
    RaiseBoth,
    /// `x_{n-1}^{a,b} < x_n^{a,b-1}`
    LowerBLeft,
    /// `x_n^{a,b-1} < x_n^{a,b}`
    LowerBRight,
    /// `x_n^{a,b+1} < x_{n+1}^{a,b-1}`
    ShiftB,
    /// `max C_m^l = x_{l-m}^{0,2m}`
    ClmMaximum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ZeroInequality,
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub n_max: u32,
    pub b_max: u32,
    pub checked: usize,
    /// Smallest `rhs - lhs` seen per inequality.
    pub min_margins: Vec<(ZeroInequality, f64)>,
    pub violations: Vec<Violation>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const VIOLATION_SLACK: f64 = 1e-12;

/// Sweeps the three zero inequalities over `n <= n_max`, `0 <= a <= b <= b_max`,
/// and the `C_m^l` maximum for integer and half-integer `l <= n_max / 2`.
pub fn check_zero_inequalities(n_max: u32, b_max: u32) -> Result<InequalityReport> {
    if n_max < 2 {
        return Err(domain!("inequality sweep needs n_max >= 2"));
    }
    let mut table = ZeroTable::new();
    let mut margins: HashMap<ZeroInequality, f64> = HashMap::new();
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut record = |kind, n, a, b, lhs: f64, rhs: f64, violations: &mut Vec<Violation>| {
        let margin = rhs - lhs;
        let slot = margins.entry(kind).or_insert(f64::INFINITY);
        *slot = slot.min(margin);
        checked += 1;
        if margin < -VIOLATION_SLACK {
            violations.push(Violation {
                kind,
                n,
                a,
                b,
                margin,
            });
        }
    };
    for b in 0..=b_max {
        for a in 0..=b {
            for n in 1..=n_max {
                let x = table.get(n, a, b)?;
                if n >= 2 {
                    let raised = table.get(n - 1, a + 1, b + 1)?;
                    record(
                        ZeroInequality::RaiseBoth,
                        n,
                        a,
                        b,
                        raised,
                        x,
                        &mut violations,
                    );
                }
                if b >= 1 {
                    let lowered = table.get(n, a, b - 1)?;
                    if n >= 2 {
                        let prev = table.get(n - 1, a, b)?;
                        record(
                            ZeroInequality::LowerBLeft,
                            n,
                            a,
                            b,
                            prev,
                            lowered,
                            &mut violations,
                        );
                    }
                    record(
                        ZeroInequality::LowerBRight,
                        n,
                        a,
                        b,
                        lowered,
                        x,
                        &mut violations,
                    );
                    if n < n_max {
                        let lhs = table.get(n, a, b + 1)?;
                        let rhs = table.get(n + 1, a, b - 1)?;
                        record(ZeroInequality::ShiftB, n, a, b, lhs, rhs, &mut violations);
                    }
                }
            }
        }
    }
    for l2 in 0..=(n_max as i32) {
        let l = HalfInt::from_twice(l2);
        for m in HalfInt::range_inclusive(HalfInt::from_twice(l2 % 2), l) {
            if let Some(best) = max_over_clm_with(&mut table, l, m)? {
                let degree = (l - m).to_integer().expect("same parity") as u32;
                let b = (m.twice()) as u32;
                let claim = table.get(degree, 0, b)?;
                // claim is itself in C_m^l, so the margin is zero exactly when it is the maximum
                record(
                    ZeroInequality::ClmMaximum,
                    degree,
                    0,
                    b,
                    best.value,
                    claim,
                    &mut violations,
                );
            }
        }
    }
    let mut min_margins: Vec<_> = margins.into_iter().collect();
    min_margins.sort_by_key(|(k, _)| *k as u8);
    Ok(InequalityReport {
        n_max,
        b_max,
        checked,
        min_margins,
        violations,
    })
}

/// Maximizer of `C_m^l = { x_{l-m''}^{m''-m', m''+m'} : m <= m' <= m'' <= l }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClmMaximum {
    pub m_prime: HalfInt,
    pub m_double: HalfInt,
    pub value: f64,
}

/// Brute-force maximum of `C_m^l`; entries of degree zero carry no zeros and are
/// skipped, so the result is `None` when `m = l`.
pub fn max_over_clm(l: HalfInt, m: HalfInt) -> Result<Option<ClmMaximum>> {
    max_over_clm_with(&mut ZeroTable::new(), l, m)
}

fn max_over_clm_with(table: &mut ZeroTable, l: HalfInt, m: HalfInt) -> Result<Option<ClmMaximum>> {
    if m.twice() < 0 || m > l || !m.same_parity(l) {
        return Err(domain!(
            "C_m^l needs 0 <= m <= l with equal parity, got l = {l}, m = {m}"
        ));
    }
    let mut best: Option<ClmMaximum> = None;
    for m_prime in HalfInt::range_inclusive(m, l) {
        for m_double in HalfInt::range_inclusive(m_prime, l) {
            let degree = (l - m_double).to_integer().expect("same parity") as u32;
            if degree == 0 {
                continue;
            }
            let a = (m_double - m_prime).to_integer().expect("same parity") as u32;
            let b = (m_double + m_prime).to_integer().expect("same parity") as u32;
            let value = table.get(degree, a, b)?;
            if best.is_none_or(|cur| value > cur.value) {
                best = Some(ClmMaximum {
                    m_prime,
                    m_double,
                    value,
                });
            }
        }
    }
    Ok(best)
}

/// `1 - ξ₀²/(2n²) · (1 - (b+1)/n)`, the large-degree form of `x_n^{0,b}`.
pub fn asymptotic_zero(params: JacobiParams) -> Result<f64> {
    if params.a != 0 {
        return Err(unsupported!(
            "asymptotic form implemented for a = 0 only, got a = {}",
            params.a
        ));
    }
    if params.n == 0 {
        return Err(domain!("degree-0 polynomial has no zeros"));
    }
    let n = f64::from(params.n);
    let xi2 = BESSEL_J0_FIRST_ZERO * BESSEL_J0_FIRST_ZERO;
    Ok(1.0 - xi2 / (2.0 * n * n) * (1.0 - f64::from(params.b + 1) / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(points: usize) -> Vec<f64> {
        (0..points)
            .map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64)
            .collect()
    }

    #[test]
    fn low_degree_closed_forms() {
        for &x in &[-0.7, 0.0, 0.3, 1.0] {
            assert_eq!(jacobi_eval(JacobiParams::new(0, 3, 5), x), 1.0);
            let p1 = jacobi_eval(JacobiParams::new(1, 0, 1), x);
            assert!((p1 - (3.0 * x - 1.0) / 2.0).abs() < 1e-15);
            // P_2^{0,1} = (15x² - 6x - 3)/6 ∝ 5x² - 2x - 1
            let p2 = jacobi_eval(JacobiParams::new(2, 0, 1), x);
            assert!(
                (p2 - (5.0 * x * x - 2.0 * x - 1.0) * 0.5).abs() < 1e-14,
                "{x} {p2}"
            );
            let legendre3 = jacobi_eval(JacobiParams::new(3, 0, 0), x);
            assert!((legendre3 - (5.0 * x.powi(3) - 3.0 * x) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn known_largest_zeros() {
        let z = |n, a, b| {
            largest_zero(JacobiParams::new(n, a, b))
                .unwrap()
                .largest_zero
        };
        assert!((z(2, 0, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((z(3, 0, 0) - 0.6f64.sqrt()).abs() < 1e-14);
        assert!((z(2, 0, 1) - (1.0 + 6f64.sqrt()) / 5.0).abs() < 1e-14);
        assert!((z(1, 0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((z(1, 1, 2) - 0.2).abs() < 1e-15);
        assert!(largest_zero(JacobiParams::new(0, 0, 0)).is_err());
        assert!(largest_zero(JacobiParams::new(301, 0, 0)).is_err());
    }

    #[test]
    fn zero_report_residual_is_small() {
        for &(n, a, b) in &[(5, 0, 0), (20, 2, 7), (60, 0, 1), (300, 0, 0)] {
            let p = JacobiParams::new(n, a, b);
            let r = largest_zero(p).unwrap();
            assert!(r.largest_zero > -1.0 && r.largest_zero < 1.0);
            assert!(r.residual < 1e-12 * p.leading_coefficient(), "{r:?}");
            assert!(r.iterations <= MAX_BISECTION_STEPS);
        }
    }

    #[test]
    fn positive_above_largest_zero() {
        for &(n, a, b) in &[(4, 0, 0), (9, 1, 3), (30, 10, 10)] {
            let p = JacobiParams::new(n, a, b);
            let x0 = largest_zero(p).unwrap().largest_zero;
            for k in 0..20 {
                let x = x0 + 1e-9 + (1.0 - x0 - 1e-9) * k as f64 / 19.0;
                assert!(jacobi_eval(p, x) > 0.0, "{p:?} at {x}");
            }
        }
    }

    #[test]
    fn leading_coefficient_matches_growth() {
        for n in 0..=10 {
            for &(a, b) in &[(0, 0), (0, 1), (2, 5)] {
                let p = JacobiParams::new(n, a, b);
                let x: f64 = 1e3;
                let ratio = jacobi_eval(p, x) / x.powi(n as i32);
                let lead = p.leading_coefficient();
                // the next coefficient contributes O(n/x) relative
                assert!(
                    (ratio / lead - 1.0).abs() < 2e-2 * (n as f64 + 1.0) / 10.0 + 1e-6,
                    "{p:?}"
                );
            }
        }
        assert!((JacobiParams::new(2, 0, 0).leading_coefficient() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn differentiation_formula() {
        // d/dx P_1 = 1 = P_0^{1,1}; d/dx P_2 = 3x = (3/2) P_1^{1,1} with P_1^{1,1} = 2x
        assert!((jacobi_eval(JacobiParams::new(1, 1, 1), 0.4) - 0.8).abs() < 1e-15);
        let e1 = verify_differentiation(JacobiParams::new(1, 0, 0), &grid(11)).unwrap();
        assert!(e1 < 1e-9, "{e1}");
        assert!(verify_differentiation(JacobiParams::new(2, 0, 0), &grid(11)).unwrap() < 1e-9);
        assert!(verify_differentiation(JacobiParams::new(5, 1, 2), &grid(101)).unwrap() < 1e-6);
        for n in 1..=20 {
            let e = verify_differentiation(JacobiParams::new(n, 0, 3), &grid(41)).unwrap();
            assert!(e < 1e-6, "n = {n}: {e:e}");
        }
    }

    #[test]
    fn b_relations() {
        // 3x = 2 (3x-1)/2 + 1
        assert!(verify_b_relations(JacobiParams::new(1, 0, 1), &grid(7)).unwrap() < 1e-14);
        let g = grid(50);
        assert_eq!(*g.last().unwrap(), 1.0);
        for n in 0..=20 {
            for &(a, b) in &[(0, 1), (1, 3), (4, 4), (2, 10)] {
                assert!(verify_b_relations(JacobiParams::new(n, a, b), &g).unwrap() < 1e-10);
            }
        }
        assert!(verify_b_relations(JacobiParams::new(3, 0, 0), &g).is_err());
    }

    #[test]
    fn inequality_examples() {
        let z = |n, a, b| {
            largest_zero(JacobiParams::new(n, a, b))
                .unwrap()
                .largest_zero
        };
        assert!(z(1, 1, 2) < z(2, 0, 0));
        assert!(z(1, 0, 1) < z(2, 0, 0) && z(2, 0, 0) < z(2, 0, 1));
        let report = check_zero_inequalities(8, 3).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        for &(kind, m) in &report.min_margins {
            if kind == ZeroInequality::ClmMaximum {
                assert_eq!(m, 0.0);
            } else {
                assert!(m > 0.0, "{kind:?} {m}");
            }
        }
    }

    #[test]
    fn clm_examples() {
        let h = HalfInt::from_int;
        let best = max_over_clm(h(2), h(0)).unwrap().unwrap();
        assert_eq!((best.m_prime, best.m_double), (h(0), h(0)));
        assert!((best.value - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(max_over_clm(h(1), h(1)).unwrap().is_none());
        let best = max_over_clm(h(1), h(0)).unwrap().unwrap();
        assert!(best.value.abs() < 1e-15);
        let best = max_over_clm(h(5), h(1)).unwrap().unwrap();
        assert_eq!((best.m_prime, best.m_double), (h(1), h(1)));
        assert_eq!(
            best.value,
            largest_zero(JacobiParams::new(4, 0, 2))
                .unwrap()
                .largest_zero
        );
        let hh = HalfInt::from_twice;
        let best = max_over_clm(hh(7), hh(1)).unwrap().unwrap();
        assert_eq!((best.m_prime, best.m_double), (hh(1), hh(1)));
        assert!(max_over_clm(h(2), hh(1)).is_err());
    }

    #[test]
    fn asymptotic_form() {
        let v = asymptotic_zero(JacobiParams::new(100, 0, 0)).unwrap();
        assert!((v - 0.99971373).abs() < 1e-8, "{v}");
        assert!(asymptotic_zero(JacobiParams::new(10, 1, 0)).is_err());
        assert!((asymptotic_zero(JacobiParams::new(1_000_000, 0, 0)).unwrap() - 1.0).abs() < 1e-11);
        // errors drop by ~16 per doubling
        let err = |n| {
            let p = JacobiParams::new(n, 0, 1);
            (asymptotic_zero(p).unwrap() - largest_zero(p).unwrap().largest_zero).abs()
        };
        let (e25, e50, e100) = (err(25), err(50), err(100));
        let c = e100 * 100f64.powi(4);
        assert!(e50 * 50f64.powi(4) < 1.2 * c && e25 * 25f64.powi(4) < 1.2 * c);
    }

    #[test]
    fn interlacing_chain() {
        for b in 0..=10 {
            for a in 0..=b {
                let chain = largest_zero_chain(30, a, b).unwrap();
                for w in chain.windows(2) {
                    assert!(w[0].largest_zero < w[1].largest_zero);
                }
            }
        }
    }
}
