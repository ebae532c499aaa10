//! Wigner rotation matrices.
//!
//! Convention: `U(n) = exp(-i φ S_z) exp(-i θ S_y)`, the rotation carrying `z` to `n`
//! with third Euler angle zero, so `D^j_{m'm}(n) = e^{-i m' φ} d^j_{m'm}(θ)`.
//! Rows and columns are indexed by projections descending from `j` to `-j`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::factorial::{factorial, ln_factorial};
use super::{Direction, HalfInt};

/// Above this `2j` factorial ratios are formed in log space.
const DIRECT_FACTORIAL_LIMIT: i32 = 60;

/// Matrix of a rotation in the spin-`j` representation.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerBlock {
    j: HalfInt,
    entries: DMatrix<Complex64>,
}

impl WignerBlock {
    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// Entry `D_{m' m}`.
    pub fn get(&self, m_row: HalfInt, m_col: HalfInt) -> Complex64 {
        self.entries[(index(self.j, m_row), index(self.j, m_col))]
    }

    /// `max |(U† U - 1)_{ab}|`.
    pub fn unitarity_error(&self) -> f64 {
        let dim = self.entries.nrows();
        let prod = self.entries.adjoint() * &self.entries;
        let mut err: f64 = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                let target = if a == b { 1.0 } else { 0.0 };
                err = err.max((prod[(a, b)] - Complex64::new(target, 0.0)).norm());
            }
        }
        err
    }
}

/// Row/column position of projection `m` inside a spin-`j` block.
pub fn index(j: HalfInt, m: HalfInt) -> usize {
    debug_assert!(m.abs() <= j && j.same_parity(m));
    ((j.twice() - m.twice()) / 2) as usize
}

/// One element `d^j_{m'm}(β)` from Wigner's explicit sum
///
/// `Σ_s (-1)^{m'-m+s} √((j+m)!(j-m)!(j+m')!(j-m')!) / ((j+m-s)! s! (m'-m+s)! (j-m'-s)!)
///  · cos(β/2)^{2j+m-m'-2s} sin(β/2)^{m'-m+2s}`.
pub fn small_d_element(j: HalfInt, m_row: HalfInt, m_col: HalfInt, beta: f64) -> f64 {
    let j2 = j.twice();
    let jpm = (j2 + m_col.twice()) / 2;
    let jmm = (j2 - m_col.twice()) / 2;
    let jpmp = (j2 + m_row.twice()) / 2;
    let jmmp = (j2 - m_row.twice()) / 2;
    let delta = (m_row.twice() - m_col.twice()) / 2; // m' - m
    let s_min = 0.max(-delta);
    let s_max = jpm.min(jmmp);
    let (sin_half, cos_half) = (0.5 * beta).sin_cos();
    let direct = j2 <= DIRECT_FACTORIAL_LIMIT;
    let u = |x: i32| x as usize;
    let ln_num = 0.5
        * (ln_factorial(u(jpm))
            + ln_factorial(u(jmm))
            + ln_factorial(u(jpmp))
            + ln_factorial(u(jmmp)));
    let num =
        (factorial(u(jpm)) * factorial(u(jmm)) * factorial(u(jpmp)) * factorial(u(jmmp))).sqrt();
    let mut sum = 0.0;
    for s in s_min..=s_max {
        let den = [u(jpm - s), u(s), u(delta + s), u(jmmp - s)];
        let coef = if direct {
            num / den.iter().map(|&k| factorial(k)).product::<f64>()
        } else {
            (ln_num - den.iter().map(|&k| ln_factorial(k)).sum::<f64>()).exp()
        };
        let sign = if (delta + s) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * coef * cos_half.powi(j2 - delta - 2 * s) * sin_half.powi(delta + 2 * s);
    }
    sum
}

/// Real rotation kernel `d^j(β)`, returned as a complex block with zero imaginary part.
pub fn wigner_small_d(j: HalfInt, beta: f64) -> WignerBlock {
    assert!(j.twice() >= 0, "negative spin");
    let dim = j.multiplet_dim();
    let mut entries = DMatrix::zeros(dim, dim);
    for (r, mp) in j.projections().enumerate() {
        for (col, m) in j.projections().enumerate() {
            entries[(r, col)] = Complex64::new(small_d_element(j, mp, m, beta), 0.0);
        }
    }
    WignerBlock { j, entries }
}

/// `D^j(n)` for the rotation `z → n`.
pub fn wigner_d(j: HalfInt, n: &Direction) -> WignerBlock {
    let mut block = wigner_small_d(j, n.theta());
    for (r, mp) in j.projections().enumerate() {
        let phase = Complex64::from_polar(1.0, -mp.value() * n.phi());
        for col in 0..block.entries.ncols() {
            block.entries[(r, col)] *= phase;
        }
    }
    block
}

/// Column `m` of `D^j(n)`, i.e. the components of `U(n)|j, m⟩`.
pub fn wigner_d_column(j: HalfInt, m: HalfInt, n: &Direction) -> Vec<Complex64> {
    j.projections()
        .map(|mp| {
            Complex64::from_polar(small_d_element(j, mp, m, n.theta()), -mp.value() * n.phi())
        })
        .collect()
}
