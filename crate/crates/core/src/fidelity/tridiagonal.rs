//! The real symmetric tridiagonal fidelity matrix and its top eigenpair.

use serde::{Deserialize, Serialize};

use super::coefficients::{mu, nu_abs};
use crate::error::{domain, Result};
use crate::su2::HalfInt;

/// Fidelity matrix for blocks `j = m, ..., J` with `m = max(m_A, m_B)`.
///
/// `diag[k-1] = d_k = μ_{k+m-1}` and `offdiag[k-1] = c_k = |ν_{k+m}|`, so `d_1`
/// belongs to the lowest spin `m`. Displayed as a matrix, `d_l` sits in the top-left
/// corner: rows run from `j = J` down to `j = m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalSym {
    j_max: HalfInt,
    m_a: HalfInt,
    m_b: HalfInt,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalSym {
    pub fn j_max(&self) -> HalfInt {
        self.j_max
    }

    pub fn m_a(&self) -> HalfInt {
        self.m_a
    }

    pub fn m_b(&self) -> HalfInt {
        self.m_b
    }

    /// `m = max(m_A, m_B)`, the lowest spin coupled by the matrix.
    pub fn m(&self) -> HalfInt {
        self.m_a.max(self.m_b)
    }

    /// Matrix size `l = J + 1 - m`.
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Jacobi parameters `(l, |m_B - m_A|, m_A + m_B)` whose largest zero is the
    /// top eigenvalue.
    pub fn jacobi_params(&self) -> crate::jacobi::JacobiParams {
        let a = (self.m_b - self.m_a).abs().twice() / 2;
        let b = (self.m_a + self.m_b).twice() / 2;
        crate::jacobi::JacobiParams::new(self.size() as u32, a as u32, b as u32)
    }

    /// Dense rows in display order (`j = J` first).
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let l = self.size();
        let mut rows = vec![vec![0.0; l]; l];
        for r in 0..l {
            let k = l - 1 - r; // zero-based position in `diag`
            rows[r][r] = self.diag[k];
            if k > 0 {
                rows[r][r + 1] = self.offdiag[k - 1];
                rows[r + 1][r] = self.offdiag[k - 1];
            }
        }
        rows
    }

    /// Negates one off-diagonal entry. Leaves the spectrum unchanged and breaks
    /// eigenvector positivity; only used to exercise the verification suites.
    pub(crate) fn with_flipped_coupling(mut self, k: usize) -> Self {
        if let Some(c) = self.offdiag.get_mut(k) {
            *c = -*c;
        }
        self
    }
}

/// Builds the fidelity matrix for total spin `J` and projections `m_A, m_B >= 0`.
pub fn build_matrix(j_max: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<TridiagonalSym> {
    if m_a.twice() < 0 || m_b.twice() < 0 {
        return Err(domain!(
            "projections must be non-negative, got m_A = {m_a}, m_B = {m_b}"
        ));
    }
    j_max.check_projection(m_a)?;
    j_max.check_projection(m_b)?;
    let m = m_a.max(m_b);
    let diag = HalfInt::range_inclusive(m, j_max)
        .map(|j| mu(j, m_a, m_b))
        .collect::<Result<Vec<_>>>()?;
    let offdiag = HalfInt::range_inclusive(m + HalfInt::ONE, j_max)
        .map(|j| nu_abs(j, m_a, m_b))
        .collect::<Result<Vec<_>>>()?;
    Ok(TridiagonalSym {
        j_max,
        m_a,
        m_b,
        diag,
        offdiag,
    })
}

/// Characteristic sequence `Q_0, ..., Q_l` from
/// `Q_{k+1} = (d_{k+1} - x) Q_k - c_k² Q_{k-1}`, `Q_{-1} = 0`, `Q_0 = 1`.
pub fn char_poly_q(matrix: &TridiagonalSym, x: f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(matrix.size() + 1);
    q.push(1.0);
    let mut prev = 0.0;
    for (k, &d) in matrix.diag.iter().enumerate() {
        let c2 = if k == 0 {
            0.0
        } else {
            matrix.offdiag[k - 1].powi(2)
        };
        let cur = *q.last().expect("non-empty");
        q.push((d - x) * cur - c2 * prev);
        prev = cur;
    }
    q
}

/// Number of eigenvalues below `x`: the sign changes of the `Q` sequence, counted
/// through the ratios `Q_k / Q_{k-1}` to stay clear of overflow.
pub fn sturm_count_below(matrix: &TridiagonalSym, x: f64) -> usize {
    let mut count = 0;
    let mut ratio = 1.0;
    for (k, &d) in matrix.diag.iter().enumerate() {
        let c2 = if k == 0 {
            0.0
        } else {
            matrix.offdiag[k - 1].powi(2)
        };
        ratio = if k == 0 { d - x } else { (d - x) - c2 / ratio };
        if ratio == 0.0 {
            ratio = -f64::MIN_POSITIVE.sqrt();
        }
        if ratio < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by Sturm bisection, eigenvector by two steps of inverse
/// iteration. The vector is normalized, non-negative, and in display order
/// (`j = J` first).
pub fn max_eigenpair(matrix: &TridiagonalSym) -> (f64, Vec<f64>) {
    let l = matrix.size();
    assert!(l >= 1, "empty matrix");
    if l == 1 {
        return (matrix.diag[0], vec![1.0]);
    }
    let c = |k: usize| {
        if k < l - 1 {
            matrix.offdiag[k].abs()
        } else {
            0.0
        }
    };
    let mut lo = matrix
        .diag
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut hi = (0..l)
        .map(|k| matrix.diag[k] + c(k) + if k > 0 { c(k - 1) } else { 0.0 })
        .fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count_below(matrix, mid) == l {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);

    // Shifted just above the top eigenvalue, M - σ is negative definite and the
    // Thomas sweep needs no pivoting.
    let sigma = lambda + 8.0 * f64::EPSILON * lambda.abs().max(1.0);
    let mut v = vec![1.0; l];
    for _ in 0..2 {
        v = solve_shifted(matrix, sigma, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if v.iter().sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        v.iter_mut().for_each(|x| *x *= sign / norm);
    }
    v.reverse();
    (lambda, v)
}

/// Solves `(M - σ) y = rhs` in `diag` order.
fn solve_shifted(matrix: &TridiagonalSym, sigma: f64, rhs: &[f64]) -> Vec<f64> {
    let l = matrix.size();
    let mut pivots = vec![0.0; l];
    let mut y = rhs.to_vec();
    for k in 0..l {
        let mut p = matrix.diag[k] - sigma;
        if k > 0 {
            let c = matrix.offdiag[k - 1];
            let factor = c / pivots[k - 1];
            p -= factor * c;
            y[k] -= factor * y[k - 1];
        }
        if p == 0.0 {
            p = -f64::EPSILON;
        }
        pivots[k] = p;
    }
    for k in (0..l).rev() {
        if k + 1 < l {
            y[k] -= matrix.offdiag[k] * y[k + 1];
        }
        y[k] /= pivots[k];
    }
    y
}
