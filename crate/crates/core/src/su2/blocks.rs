use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::wigner::{index, wigner_d, wigner_d_column};
use super::{Direction, HalfInt};
use crate::error::{domain, Result};

/// Direct sum of single copies of spin blocks `j_max, j_max - 1, ..., j_min`.
///
/// Vectors are laid out block by block in descending `j`, each block in
/// descending `m`; for `j_max = 1, j_min = 0` this is the basis `{+, 0, −, s}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpace {
    j_max: HalfInt,
    j_min: HalfInt,
}

impl BlockSpace {
    pub fn new(j_max: HalfInt, j_min: HalfInt) -> Result<Self> {
        if j_min.twice() < 0 || j_min > j_max || !j_min.same_parity(j_max) {
            return Err(domain!("invalid block range {j_min}..={j_max}"));
        }
        Ok(BlockSpace { j_max, j_min })
    }

    /// All blocks down to `0` or `1/2`.
    pub fn full(j_max: HalfInt) -> Result<Self> {
        Self::new(j_max, HalfInt::from_twice(j_max.twice().rem_euclid(2)))
    }

    pub fn j_max(&self) -> HalfInt {
        self.j_max
    }

    pub fn j_min(&self) -> HalfInt {
        self.j_min
    }

    /// Spins in layout order (descending).
    pub fn spins(&self) -> impl Iterator<Item = HalfInt> + Clone {
        HalfInt::range_inclusive(self.j_min, self.j_max).rev()
    }

    pub fn contains(&self, j: HalfInt) -> bool {
        j >= self.j_min && j <= self.j_max && j.same_parity(self.j_max)
    }

    pub fn dim(&self) -> usize {
        self.spins().map(HalfInt::multiplet_dim).sum()
    }

    /// Position of `|j, j⟩`.
    pub fn offset(&self, j: HalfInt) -> usize {
        debug_assert!(self.contains(j));
        self.spins()
            .take_while(|&k| k > j)
            .map(HalfInt::multiplet_dim)
            .sum()
    }

    /// Position of `|j, m⟩`.
    pub fn position(&self, j: HalfInt, m: HalfInt) -> usize {
        self.offset(j) + index(j, m)
    }

    /// `⊕_j D^j(n)`.
    pub fn rotation(&self, n: &Direction) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut u = DMatrix::zeros(dim, dim);
        for j in self.spins() {
            let off = self.offset(j);
            let block = wigner_d(j, n);
            let k = block.matrix().nrows();
            u.view_mut((off, off), (k, k)).copy_from(block.matrix());
        }
        u
    }

    /// `U(n) |ψ⟩` for a state with definite projection `m`, given by its block
    /// amplitudes (`(j, amplitude)` pairs).
    pub fn rotate_eigenstate(
        &self,
        m: HalfInt,
        amplitudes: &[(HalfInt, f64)],
        n: &Direction,
    ) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for &(j, a) in amplitudes {
            if a == 0.0 {
                continue;
            }
            let off = self.offset(j);
            for (k, v) in wigner_d_column(j, m, n).into_iter().enumerate() {
                out[off + k] = v * a;
            }
        }
        out
    }

    /// Embeds a definite-`m` state given by block amplitudes.
    pub fn embed(&self, m: HalfInt, amplitudes: &[(HalfInt, f64)]) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for &(j, a) in amplitudes {
            out[self.position(j, m)] = Complex64::new(a, 0.0);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let space = BlockSpace::full(HalfInt::ONE).unwrap();
        assert_eq!(space.dim(), 4);
        assert_eq!(space.position(HalfInt::ZERO, HalfInt::ZERO), 3);
        assert_eq!(space.position(HalfInt::ONE, -HalfInt::ONE), 2);
        let odd = BlockSpace::full(HalfInt::from_twice(3)).unwrap();
        assert_eq!(odd.dim(), 6);
        assert_eq!(odd.offset(HalfInt::HALF), 4);
        assert!(BlockSpace::new(HalfInt::ONE, HalfInt::HALF).is_err());
    }

    #[test]
    fn rotated_eigenstate_matches_matrix() {
        let space = BlockSpace::full(HalfInt::from_int(2)).unwrap();
        let amps = [(HalfInt::from_int(2), 0.6), (HalfInt::ONE, 0.8)];
        let n = Direction::new(0.9, 2.3).unwrap();
        let direct = space.rotation(&n) * space.embed(HalfInt::ZERO, &amps);
        let fast = space.rotate_eigenstate(HalfInt::ZERO, &amps, &n);
        assert!((direct - fast).norm() < 1e-14);
    }
}
