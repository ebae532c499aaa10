//! Sequential left-to-right coupling of `N` spin-1/2 particles.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::MultiplicityState;
use crate::error::{unsupported, Error, Result};
use crate::su2::{cg_coefficient, HalfInt};

/// Largest `N` for which the coupled basis is built explicitly.
pub const MAX_COUPLED_SPINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn projection(self) -> HalfInt {
        match self {
            Spin::Up => HalfInt::HALF,
            Spin::Down => -HalfInt::HALF,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "u",
            Spin::Down => "d",
        })
    }
}

/// Parses a pattern such as `"uudd"` (also accepts `↑`/`↓`).
pub fn parse_pattern(s: &str) -> Result<Vec<Spin>> {
    s.trim()
        .chars()
        .map(|c| match c {
            'u' | 'U' | '↑' => Ok(Spin::Up),
            'd' | 'D' | '↓' => Ok(Spin::Down),
            other => Err(Error::Parse(format!(
                "unexpected {other:?} in spin pattern {s:?}; use u/d"
            ))),
        })
        .collect()
}

/// Coupled basis `|j_1 = 1/2, j_2, ..., j_N = j; m⟩` where `j_k` is the total spin
/// of the first `k` particles. Paths ending at the same `j` are the multiplicity
/// copies of that spin, labelled `α = 0, 1, ...` in lexicographic path order.
#[derive(Debug, Clone)]
pub struct CoupledBasis {
    n_spins: usize,
    paths: BTreeMap<HalfInt, Vec<Vec<HalfInt>>>,
}

impl CoupledBasis {
    pub fn sequential(n_spins: usize) -> Result<Self> {
        if n_spins == 0 || n_spins > MAX_COUPLED_SPINS {
            return Err(unsupported!(
                "coupled basis for N = {n_spins}; supported range is 1..={MAX_COUPLED_SPINS}"
            ));
        }
        let mut frontier = vec![vec![HalfInt::HALF]];
        for _ in 1..n_spins {
            let mut next = Vec::with_capacity(2 * frontier.len());
            for path in &frontier {
                let last = *path.last().expect("non-empty path");
                // j - 1/2 first keeps lexicographic order within each final spin
                if last.twice() >= 1 {
                    let mut p = path.clone();
                    p.push(last - HalfInt::HALF);
                    next.push(p);
                }
                let mut p = path.clone();
                p.push(last + HalfInt::HALF);
                next.push(p);
            }
            frontier = next;
        }
        let mut paths: BTreeMap<HalfInt, Vec<Vec<HalfInt>>> = BTreeMap::new();
        for p in frontier {
            paths
                .entry(*p.last().expect("non-empty path"))
                .or_default()
                .push(p);
        }
        for list in paths.values_mut() {
            list.sort();
        }
        Ok(CoupledBasis { n_spins, paths })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn j_max(&self) -> HalfInt {
        HalfInt::from_twice(self.n_spins as i32)
    }

    /// Spins present in the series, descending.
    pub fn spins(&self) -> impl Iterator<Item = HalfInt> + '_ {
        self.paths.keys().rev().copied()
    }

    pub fn multiplicity(&self, j: HalfInt) -> usize {
        self.paths.get(&j).map_or(0, Vec::len)
    }

    pub fn max_multiplicity(&self) -> usize {
        self.paths.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Intermediate spins `j_1, ..., j_N` of copy `alpha` of spin `j`.
    pub fn path(&self, j: HalfInt, alpha: usize) -> Option<&[HalfInt]> {
        self.paths
            .get(&j)
            .and_then(|v| v.get(alpha))
            .map(Vec::as_slice)
    }

    pub fn paths(&self, j: HalfInt) -> &[Vec<HalfInt>] {
        self.paths.get(&j).map_or(&[], Vec::as_slice)
    }

    /// Product-state dimension `2^N`.
    pub fn product_dim(&self) -> usize {
        1 << self.n_spins
    }

    /// `⟨path; m | s_1 ... s_N⟩`, a product of Clebsch–Gordan coefficients with
    /// `m` equal to the total projection of the pattern.
    pub fn amplitude(&self, path: &[HalfInt], pattern: &[Spin]) -> Result<f64> {
        if path.len() != pattern.len() {
            return Err(crate::error::domain!(
                "path of length {} for {} spins",
                path.len(),
                pattern.len()
            ));
        }
        let mut m = pattern[0].projection();
        let mut amp = 1.0;
        for k in 1..pattern.len() {
            let m_next = m + pattern[k].projection();
            if m_next.abs() > path[k] {
                return Ok(0.0);
            }
            amp *= cg_coefficient(
                path[k - 1],
                m,
                HalfInt::HALF,
                pattern[k].projection(),
                path[k],
                m_next,
            )?;
            if amp == 0.0 {
                return Ok(0.0);
            }
            m = m_next;
        }
        Ok(amp)
    }

    /// Product-basis vector of `|path; m⟩`. Index bit `N-1-k` is set when spin `k`
    /// is down, so all-up is index 0.
    pub fn state_vector(&self, path: &[HalfInt], m: HalfInt) -> Result<Vec<f64>> {
        let n = self.n_spins;
        let mut out = vec![0.0; self.product_dim()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let pattern = index_pattern(n, idx);
            let total: i32 = pattern.iter().map(|s| s.projection().twice()).sum();
            if total == m.twice() {
                *slot = self.amplitude(path, &pattern)?;
            }
        }
        Ok(out)
    }
}

/// Spin pattern of product-basis index `idx`.
pub fn index_pattern(n: usize, idx: usize) -> Vec<Spin> {
    (0..n)
        .map(|k| {
            if idx >> (n - 1 - k) & 1 == 1 {
                Spin::Down
            } else {
                Spin::Up
            }
        })
        .collect()
}

/// Amplitudes `A_j^α` of a product state in the sequential coupled basis.
///
/// A pattern with more down than up spins is first flipped: the flip maps
/// `m_A → -m_A` and leaves every `|A_j^α|` unchanged.
pub fn decompose_product(pattern: &[Spin]) -> Result<MultiplicityState> {
    let basis = CoupledBasis::sequential(pattern.len())?;
    let twice_m: i32 = pattern.iter().map(|s| s.projection().twice()).sum();
    let flipped: Vec<Spin>;
    let pattern = if twice_m < 0 {
        flipped = pattern.iter().map(|s| s.flipped()).collect();
        &flipped
    } else {
        pattern
    };
    let m_a = HalfInt::from_twice(twice_m.abs());
    let j_max = basis.j_max();
    let blocks = HalfInt::range_inclusive(m_a, j_max)
        .map(|j| {
            basis
                .paths(j)
                .iter()
                .map(|p| basis.amplitude(p, pattern))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MultiplicityState::new(j_max, m_a, blocks)
}
