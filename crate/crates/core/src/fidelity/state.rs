use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::su2::HalfInt;

pub(crate) const NORM_TOLERANCE: f64 = 1e-12;

/// Signal state `Σ_j A_j |j, m_A⟩` with one copy of each spin block, in
/// canonical phase form (real, non-negative components).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledState {
    j_max: HalfInt,
    m_a: HalfInt,
    /// `A_j` for `j = m_A, m_A + 1, ..., J`.
    components: Vec<f64>,
}

/// Root-sum-square amplitudes over multiplicity copies; same shape as a
/// [`CoupledState`].
pub type EffectiveComponents = CoupledState;

fn check_shape(j_max: HalfInt, m_a: HalfInt, len: usize) -> Result<()> {
    if m_a.twice() < 0 {
        return Err(domain!("negative m_A = {m_a}; use |m_A|"));
    }
    j_max.check_projection(m_a)?;
    let expected = HalfInt::range_inclusive(m_a, j_max).count();
    if len != expected {
        return Err(domain!(
            "expected {expected} blocks for j = {m_a}..={j_max}, got {len}"
        ));
    }
    Ok(())
}

impl CoupledState {
    pub fn new(j_max: HalfInt, m_a: HalfInt, components: Vec<f64>) -> Result<Self> {
        check_shape(j_max, m_a, components.len())?;
        if let Some(bad) = components.iter().find(|&&a| !(a >= 0.0)) {
            return Err(domain!("component {bad} is not a non-negative real"));
        }
        let norm: f64 = components.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(domain!("state norm² {norm} differs from 1"));
        }
        Ok(CoupledState {
            j_max,
            m_a,
            components,
        })
    }

    /// Normalizes the absolute values of `components`.
    pub fn normalized(j_max: HalfInt, m_a: HalfInt, components: &[f64]) -> Result<Self> {
        let norm = components.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(domain!("zero state"));
        }
        Self::new(
            j_max,
            m_a,
            components.iter().map(|a| a.abs() / norm).collect(),
        )
    }

    pub fn j_max(&self) -> HalfInt {
        self.j_max
    }

    pub fn m_a(&self) -> HalfInt {
        self.m_a
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn spins(&self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        HalfInt::range_inclusive(self.m_a, self.j_max)
    }

    /// `A_j`, zero outside `m_A..=J`.
    pub fn component(&self, j: HalfInt) -> f64 {
        if j < self.m_a || j > self.j_max || !j.same_parity(self.m_a) {
            return 0.0;
        }
        self.components[((j - self.m_a).twice() / 2) as usize]
    }

    /// `(j, A_j)` pairs.
    pub fn amplitudes(&self) -> Vec<(HalfInt, f64)> {
        self.spins().zip(self.components.iter().copied()).collect()
    }
}

/// Signal state whose spin-`j` content is spread over the multiplicity copies
/// `α` of the `N`-spin Clebsch–Gordan series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityState {
    j_max: HalfInt,
    m_a: HalfInt,
    /// `blocks[k][α]` is `A_j^α` for `j = m_A + k`.
    blocks: Vec<Vec<f64>>,
}

impl MultiplicityState {
    pub fn new(j_max: HalfInt, m_a: HalfInt, blocks: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(j_max, m_a, blocks.len())?;
        let norm: f64 = blocks.iter().flatten().map(|a| a * a).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(domain!("state norm² {norm} differs from 1"));
        }
        Ok(MultiplicityState { j_max, m_a, blocks })
    }

    pub fn j_max(&self) -> HalfInt {
        self.j_max
    }

    pub fn m_a(&self) -> HalfInt {
        self.m_a
    }

    pub fn spins(&self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        HalfInt::range_inclusive(self.m_a, self.j_max)
    }

    /// Amplitudes `A_j^α` over the copies of spin `j`.
    pub fn block(&self, j: HalfInt) -> &[f64] {
        if j < self.m_a || j > self.j_max {
            return &[];
        }
        &self.blocks[((j - self.m_a).twice() / 2) as usize]
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }
}

/// `Ã_j = sqrt(Σ_α (A_j^α)²)`.
pub fn effective_components(state: &MultiplicityState) -> EffectiveComponents {
    let components = state
        .blocks
        .iter()
        .map(|b| b.iter().map(|a| a * a).sum::<f64>().sqrt())
        .collect();
    CoupledState {
        j_max: state.j_max,
        m_a: state.m_a,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let h = HalfInt::from_twice;
        assert!(CoupledState::new(h(2), h(0), vec![0.6, 0.8]).is_ok());
        assert!(CoupledState::new(h(2), h(0), vec![0.6, 0.7]).is_err());
        assert!(CoupledState::new(h(2), h(0), vec![-0.6, 0.8]).is_err());
        assert!(CoupledState::new(h(2), h(2), vec![0.6, 0.8]).is_err());
        assert!(CoupledState::new(h(3), h(0), vec![1.0]).is_err());
        let s = CoupledState::normalized(h(4), h(0), &[1.0, -1.0, 1.0]).unwrap();
        assert!((s.component(h(2)) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.component(h(6)), 0.0);
    }

    #[test]
    fn single_copy_is_identity_map() {
        let h = HalfInt::from_twice;
        let m = MultiplicityState::new(h(2), h(0), vec![vec![0.6], vec![0.8]]).unwrap();
        assert_eq!(effective_components(&m).components(), &[0.6, 0.8]);
        let m = MultiplicityState::new(h(2), h(0), vec![vec![0.6, 0.0], vec![0.0, 0.8]]).unwrap();
        assert_eq!(effective_components(&m).components(), &[0.6, 0.8]);
    }
}
