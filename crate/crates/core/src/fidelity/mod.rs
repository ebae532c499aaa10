//! Maximal fidelities from the tridiagonal eigenvalue problem, and fidelities of
//! given states.

mod coefficients;
mod coupling;
mod state;
mod tridiagonal;

use serde::{Deserialize, Serialize};

pub use coefficients::{mu, nu_abs};
pub use coupling::{
    decompose_product, index_pattern, parse_pattern, CoupledBasis, Spin, MAX_COUPLED_SPINS,
};
pub use state::{effective_components, CoupledState, EffectiveComponents, MultiplicityState};
pub use tridiagonal::{
    build_matrix, char_poly_q, max_eigenpair, sturm_count_below, TridiagonalSym,
};

use crate::error::{domain, Result};
use crate::jacobi::{largest_zero, JacobiParams};
use crate::su2::HalfInt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub top_eigenvalue: f64,
    /// Components `A_j` for `j = m_A, ..., J`; those below `m = max(m_A, m_B)` are zero.
    pub optimal_state: CoupledState,
    pub effective_dimension: u64,
}

/// `(J+1)² - m²`, the number of states in blocks `j = m, ..., J`.
pub fn effective_dimension(j_max: HalfInt, m: HalfInt) -> u64 {
    let (j2, m2) = (i64::from(j_max.twice()), i64::from(m.twice()));
    (((j2 + 2) * (j2 + 2) - m2 * m2) / 4) as u64
}

/// Best fidelity over states with projection `m_A`, decoded with reference
/// projection `m_B`.
pub fn best_fidelity(j_max: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<FidelityResult> {
    let matrix = build_matrix(j_max, m_a, m_b)?;
    Ok(result_from_matrix(&matrix))
}

pub(crate) fn result_from_matrix(matrix: &TridiagonalSym) -> FidelityResult {
    let (top, vector) = max_eigenpair(matrix);
    let m = matrix.m();
    let pad = HalfInt::range_inclusive(matrix.m_a(), m).count() - 1;
    let components = std::iter::repeat_n(0.0, pad)
        .chain(vector.into_iter().rev())
        .collect();
    let optimal_state = CoupledState::new(matrix.j_max(), matrix.m_a(), components)
        .expect("normalized Perron vector");
    FidelityResult {
        fidelity: (1.0 + top) / 2.0,
        top_eigenvalue: top,
        optimal_state,
        effective_dimension: effective_dimension(matrix.j_max(), m),
    }
}

/// Minimal projection for `N` spins: `0` for even `N`, `1/2` for odd.
pub fn minimal_projection(n_spins: u32) -> HalfInt {
    HalfInt::from_twice((n_spins % 2) as i32)
}

/// Optimal fidelity `F_N` with `J = N/2` and minimal `m_A = m_B`.
pub fn optimal_fidelity(n_spins: u32) -> Result<FidelityResult> {
    if n_spins == 0 {
        return Err(domain!("need at least one spin"));
    }
    let m = minimal_projection(n_spins);
    best_fidelity(HalfInt::from_twice(n_spins as i32), m, m)
}

/// The same maximum read off the largest Jacobi zero: `(1 + x_l^{a,b}) / 2`.
pub fn jacobi_fidelity(j_max: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<f64> {
    let matrix = build_matrix(j_max, m_a, m_b)?;
    Ok((1.0 + largest_zero(matrix.jacobi_params())?.largest_zero) / 2.0)
}

/// Jacobi parameters `(l, a, b)` for a fidelity matrix.
pub fn jacobi_params(j_max: HalfInt, m_a: HalfInt, m_b: HalfInt) -> Result<JacobiParams> {
    Ok(build_matrix(j_max, m_a, m_b)?.jacobi_params())
}

/// Fidelity of a canonical-phase state measured with the continuous POVM of
/// reference projection `m_B`:
/// `1/2 + 1/2 Σ_{j≥m} μ_j A_j² + Σ_{j>m} A_{j-1} A_j |ν_j| - 1/2 Σ_{j<m} A_j²`.
pub fn general_fidelity(state: &CoupledState, m_b: HalfInt) -> Result<f64> {
    let (j_max, m_a) = (state.j_max(), state.m_a());
    if m_b.twice() < 0 {
        return Err(domain!("m_B = {m_b} must be non-negative"));
    }
    j_max.check_projection(m_b)?;
    let m = m_a.max(m_b);
    let mut f = 0.5;
    for (j, a) in state.amplitudes() {
        if j < m {
            f -= 0.5 * a * a;
            continue;
        }
        f += 0.5 * mu(j, m_a, m_b)? * a * a;
        if j > m {
            f += state.component(j - HalfInt::ONE) * a * nu_abs(j, m_a, m_b)?;
        }
    }
    Ok(f)
}

/// `Σ_{j≥m} (1 + μ_j) a_j² / 2 + Σ_{j>m} ν_j a_{j-1} a_j` for signed, possibly
/// unnormalized components `a_j`, `j = m_A, ..., J`. Equals [`general_fidelity`]
/// on normalized non-negative input.
pub fn fidelity_form(
    j_max: HalfInt,
    m_a: HalfInt,
    m_b: HalfInt,
    components: &[f64],
) -> Result<f64> {
    let m = m_a.max(m_b);
    let spins: Vec<HalfInt> = HalfInt::range_inclusive(m_a, j_max).collect();
    if spins.len() != components.len() {
        return Err(domain!(
            "expected {} components, got {}",
            spins.len(),
            components.len()
        ));
    }
    let mut f = 0.0;
    for (k, (&j, &a)) in spins.iter().zip(components).enumerate() {
        if j < m {
            continue;
        }
        f += 0.5 * (1.0 + mu(j, m_a, m_b)?) * a * a;
        if j > m {
            f += nu_abs(j, m_a, m_b)? * components[k - 1] * a;
        }
    }
    Ok(f)
}

/// Fidelity of a multiplicity state against a multi-copy reference. `b_vectors[k][α]`
/// is the vector `b_j^α ∈ R^K` for `j = m_A + k`; the state's copy-`κ` components
/// are `Σ_α (b_j^α)_κ A_j^α`.
pub fn aligned_fidelity(
    state: &MultiplicityState,
    b_vectors: &[Vec<Vec<f64>>],
    m_b: HalfInt,
) -> Result<f64> {
    if b_vectors.len() != state.blocks().len() {
        return Err(domain!(
            "b-vectors cover {} blocks, state has {}",
            b_vectors.len(),
            state.blocks().len()
        ));
    }
    let copies = b_vectors.iter().flatten().map(Vec::len).max().unwrap_or(0);
    let mut total = 0.0;
    for kappa in 0..copies {
        let comps: Vec<f64> = state
            .blocks()
            .iter()
            .zip(b_vectors)
            .map(|(amps, bs)| {
                amps.iter()
                    .zip(bs)
                    .map(|(a, b)| a * b.get(kappa).copied().unwrap_or(0.0))
                    .sum()
            })
            .collect();
        total += fidelity_form(state.j_max(), state.m_a(), m_b, &comps)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn table_values() {
        let exact = [
            2.0 / 3.0,
            (3.0 + 3f64.sqrt()) / 6.0,
            (6.0 + 6f64.sqrt()) / 10.0,
            (5.0 + 15f64.sqrt()) / 10.0,
        ];
        for (n, f) in (1..=4).zip(exact) {
            assert!(
                (optimal_fidelity(n).unwrap().fidelity - f).abs() < 1e-14,
                "N = {n}"
            );
        }
        assert!((optimal_fidelity(7).unwrap().fidelity - 0.9429).abs() < 5e-5);
        assert!(optimal_fidelity(0).is_err());
    }

    #[test]
    fn effective_dimensions() {
        assert_eq!(optimal_fidelity(4).unwrap().effective_dimension, 9);
        assert_eq!(optimal_fidelity(3).unwrap().effective_dimension, 6);
        assert_eq!(effective_dimension(h(2), h(2)), 3);
        for n in 1..=30u32 {
            let r = optimal_fidelity(n).unwrap();
            let j = HalfInt::from_twice(n as i32);
            let blocks: usize = r.optimal_state.spins().map(HalfInt::multiplet_dim).sum();
            assert_eq!(r.effective_dimension as usize, blocks);
            assert_eq!(r.optimal_state.j_max(), j);
        }
    }

    #[test]
    fn four_spins_projection_one() {
        let r = best_fidelity(h(4), h(2), h(2)).unwrap();
        assert!((r.fidelity - (10.0 + 10f64.sqrt()) / 15.0).abs() < 1e-14);
    }

    #[test]
    fn general_fidelity_cases() {
        let up = CoupledState::new(h(2), h(2), vec![1.0]).unwrap();
        assert!((general_fidelity(&up, h(2)).unwrap() - 0.75).abs() < 1e-15);
        let s = CoupledState::new(h(2), h(0), vec![0.6, 0.8]).unwrap();
        let expect = 0.5 + 0.48 / 3f64.sqrt();
        assert!((general_fidelity(&s, h(0)).unwrap() - expect).abs() < 1e-15);
        for n in 1..=12 {
            let r = optimal_fidelity(n).unwrap();
            let m = minimal_projection(n);
            assert!((general_fidelity(&r.optimal_state, m).unwrap() - r.fidelity).abs() < 1e-13);
            let form =
                fidelity_form(r.optimal_state.j_max(), m, m, r.optimal_state.components()).unwrap();
            assert!((form - r.fidelity).abs() < 1e-13);
        }
    }

    #[test]
    fn mismatched_reference_loses_low_blocks() {
        let s = CoupledState::new(h(2), h(0), vec![0.6, 0.8]).unwrap();
        let expect = 0.5 - 0.5 * 0.36;
        assert!((general_fidelity(&s, h(2)).unwrap() - expect).abs() < 1e-15);
        let form = fidelity_form(h(2), h(0), h(2), s.components()).unwrap();
        assert!((form - expect).abs() < 1e-15);
    }

    #[test]
    fn product_state_fidelity() {
        let e = effective_components(&decompose_product(&parse_pattern("uudd").unwrap()).unwrap());
        let f = general_fidelity(&e, h(0)).unwrap();
        let expect = (15.0 + 5.0 * 2f64.sqrt() + 2.0 * 5f64.sqrt()) / 30.0;
        assert!((f - expect).abs() < 1e-14, "{f}");
        assert!(optimal_fidelity(4).unwrap().fidelity > f);
    }

    #[test]
    fn jacobi_route_matches() {
        for j2 in 0..=12 {
            for ma in HalfInt::range_inclusive(h(j2 % 2), h(j2)) {
                for mb in HalfInt::range_inclusive(h(j2 % 2), h(j2)) {
                    let a = best_fidelity(h(j2), ma, mb).unwrap().fidelity;
                    let b = jacobi_fidelity(h(j2), ma, mb).unwrap();
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn standard_b_vectors_reproduce_effective_fidelity_for_paths() {
        let s = decompose_product(&parse_pattern("udud").unwrap()).unwrap();
        let copies = 3;
        let b: Vec<Vec<Vec<f64>>> = s
            .blocks()
            .iter()
            .map(|blk| {
                (0..blk.len())
                    .map(|alpha| {
                        (0..copies)
                            .map(|k| if k == alpha { 1.0 } else { 0.0 })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let aligned = aligned_fidelity(&s, &b, h(0)).unwrap();
        let bound = general_fidelity(&effective_components(&s), h(0)).unwrap();
        assert!(aligned <= bound + 1e-12);
    }
}
