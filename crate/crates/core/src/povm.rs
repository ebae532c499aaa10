//! Decoding measurements: reference states, finite and continuous POVMs, their
//! completeness, and average fidelities by quadrature.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Error, Result};
use crate::fidelity::{CoupledBasis, CoupledState, MultiplicityState};
use crate::su2::{sphere_quadrature, wigner_d, BlockSpace, Direction, HalfInt, SphereQuadrature};

/// Largest `N` for which the degenerate POVM is built on the full product space.
pub const MAX_DEGENERATE_SPINS: usize = 8;

/// `|B⟩ = Σ_j B_j |j, m_B⟩` with `B_j = sqrt((2j+1)/c)` and `c = (J+1)² - m_B²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmReference {
    j_max: HalfInt,
    m_b: HalfInt,
    /// `B_j` for `j = m_B, ..., J`.
    components: Vec<f64>,
    weight: f64,
}

impl PovmReference {
    pub fn j_max(&self) -> HalfInt {
        self.j_max
    }

    pub fn m_b(&self) -> HalfInt {
        self.m_b
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// The weight `c`, equal to the dimension of blocks `j = m_B, ..., J`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn amplitudes(&self) -> Vec<(HalfInt, f64)> {
        HalfInt::range_inclusive(self.m_b, self.j_max)
            .zip(self.components.iter().copied())
            .collect()
    }

    /// Blocks `j = m_B, ..., J` on which the POVM resolves the identity.
    pub fn block_space(&self) -> BlockSpace {
        BlockSpace::new(self.j_max, self.m_b).expect("validated on construction")
    }
}

pub fn reference_state(j_max: HalfInt, m_b: HalfInt) -> Result<PovmReference> {
    if m_b.twice() < 0 {
        return Err(domain!("m_B = {m_b} must be non-negative"));
    }
    j_max.check_projection(m_b)?;
    let weight = crate::fidelity::effective_dimension(j_max, m_b) as f64;
    let components = HalfInt::range_inclusive(m_b, j_max)
        .map(|j| (j.multiplet_dim() as f64 / weight).sqrt())
        .collect();
    Ok(PovmReference {
        j_max,
        m_b,
        components,
        weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub weight: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PovmKind {
    /// `O(n) = c U(n)|B⟩⟨B|U†(n)` over the whole sphere.
    Continuous,
    /// `O_r = c_r U(n_r)|B⟩⟨B|U†(n_r)`.
    Discrete(Vec<Outcome>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmSpec {
    reference: PovmReference,
    kind: PovmKind,
}

impl PovmSpec {
    pub fn continuous(j_max: HalfInt, m_b: HalfInt) -> Result<Self> {
        Ok(PovmSpec {
            reference: reference_state(j_max, m_b)?,
            kind: PovmKind::Continuous,
        })
    }

    /// A finite POVM from arbitrary outcomes; completeness is not checked here.
    pub fn discrete(reference: PovmReference, outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(domain!("a discrete POVM needs at least one outcome"));
        }
        if let Some(o) = outcomes.iter().find(|o| !(o.weight > 0.0)) {
            return Err(domain!("outcome weight {} is not positive", o.weight));
        }
        Ok(PovmSpec {
            reference,
            kind: PovmKind::Discrete(outcomes),
        })
    }

    pub fn reference(&self) -> &PovmReference {
        &self.reference
    }

    pub fn kind(&self) -> &PovmKind {
        &self.kind
    }

    pub fn outcomes(&self) -> Option<&[Outcome]> {
        match &self.kind {
            PovmKind::Discrete(o) => Some(o),
            PovmKind::Continuous => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PovmJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: PovmJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let reference = reference_state(HalfInt::from_twice(raw.j2), HalfInt::from_twice(raw.mb2))?;
        match raw.kind.as_str() {
            "continuous" => Ok(PovmSpec {
                reference,
                kind: PovmKind::Continuous,
            }),
            "discrete" => {
                let outcomes = raw
                    .outcomes
                    .iter()
                    .map(|o| {
                        Ok(Outcome {
                            weight: o.weight,
                            direction: Direction::new(o.theta, o.phi)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                PovmSpec::discrete(reference, outcomes)
            }
            other => Err(Error::Parse(format!("unknown POVM kind {other:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct OutcomeJson {
    weight: f64,
    theta: f64,
    phi: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PovmJson {
    #[serde(rename = "J2")]
    j2: i32,
    #[serde(rename = "mB2")]
    mb2: i32,
    kind: String,
    outcomes: Vec<OutcomeJson>,
}

impl From<&PovmSpec> for PovmJson {
    fn from(p: &PovmSpec) -> Self {
        let (kind, outcomes) = match &p.kind {
            PovmKind::Continuous => ("continuous", Vec::new()),
            PovmKind::Discrete(list) => (
                "discrete",
                list.iter()
                    .map(|o| OutcomeJson {
                        weight: o.weight,
                        theta: o.direction.theta(),
                        phi: o.direction.phi(),
                    })
                    .collect(),
            ),
        };
        PovmJson {
            j2: p.reference.j_max.twice(),
            mb2: p.reference.m_b.twice(),
            kind: kind.into(),
            outcomes,
        }
    }
}

fn tetrahedron_directions() -> Vec<Direction> {
    let theta = (-1.0f64 / 3.0).acos();
    let mut dirs = vec![Direction::Z];
    dirs.extend(
        (0..3).map(|k| Direction::new(theta, f64::from(k) * TAU / 3.0).expect("valid angles")),
    );
    dirs
}

/// Four unit-weight outcomes at the vertices of a regular tetrahedron, `J = 1`,
/// `m_B = 0`.
pub fn tetrahedron_povm() -> PovmSpec {
    tetrahedron_with_reference(HalfInt::ZERO).expect("m_B = 0 is admissible")
}

/// Tetrahedron vertices with reference projection `m_B ∈ {0, 1}` and uniform
/// weights `c/4`.
pub fn tetrahedron_with_reference(m_b: HalfInt) -> Result<PovmSpec> {
    let reference = reference_state(HalfInt::ONE, m_b)?;
    let weight = reference.weight / 4.0;
    let outcomes = tetrahedron_directions()
        .into_iter()
        .map(|direction| Outcome { weight, direction })
        .collect();
    PovmSpec::discrete(reference, outcomes)
}

/// Six outcomes at `±x, ±y, ±z` with weights `c/6`, `J = 3/2`.
pub fn octahedron_povm(m_b: HalfInt) -> Result<PovmSpec> {
    if m_b != HalfInt::from_twice(1) && m_b != HalfInt::from_twice(3) {
        return Err(unsupported!(
            "octahedron POVM needs m_B = 1/2 or 3/2, got {m_b}"
        ));
    }
    let reference = reference_state(HalfInt::from_twice(3), m_b)?;
    let weight = reference.weight / 6.0;
    let dirs = [
        (0.0, 0.0),
        (PI, 0.0),
        (FRAC_PI_2, 0.0),
        (FRAC_PI_2, PI),
        (FRAC_PI_2, FRAC_PI_2),
        (FRAC_PI_2, 3.0 * FRAC_PI_2),
    ];
    let outcomes = dirs
        .iter()
        .map(|&(t, p)| {
            Ok(Outcome {
                weight,
                direction: Direction::new(t, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PovmSpec::discrete(reference, outcomes)
}

/// Default quadrature degree for a POVM on spins up to `J`: `2J + 4`.
pub fn default_degree(j_max: HalfInt) -> usize {
    (j_max.twice() + 4) as usize
}

fn add_outer(acc: &mut DMatrix<Complex64>, v: &DVector<Complex64>, weight: f64) {
    let n = v.len();
    for a in 0..n {
        let va = v[a] * weight;
        if va == Complex64::new(0.0, 0.0) {
            continue;
        }
        for b in 0..n {
            acc[(a, b)] += va * v[b].conj();
        }
    }
}

fn max_deviation_from_identity(m: &DMatrix<Complex64>) -> f64 {
    let mut err: f64 = 0.0;
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            let target = if a == b { 1.0 } else { 0.0 };
            err = err.max((m[(a, b)] - Complex64::new(target, 0.0)).norm());
        }
    }
    err
}

/// `Σ_r O_r` (or `∫ dn O(n)`) on the blocks `j = m_B, ..., J`.
pub fn povm_sum(povm: &PovmSpec) -> DMatrix<Complex64> {
    let reference = &povm.reference;
    let space = reference.block_space();
    let amps = reference.amplitudes();
    let mut acc = DMatrix::zeros(space.dim(), space.dim());
    match &povm.kind {
        PovmKind::Discrete(outcomes) => {
            for o in outcomes {
                let v = space.rotate_eigenstate(reference.m_b, &amps, &o.direction);
                add_outer(&mut acc, &v, o.weight);
            }
        }
        PovmKind::Continuous => {
            let quad = sphere_quadrature(default_degree(reference.j_max));
            for (n, w) in quad.nodes() {
                let v = space.rotate_eigenstate(reference.m_b, &amps, n);
                add_outer(&mut acc, &v, w * reference.weight);
            }
        }
    }
    acc
}

/// `max |Σ_r O_r - 1|` on the block space of the reference.
pub fn verify_completeness(povm: &PovmSpec) -> f64 {
    max_deviation_from_identity(&povm_sum(povm))
}

/// Basis labels `{+, 0, −, s}` of two spins: the triplet `|1, m⟩` and the singlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoSpinLabel {
    Plus,
    Zero,
    Minus,
    Singlet,
}

impl TwoSpinLabel {
    fn index(self) -> usize {
        self as usize
    }
}

/// `ω_{kj} = Σ_r ⟨k|U†(n_r) O_r U(n_r)|j⟩` for a two-spin POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSummary {
    matrix: DMatrix<Complex64>,
}

impl OmegaSummary {
    pub fn get(&self, k: TwoSpinLabel, j: TwoSpinLabel) -> Complex64 {
        self.matrix[(k.index(), j.index())]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `ω_{++} + ω_{00} + ω_{−−}`.
    pub fn triplet_trace(&self) -> f64 {
        (0..3).map(|k| self.matrix[(k, k)].re).sum()
    }

    /// `ω_{00} ω_{ss} - |ω_{0s}|²`, non-negative by the Schwarz inequality.
    pub fn schwarz_gap(&self) -> f64 {
        use TwoSpinLabel::*;
        self.get(Zero, Zero).re * self.get(Singlet, Singlet).re - self.get(Zero, Singlet).norm_sqr()
    }
}

/// The ω matrix of a two-spin POVM. A reference with `m_B = 1` does not reach the
/// singlet, so each outcome is completed by its share `c_r / c` of the singlet
/// projector, the rotation-invariant completion to a measurement on all four
/// states.
pub fn omega_summary(povm: &PovmSpec) -> Result<OmegaSummary> {
    let reference = &povm.reference;
    if reference.j_max != HalfInt::ONE {
        return Err(unsupported!(
            "ω summary is defined for two spins (J = 1), got J = {}",
            reference.j_max
        ));
    }
    let full = BlockSpace::full(HalfInt::ONE)?;
    let amps = reference.amplitudes();
    let mut singlet = DMatrix::zeros(4, 4);
    if reference.m_b > HalfInt::ZERO {
        singlet[(3, 3)] = Complex64::new(1.0, 0.0);
    }
    let mut omega = DMatrix::zeros(4, 4);
    let mut add = |n: &Direction, weight: f64| {
        let u = full.rotation(n);
        let v = full.rotate_eigenstate(reference.m_b, &amps, n);
        let mut op = DMatrix::zeros(4, 4);
        add_outer(&mut op, &v, weight);
        op += &singlet * Complex64::new(weight / reference.weight, 0.0);
        omega += u.adjoint() * op * u;
    };
    match &povm.kind {
        PovmKind::Discrete(outcomes) => outcomes.iter().for_each(|o| add(&o.direction, o.weight)),
        PovmKind::Continuous => {
            let quad = sphere_quadrature(default_degree(reference.j_max));
            quad.nodes()
                .iter()
                .for_each(|(n, w)| add(n, w * reference.weight));
        }
    }
    Ok(OmegaSummary { matrix: omega })
}

/// Average fidelity from sphere quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureFidelity {
    pub value: f64,
    pub degree: usize,
    /// False when the degree is below `2J + 2` and the rule is not exact.
    pub exact_degree: bool,
}

/// `Σ_r c_r ∫ dn (1 + n·n_r)/2 |⟨B|U†(n_r) U(n)|A⟩|²` for discrete POVMs and
/// `c ∫ dn (1 + cos θ)/2 |⟨B|U(n)|A⟩|²` for continuous ones.
pub fn quadrature_fidelity(
    state: &CoupledState,
    povm: &PovmSpec,
    quad: &SphereQuadrature,
) -> Result<QuadratureFidelity> {
    let reference = &povm.reference;
    if state.j_max() != reference.j_max {
        return Err(domain!(
            "state has J = {}, POVM has J = {}",
            state.j_max(),
            reference.j_max
        ));
    }
    let j_max = state.j_max();
    let needed = (j_max.twice() + 2) as usize;
    let exact_degree = quad.max_degree() >= needed;
    if !exact_degree {
        warn!(
            "quadrature degree {} below {needed}; fidelity is approximate",
            quad.max_degree()
        );
    }
    let space = BlockSpace::new(j_max, state.m_a().min(reference.m_b))?;
    let a_amps = state.amplitudes();
    let b_amps = reference.amplitudes();
    let overlap = |b: &DVector<Complex64>, n: &Direction| {
        let a = space.rotate_eigenstate(state.m_a(), &a_amps, n);
        b.dotc(&a).norm_sqr()
    };
    let value = match &povm.kind {
        PovmKind::Continuous => {
            let b = space.embed(reference.m_b, &b_amps);
            reference.weight * quad.integrate(|n| 0.5 * (1.0 + n.theta().cos()) * overlap(&b, n))
        }
        PovmKind::Discrete(outcomes) => outcomes
            .iter()
            .map(|o| {
                let b = space.rotate_eigenstate(reference.m_b, &b_amps, &o.direction);
                o.weight * quad.integrate(|n| 0.5 * (1.0 + n.dot(&o.direction)) * overlap(&b, n))
            })
            .sum(),
    };
    Ok(QuadratureFidelity {
        value,
        degree: quad.max_degree(),
        exact_degree,
    })
}

/// Orthonormal vectors `b_j^α ∈ R^K`, one per copy `α` of each spin `j` in the
/// `N`-spin series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateBasis {
    n_spins: usize,
    copies: usize,
    /// `(j, b_j^α for each α)`, descending `j`.
    vectors: Vec<(HalfInt, Vec<Vec<f64>>)>,
}

impl DegenerateBasis {
    /// Standard unit vectors: `b_j^α = e_α`, with `K` the largest multiplicity.
    pub fn standard(basis: &CoupledBasis) -> Self {
        let copies = basis.max_multiplicity();
        let vectors = basis
            .spins()
            .map(|j| {
                let vs = (0..basis.multiplicity(j))
                    .map(|alpha| {
                        (0..copies)
                            .map(|k| if k == alpha { 1.0 } else { 0.0 })
                            .collect()
                    })
                    .collect();
                (j, vs)
            })
            .collect();
        DegenerateBasis {
            n_spins: basis.n_spins(),
            copies,
            vectors,
        }
    }

    /// Vectors for which every block of `state` lands in copy 0, so the
    /// copy-wise components are `Ã_j δ_{κ0}`.
    pub fn aligned_to(basis: &CoupledBasis, state: &MultiplicityState) -> Result<Self> {
        let copies = basis.max_multiplicity();
        let mut vectors = Vec::new();
        for j in basis.spins() {
            let mult = basis.multiplicity(j);
            let amps = if j >= state.m_a() && j <= state.j_max() {
                state.block(j).to_vec()
            } else {
                vec![0.0; mult]
            };
            if amps.len() != mult {
                return Err(domain!(
                    "state block j = {j} has {} copies, basis has {mult}",
                    amps.len()
                ));
            }
            let q = orthogonal_with_first_column(&amps);
            let vs = (0..mult)
                .map(|alpha| {
                    (0..copies)
                        .map(|k| if k < mult { q[(alpha, k)] } else { 0.0 })
                        .collect()
                })
                .collect();
            vectors.push((j, vs));
        }
        Ok(DegenerateBasis {
            n_spins: basis.n_spins(),
            copies,
            vectors,
        })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn vectors(&self, j: HalfInt) -> &[Vec<f64>] {
        self.vectors
            .iter()
            .find(|(k, _)| *k == j)
            .map_or(&[], |(_, v)| v.as_slice())
    }

    /// `max |b_j^α · b_j^β - δ^{αβ}|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (_, vs) in &self.vectors {
            for (a, u) in vs.iter().enumerate() {
                for (b, v) in vs.iter().enumerate() {
                    let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                    err = err.max((dot - if a == b { 1.0 } else { 0.0 }).abs());
                }
            }
        }
        err
    }

    /// Per-block vectors for `j = m_A, ..., J`, the layout
    /// [`crate::fidelity::aligned_fidelity`] expects.
    pub fn blocks_from(&self, m_a: HalfInt) -> Vec<Vec<Vec<f64>>> {
        let j_max = HalfInt::from_twice(self.n_spins as i32);
        HalfInt::range_inclusive(m_a, j_max)
            .map(|j| self.vectors(j).to_vec())
            .collect()
    }
}

/// Orthogonal matrix whose first column is `v / |v|` (`e_0` for `v = 0`), by a
/// Householder reflection.
fn orthogonal_with_first_column(v: &[f64]) -> DMatrix<f64> {
    let n = v.len();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0 || norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    let u = DVector::from_iterator(n, v.iter().map(|x| x / norm));
    let mut w = u.clone();
    w[0] -= 1.0;
    let wn = w.norm_squared();
    if wn < 1e-30 {
        return DMatrix::identity(n, n);
    }
    DMatrix::identity(n, n) - (&w * w.transpose()) * (2.0 / wn)
}

/// `⊗_k D^{1/2}(n)` on `N` spins, with spin 0 as the most significant factor.
pub fn product_rotation(n_spins: usize, n: &Direction) -> DMatrix<Complex64> {
    let single = wigner_d(HalfInt::HALF, n).into_matrix();
    let mut u = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for _ in 0..n_spins {
        u = u.kronecker(&single);
    }
    u
}

/// Multi-copy continuous POVM `O(n) = c U(n) Σ_κ |B^κ⟩⟨B^κ| U†(n)` on the full
/// `2^N`-dimensional space, with `|B^κ⟩ = Σ_{j,α} sqrt((2j+1)/c) (b_j^α)_κ |j, α, m_B⟩`.
#[derive(Debug, Clone)]
pub struct DegeneratePovm {
    reference: PovmReference,
    basis: DegenerateBasis,
    coupled: CoupledBasis,
    /// `|B^κ⟩` in the product basis.
    reference_vectors: Vec<DVector<Complex64>>,
}

impl DegeneratePovm {
    pub fn reference(&self) -> &PovmReference {
        &self.reference
    }

    pub fn basis(&self) -> &DegenerateBasis {
        &self.basis
    }

    pub fn copies(&self) -> usize {
        self.reference_vectors.len()
    }

    pub fn reference_vectors(&self) -> &[DVector<Complex64>] {
        &self.reference_vectors
    }

    /// Projector onto blocks `j ≥ m_B` in the product basis (the identity for the
    /// minimal `m_B`).
    pub fn target_projector(&self) -> Result<DMatrix<Complex64>> {
        let dim = self.coupled.product_dim();
        let mut p = DMatrix::zeros(dim, dim);
        for j in self.coupled.spins().filter(|&j| j >= self.reference.m_b) {
            for path in self.coupled.paths(j) {
                for m in j.projections() {
                    let v = DVector::from_iterator(
                        dim,
                        self.coupled
                            .state_vector(path, m)?
                            .into_iter()
                            .map(|x| Complex64::new(x, 0.0)),
                    );
                    add_outer(&mut p, &v, 1.0);
                }
            }
        }
        Ok(p)
    }

    /// `max |c ∫ dn Σ_κ U|B^κ⟩⟨B^κ|U† - P|` over the product space.
    pub fn verify_completeness(&self, quad: &SphereQuadrature) -> Result<f64> {
        let dim = self.coupled.product_dim();
        let mut acc = DMatrix::zeros(dim, dim);
        for (n, w) in quad.nodes() {
            let u = product_rotation(self.coupled.n_spins(), n);
            for b in &self.reference_vectors {
                add_outer(&mut acc, &(&u * b), w * self.reference.weight);
            }
        }
        let p = self.target_projector()?;
        Ok((acc - p).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// `c ∫ dn (1 + cos θ)/2 Σ_κ |⟨B^κ|U(n)|ψ⟩|²` for a product-basis state.
    pub fn fidelity(&self, psi: &DVector<Complex64>, quad: &SphereQuadrature) -> Result<f64> {
        if psi.len() != self.coupled.product_dim() {
            return Err(domain!(
                "state has dimension {}, expected {}",
                psi.len(),
                self.coupled.product_dim()
            ));
        }
        let value = quad.integrate(|n| {
            let rotated = product_rotation(self.coupled.n_spins(), n) * psi;
            let p: f64 = self
                .reference_vectors
                .iter()
                .map(|b| b.dotc(&rotated).norm_sqr())
                .sum();
            0.5 * (1.0 + n.theta().cos()) * p
        });
        Ok(self.reference.weight * value)
    }
}

/// Degenerate POVM for `N ≤ 8` spins with standard b-vectors.
pub fn degenerate_povm(n_spins: usize, m_b: HalfInt) -> Result<DegeneratePovm> {
    let coupled = degenerate_basis_space(n_spins)?;
    let basis = DegenerateBasis::standard(&coupled);
    degenerate_povm_with(coupled, basis, m_b)
}

fn degenerate_basis_space(n_spins: usize) -> Result<CoupledBasis> {
    if n_spins == 0 || n_spins > MAX_DEGENERATE_SPINS {
        return Err(unsupported!(
            "degenerate POVM for N = {n_spins}; supported range is 1..={MAX_DEGENERATE_SPINS}"
        ));
    }
    CoupledBasis::sequential(n_spins)
}

/// Degenerate POVM with b-vectors aligned to `state`.
pub fn aligned_degenerate_povm(state: &MultiplicityState, m_b: HalfInt) -> Result<DegeneratePovm> {
    let coupled = degenerate_basis_space(HalfInt::twice(state.j_max()) as usize)?;
    let basis = DegenerateBasis::aligned_to(&coupled, state)?;
    degenerate_povm_with(coupled, basis, m_b)
}

fn degenerate_povm_with(
    coupled: CoupledBasis,
    basis: DegenerateBasis,
    m_b: HalfInt,
) -> Result<DegeneratePovm> {
    let reference = reference_state(coupled.j_max(), m_b)?;
    let dim = coupled.product_dim();
    let mut reference_vectors = vec![DVector::zeros(dim); basis.copies()];
    for (j, b_j) in reference.amplitudes() {
        for (alpha, path) in coupled.paths(j).iter().enumerate() {
            let v = coupled.state_vector(path, m_b)?;
            for (kappa, out) in reference_vectors.iter_mut().enumerate() {
                let coeff = b_j * basis.vectors(j)[alpha][kappa];
                if coeff != 0.0 {
                    for (o, x) in out.iter_mut().zip(&v) {
                        *o += Complex64::new(coeff * x, 0.0);
                    }
                }
            }
        }
    }
    Ok(DegeneratePovm {
        reference,
        basis,
        coupled,
        reference_vectors,
    })
}
