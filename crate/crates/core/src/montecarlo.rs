//! Stochastic estimate of the average fidelity: sample a direction, encode,
//! measure with a finite POVM, score the guess.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fidelity::CoupledState;
use crate::povm::{verify_completeness, PovmSpec};
use crate::su2::{haar_sample, seeded_rng, BlockSpace, Direction, HalfInt};

/// Completeness residual above which a POVM is rejected for simulation.
pub const COMPLETENESS_GATE: f64 = 1e-8;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SPINDIR_THREADS";

/// Welford running mean and second central moment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines disjoint samples. The mean is formed as the count-weighted mean
    /// of the parts.
    pub fn merge(parts: &[RunningMoments]) -> RunningMoments {
        let count: u64 = parts.iter().map(|p| p.count).sum();
        if count == 0 {
            return RunningMoments::default();
        }
        let mean = parts.iter().map(|p| p.count as f64 * p.mean).sum::<f64>() / count as f64;
        let m2 = parts
            .iter()
            .map(|p| p.m2 + p.count as f64 * (p.mean - mean).powi(2))
            .sum();
        RunningMoments { count, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with the `n - 1` denominator.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub analytic_target: Option<f64>,
    pub workers: usize,
    #[serde(skip)]
    moments: RunningMoments,
}

impl SimReport {
    fn from_moments(moments: RunningMoments, seed: u64, workers: usize) -> Self {
        SimReport {
            trials: moments.count(),
            seed,
            mean_fidelity: moments.mean(),
            std_error: moments.std_error(),
            analytic_target: None,
            workers,
            moments,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.analytic_target = Some(target);
        self
    }

    pub fn moments(&self) -> RunningMoments {
        self.moments
    }

    /// `|mean - target| / std_error`.
    pub fn sigma_distance(&self) -> Option<f64> {
        self.analytic_target.map(|t| {
            let d = (self.mean_fidelity - t).abs();
            if self.std_error > 0.0 {
                d / self.std_error
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
    }

    /// `{trials, seed, mean, stderr, target, sigma_distance}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean_fidelity,
            "stderr": self.std_error,
            "target": self.analytic_target,
            "sigma_distance": self.sigma_distance(),
        })
    }
}

/// Precomputed rotated reference vectors `U(n_r)|B⟩` for one state/POVM pair.
struct Measurement {
    space: BlockSpace,
    m_a: HalfInt,
    amplitudes: Vec<(HalfInt, f64)>,
    outcomes: Vec<(Direction, f64, DVector<Complex64>)>,
}

impl Measurement {
    fn new(state: &CoupledState, povm: &PovmSpec) -> Result<Self> {
        let outcomes = povm
            .outcomes()
            .ok_or_else(|| Error::Precondition("only discrete POVMs are simulated".into()))?;
        let reference = povm.reference();
        if reference.j_max() != state.j_max() {
            return Err(domain!(
                "state has J = {}, POVM has J = {}",
                state.j_max(),
                reference.j_max()
            ));
        }
        let residual = verify_completeness(povm);
        if !(residual < COMPLETENESS_GATE) {
            return Err(Error::Precondition(format!(
                "POVM completeness residual {residual:.3e} exceeds {COMPLETENESS_GATE:e}"
            )));
        }
        let space = BlockSpace::new(state.j_max(), state.m_a().min(reference.m_b()))?;
        let b_amps = reference.amplitudes();
        let outcomes = outcomes
            .iter()
            .map(|o| {
                (
                    o.direction,
                    o.weight,
                    space.rotate_eigenstate(reference.m_b(), &b_amps, &o.direction),
                )
            })
            .collect();
        Ok(Measurement {
            space,
            m_a: state.m_a(),
            amplitudes: state.amplitudes(),
            outcomes,
        })
    }

    fn probabilities_into(&self, n: &Direction, out: &mut Vec<f64>) {
        let a = self.space.rotate_eigenstate(self.m_a, &self.amplitudes, n);
        out.clear();
        out.extend(
            self.outcomes
                .iter()
                .map(|(_, w, b)| w * b.dotc(&a).norm_sqr()),
        );
    }

    fn run(&self, trials: u64, seed: u64) -> RunningMoments {
        let mut rng = seeded_rng(seed);
        let mut moments = RunningMoments::default();
        let mut probs = Vec::with_capacity(self.outcomes.len());
        for _ in 0..trials {
            let n = haar_sample(&mut rng);
            self.probabilities_into(&n, &mut probs);
            let r = sample_categorical(&probs, rng.random::<f64>());
            moments.push(0.5 * (1.0 + n.dot(&self.outcomes[r].0)));
        }
        moments
    }
}

/// Inverse-CDF draw from (approximately) normalized weights given `u ∈ [0, 1)`.
pub fn sample_categorical(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if target < acc {
            return k;
        }
    }
    probs.len() - 1
}

/// `p_r = c_r |⟨B|U†(n_r) U(n)|A⟩|²`.
pub fn outcome_probabilities(
    state: &CoupledState,
    n: &Direction,
    povm: &PovmSpec,
) -> Result<Vec<f64>> {
    let m = Measurement::new(state, povm)?;
    let mut out = Vec::new();
    m.probabilities_into(n, &mut out);
    Ok(out)
}

/// Single-worker simulation; deterministic in `seed`.
pub fn simulate(
    state: &CoupledState,
    povm: &PovmSpec,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(domain!("need at least one trial"));
    }
    let m = Measurement::new(state, povm)?;
    Ok(SimReport::from_moments(m.run(trials, seed), seed, 1))
}

/// Parallel simulation: worker `i` runs its share of the trials with seed
/// `seed + i`. Returns the merged report and the per-worker reports.
pub fn simulate_parallel(
    state: &CoupledState,
    povm: &PovmSpec,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(SimReport, Vec<SimReport>)> {
    if trials == 0 {
        return Err(domain!("need at least one trial"));
    }
    let workers = workers.clamp(1, trials.min(usize::MAX as u64) as usize);
    let m = Measurement::new(state, povm)?;
    let base = trials / workers as u64;
    let extra = (trials % workers as u64) as usize;
    let parts: Vec<RunningMoments> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|i| {
                let share = base + u64::from(i < extra);
                let m = &m;
                scope.spawn(move || m.run(share, seed.wrapping_add(i as u64)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    let per_worker = parts
        .iter()
        .enumerate()
        .map(|(i, p)| SimReport::from_moments(*p, seed.wrapping_add(i as u64), 1))
        .collect();
    Ok((
        SimReport::from_moments(RunningMoments::merge(&parts), seed, workers),
        per_worker,
    ))
}

/// Worker count: `SPINDIR_THREADS` if set to a positive integer, otherwise 1.
/// Merged results depend on the count, so it never follows the host's core count.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(1)
}
