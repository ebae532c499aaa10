use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::Direction;

/// Product rule on the sphere normalized so that `∫ dn 1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereQuadrature {
    max_degree: usize,
    nodes: Vec<(Direction, f64)>,
}

impl SphereQuadrature {
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn nodes(&self) -> &[(Direction, f64)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&Direction) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|(n, w)| w * f(n)).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            deriv = dp;
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        if dp.is_finite() {
            deriv = dp;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * deriv * deriv)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Legendre in `cos θ` of order `⌈(d+1)/2⌉` times `d+1` equally spaced
/// azimuths; exact for spherical polynomials of degree `≤ d`.
pub fn sphere_quadrature(max_degree: usize) -> SphereQuadrature {
    let max_degree = max_degree.max(1);
    let order = (max_degree + 2) / 2;
    let n_phi = max_degree + 1;
    let mut nodes = Vec::with_capacity(order * n_phi);
    for (x, w) in gauss_legendre(order) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for k in 0..n_phi {
            let phi = TAU * k as f64 / n_phi as f64;
            let dir = Direction::new(theta, phi).expect("node inside the sphere");
            nodes.push((dir, 0.5 * w / n_phi as f64));
        }
    }
    SphereQuadrature { max_degree, nodes }
}
