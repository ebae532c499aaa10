//! SU(2) substrate: half-integers, Clebsch–Gordan coefficients, rotation
//! matrices, and integration over directions.

mod blocks;
mod cg;
mod direction;
mod factorial;
mod halfint;
mod quadrature;
mod sampling;
pub mod wigner;

pub use blocks::BlockSpace;
pub use cg::cg_coefficient;
pub use direction::Direction;
pub use halfint::HalfInt;
pub use quadrature::{gauss_legendre, sphere_quadrature, SphereQuadrature};
pub use sampling::{haar_sample, seeded_rng, SimRng};
pub use wigner::{wigner_d, wigner_small_d, WignerBlock};
