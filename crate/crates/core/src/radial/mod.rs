//! Radial grids, fields and the discrete calculus built on them.

mod calculus;
mod grid;
mod norms;
mod quadrature;

pub use calculus::{d1_uniform, d2_uniform, differentiate, radial_laplacian};
pub use grid::{PairState, Parity, RadialField, RadialGrid, Spacing};
pub use norms::{sobolev_norms, wkp_norm, SobolevNorms};
pub use quadrature::{cumulative_from_right, integrate_samples, weighted_integral};
