//! Numerical laboratory for the co-rotational Adkins-Nappi model.
//!
//! The crate computes the stationary maps `Q_n`, studies the linearized
//! operator around them, evolves the reduced radial wave equation in five
//! dimensions and evaluates exterior-energy diagnostics for free waves.
//!
//! ```
//! use anmap::stationary::solve_stationary;
//!
//! let q = solve_stationary(1).unwrap();
//! assert!(q.alpha() > 0.0 && q.beta() > 0.0);
//! ```

pub mod channels;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod interp;
pub mod linearized;
pub mod ode;
pub mod radial;
pub mod series;
pub mod stationary;

pub use error::{Error, Result};
pub use exec::Execution;
pub use radial::{PairState, Parity, RadialField, RadialGrid, Spacing};
