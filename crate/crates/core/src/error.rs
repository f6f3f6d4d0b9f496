use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A shooting trajectory left the admissible band before reaching the matching point.
    #[error("{side} shot diverged at x = {x:.6} (phi = {phi:.6})")]
    Divergence { side: ShotSide, x: f64, phi: f64 },

    #[error("no bracketing intersection found in the (alpha, beta) search box ({scanned} shots scanned)")]
    NoBracket { scanned: usize, closest_gap: f64 },

    #[error("failed to converge: {0}")]
    Convergence(String),

    /// Non-finite values appeared in an evolution; `t` is the last good timestamp.
    #[error("numerical failure at t = {t}: {reason}")]
    Numerical { t: f64, reason: String },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("integrator failure: {0}")]
    Integrator(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ShotSide {
    Interior,
    Exterior,
}

impl std::fmt::Display for ShotSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShotSide::Interior => f.write_str("interior"),
            ShotSide::Exterior => f.write_str("exterior"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
