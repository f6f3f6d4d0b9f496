//! The self-similar profile `2 arctan(r/t)` of the unmodified co-rotational
//! wave-map equation.

use crate::error::{Error, Result};

/// `ψ_tt - ψ_rr - (2/r) ψ_r + sin 2ψ / r²` on `ψ = 2 arctan(r / t^k)`.
///
/// Only `k = 1` solves the equation; other exponents serve as negative
/// controls.
pub fn profile_residual(t: f64, r: f64, k: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Domain("t = 0 is the blow-up time".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let tk = t.abs().powf(k) * t.signum();
    let s = r / tk;
    let w = 1.0 + s * s;
    let d1 = 2.0 / w;
    let d2 = -4.0 * s / (w * w);
    let s_t = -k * s / t;
    let s_tt = k * (k + 1.0) * s / (t * t);
    let psi_tt = d2 * s_t * s_t + d1 * s_tt;
    let psi_r = d1 / tk;
    let psi_rr = d2 / (tk * tk);
    // sin(4 arctan s)
    let sin2psi = 4.0 * s * (1.0 - s * s) / (w * w);
    Ok(psi_tt - psi_rr - 2.0 / r * psi_r + sin2psi / (r * r))
}

/// Residual of the pure wave-map equation on `2 arctan(r/t)`.
pub fn wavemap_residual(t: f64, r: f64) -> Result<f64> {
    profile_residual(t, r, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_profile() {
        assert!(wavemap_residual(1.0, 1.0).unwrap().abs() < 1e-12);
        assert!(wavemap_residual(0.1, 0.37).unwrap().abs() < 1e-12);
        assert!(wavemap_residual(-0.3, 2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn wrong_exponent_fails() {
        assert!(profile_residual(1.0, 1.0, 2.0).unwrap().abs() > 0.1);
    }

    #[test]
    fn blowup_time_is_rejected() {
        assert!(matches!(wavemap_residual(0.0, 1.0), Err(Error::Domain(_))));
    }
}
