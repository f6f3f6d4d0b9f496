//! Stationary maps `Q_n`: shooting, energy minimization and property checks.

mod energy;
mod map;
mod minimize;
mod shooting;

use std::f64::consts::PI;

pub use energy::{gee, pohozaev_w, static_energy, StaticEnergy};
pub use map::{MapSummary, StationaryMap};
pub use minimize::{
    arctan_profile, minimize_static_energy, minimize_with, ramp_profile, Minimized,
    MinimizerOptions,
};
pub use shooting::{
    exterior_start, interior_start, shoot, solve_stationary, solve_with, Mismatch,
    ShootingParams, SolveOptions,
};

use crate::error::{Error, Result};
use crate::series::twist;

/// Right-hand side of the stationary equation in `x = log r`:
/// `φ'' = -φ' + sin 2φ + e^{-2x} (φ - sin φ cos φ)(1 - cos 2φ)`.
pub fn ode_rhs_log(phi: f64, dphi: f64, x: f64) -> f64 {
    let s = phi.sin();
    -dphi + (2.0 * phi).sin() + (-2.0 * x).exp() * twist(phi) * 2.0 * s * s
}

/// Largest radius at which the interior series is accepted.
pub fn interior_series_radius(beta: f64) -> f64 {
    if beta > 0.0 {
        1e-2 / beta
    } else {
        f64::INFINITY
    }
}

/// Smallest radius at which the exterior series is accepted.
pub fn exterior_series_radius(alpha: f64) -> f64 {
    10.0f64.max(10.0 * alpha.max(0.0).sqrt())
}

fn interior_series_unchecked(beta: f64, r: f64) -> (f64, f64) {
    let c = 2.0 / 15.0 * (beta.powi(5) - beta.powi(3));
    (beta * r + c * r * r * r, beta + 3.0 * c * r * r)
}

fn exterior_series_unchecked(alpha: f64, r: f64, n: u32) -> (f64, f64) {
    let npi = n as f64 * PI;
    let c = (2.0 / 3.0 * alpha.powi(3) + npi * alpha * alpha) / 14.0;
    let r2 = 1.0 / (r * r);
    let r6 = r2 * r2 * r2;
    (npi - alpha * r2 + c * r6, (2.0 * alpha * r2 - 6.0 * c * r6) / r)
}

/// `(φ, φ_r)` from `φ = βr + (2/15)(β⁵ - β³) r³`.
pub fn interior_series(beta: f64, r: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0) || r > interior_series_radius(beta) {
        return Err(Error::Domain(format!(
            "interior series used at r = {r}, valid up to {}",
            interior_series_radius(beta)
        )));
    }
    Ok(interior_series_unchecked(beta, r))
}

/// `(φ, φ_r)` from `φ = nπ - α r⁻² + (1/14)((2/3)α³ + nπα²) r⁻⁶`.
pub fn exterior_series(alpha: f64, r: f64, n: u32) -> Result<(f64, f64)> {
    if !(r >= exterior_series_radius(alpha)) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "exterior series used at r = {r}, valid from {}",
            exterior_series_radius(alpha)
        )));
    }
    Ok(exterior_series_unchecked(alpha, r, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_fixed_points() {
        for n in 0..4 {
            for &x in &[-3.0, 0.0, 2.5] {
                assert!(ode_rhs_log(n as f64 * PI, 0.0, x).abs() < 1e-14);
            }
        }
        assert!((ode_rhs_log(PI / 2.0, 0.0, 0.0) - PI).abs() < 1e-14);
    }

    #[test]
    fn interior_series_values() {
        let (p, _) = interior_series(1.0, 5e-3).unwrap();
        assert_eq!(p, 5e-3);
        assert_eq!(interior_series(0.0, 0.3).unwrap(), (0.0, 0.0));
        let (p, _) = interior_series(2.0, 1e-3).unwrap();
        assert!((p - (2e-3 + 3.2e-9)).abs() < 1e-20);
        assert!(interior_series(2.0, 0.1).is_err());
    }

    #[test]
    fn exterior_series_values() {
        assert_eq!(exterior_series(0.0, 10.0, 2).unwrap(), (2.0 * PI, 0.0));
        let (p, dp) = exterior_series(1.0, 10.0, 1).unwrap();
        assert!((p - (PI - 0.01 + (2.0 / 3.0 + PI) / 14.0 * 1e-6)).abs() < 1e-15);
        let h = 1e-4;
        let fd = (exterior_series(1.0, 10.0 + 2.0 * h, 1).unwrap().0
            - exterior_series(1.0, 10.0, 1).unwrap().0)
            / (2.0 * h);
        let dp_mid = exterior_series(1.0, 10.0 + h, 1).unwrap().1;
        assert!((dp_mid - fd).abs() < 1e-10);
        assert!(dp > dp_mid);
        assert!(exterior_series(4.0, 15.0, 1).is_err());
    }

    #[test]
    fn series_agree_with_integration() {
        // integrate inward from a larger radius and compare with the series at r = 10
        use crate::ode::Dopri5;
        let (alpha, n) = (1.0, 1);
        let (p0, d0) = exterior_series(alpha, 200.0, n).unwrap();
        let sol = Dopri5::with_tolerances(1e-13, 1e-15)
            .integrate(
                |x, y, dy| {
                    dy[0] = y[1];
                    dy[1] = ode_rhs_log(y[0], y[1], x);
                },
                200f64.ln(),
                &[p0, 200.0 * d0],
                10f64.ln(),
                |_, _| false,
                false,
            )
            .unwrap();
        let (p, _) = exterior_series(alpha, 10.0, n).unwrap();
        assert!((sol.y[0] - p).abs() < 1e-9, "{}", sol.y[0] - p);

        let beta = 2.0;
        let (p0, d0) = interior_series(beta, 1e-6).unwrap();
        let sol = Dopri5::with_tolerances(1e-13, 1e-20)
            .integrate(
                |x, y, dy| {
                    dy[0] = y[1];
                    dy[1] = ode_rhs_log(y[0], y[1], x);
                },
                1e-6f64.ln(),
                &[p0, 1e-6 * d0],
                1e-3f64.ln(),
                |_, _| false,
                false,
            )
            .unwrap();
        let (p, _) = interior_series(beta, 1e-3).unwrap();
        assert!(((sol.y[0] - p) / p).abs() < 1e-11);
    }
}
