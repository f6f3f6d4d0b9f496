use std::f64::consts::PI;

use serde::Serialize;

use super::map::StationaryMap;
use crate::error::Result;
use crate::radial::{differentiate, integrate_samples, Parity, RadialField, Spacing};
use crate::series::twist;

/// `G(ρ) = ½(ρ² - sin² ρ)`, the primitive of `θ - sin θ cos θ`.
pub fn gee(rho: f64) -> f64 {
    let s = rho.sin();
    0.5 * (rho * rho - s * s)
}

/// Static energy and how far the profile's ends are from `0` and `nπ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticEnergy {
    pub value: f64,
    pub boundary_gap: f64,
}

/// `½[φ_r² r² + 2 sin²φ + (φ - sin φ cos φ)²/r²]`, the integrand of `J` in `dr`.
fn density(r: f64, phi: f64, phi_r: f64) -> f64 {
    let s = phi.sin();
    let t = twist(phi);
    let last = if r > 0.0 { t * t / (r * r) } else { 0.0 };
    0.5 * (phi_r * phi_r * r * r + 2.0 * s * s + last)
}

/// Series estimate of the energy outside `[r_min, r_max]`.
fn tails(r_min: f64, phi_min: f64, r_max: f64, phi_max: f64) -> f64 {
    let inner = if r_min > 0.0 {
        let beta = phi_min / r_min;
        0.5 * beta * beta * r_min.powi(3)
    } else {
        0.0
    };
    let limit = (phi_max / PI).round() * PI;
    let alpha = (limit - phi_max) * r_max * r_max;
    inner + limit * limit / (2.0 * r_max) + alpha * alpha / r_max.powi(3)
}

fn energy_from(field: &RadialField, phi_r: &[f64]) -> Result<f64> {
    let g = field.grid();
    let dens: Vec<f64> = g
        .nodes()
        .iter()
        .zip(field.values())
        .zip(phi_r)
        .map(|((&r, &p), &d)| density(r, p, d))
        .collect();
    let bulk = match g.spacing() {
        Spacing::Log { .. } => {
            let xs: Vec<f64> = g.nodes().iter().map(|r| r.ln()).collect();
            let w: Vec<f64> = dens.iter().zip(g.nodes()).map(|(d, r)| d * r).collect();
            integrate_samples(&xs, &w, 0, xs[0], xs[xs.len() - 1])?
        }
        Spacing::Uniform { .. } => integrate_samples(g.nodes(), &dens, 0, g.r_min(), g.r_max())?,
    };
    let v = field.values();
    Ok(bulk + tails(g.r_min(), v[0], g.r_max(), v[v.len() - 1]))
}

/// `J(φ) = ½∫[(φ')² + 2 sin²φ/r² + (φ - sin φ cos φ)²/r⁴] r² dr`.
///
/// The parts outside the grid come from the two series tails fitted to the
/// end values. The integral is computed whatever the end values are; the
/// distance from the degree-`n` boundary conditions is reported alongside.
pub fn static_energy(phi: &RadialField, n: u32) -> Result<StaticEnergy> {
    let d = differentiate(phi)?;
    let value = energy_from(phi, d.values())?;
    let v = phi.values();
    let gap = v[0].abs().max((v[v.len() - 1] - n as f64 * PI).abs());
    Ok(StaticEnergy { value, boundary_gap: gap })
}

pub(crate) fn map_energy(map: &StationaryMap) -> Result<f64> {
    energy_from(map.q(), map.q_r().values())
}

fn pohozaev_values(r: f64, phi: f64, phi_r: f64) -> f64 {
    let s = phi.sin();
    let t = twist(phi);
    r.powi(4) * phi_r * phi_r - 2.0 * r * r * s * s - t * t
}

/// `W = r⁴ φ_r² - 2r² sin²φ - (φ - sin φ cos φ)²` with a finite-difference `φ_r`.
pub fn pohozaev_w(phi: &RadialField) -> Result<RadialField> {
    let d = differentiate(phi)?;
    let values = phi
        .grid()
        .nodes()
        .iter()
        .zip(phi.values())
        .zip(d.values())
        .map(|((&r, &p), &dp)| pohozaev_values(r, p, dp))
        .collect();
    RadialField::new(phi.grid().clone(), values, Parity::None)
}

impl StationaryMap {
    /// `W(r)` from the stored `Q` and `Q_r`.
    pub fn pohozaev(&self) -> RadialField {
        let values = self
            .grid()
            .nodes()
            .iter()
            .zip(self.q.values())
            .zip(self.q_r.values())
            .map(|((&r, &p), &dp)| pohozaev_values(r, p, dp))
            .collect();
        RadialField::new(self.grid().clone(), values, Parity::None).expect("finite profile")
    }
}
