//! Conversions between the 3d angle `ψ` and the 5d perturbation `u`, and the
//! energies monitored along a run.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radial::{differentiate, integrate_samples, PairState, Parity, RadialField};
use crate::series::twist;
use crate::stationary::StationaryMap;

fn q_on(grid_nodes: &[f64], map: &StationaryMap) -> Vec<f64> {
    grid_nodes.iter().map(|&r| if r == 0.0 { 0.0 } else { map.eval(r).0 }).collect()
}

/// `ψ = Q + r u`, `ψ_t = r u_t`.
pub fn psi_from_u(state: &PairState, map: &StationaryMap) -> Result<PairState> {
    let g = state.grid();
    let q = q_on(g.nodes(), map);
    let psi: Vec<f64> =
        g.nodes().iter().zip(&q).zip(state.u.values()).map(|((r, q), u)| q + r * u).collect();
    let psi_t: Vec<f64> = g.nodes().iter().zip(state.ut.values()).map(|(r, v)| r * v).collect();
    PairState::new(
        RadialField::new(g.clone(), psi, Parity::Odd)?,
        RadialField::new(g.clone(), psi_t, Parity::Odd)?,
        state.t,
    )
}

/// `(ψ - Q)/r` at `r > 0`; at an origin node the quotient is extrapolated
/// from the next four nodes as an even polynomial (error `O(h⁸)`).
fn divide_by_r(nodes: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = nodes.iter().zip(f).map(|(r, v)| if *r > 0.0 { v / r } else { 0.0 }).collect();
    if nodes[0] == 0.0 {
        if nodes.len() < 5 {
            return Err(Error::InvalidInput("need at least 5 nodes".into()));
        }
        out[0] = 1.6 * out[1] - 0.8 * out[2] + 8.0 / 35.0 * out[3] - out[4] / 35.0;
    }
    Ok(out)
}

/// Inverse of [`psi_from_u`].
pub fn u_from_psi(psi: &PairState, map: &StationaryMap) -> Result<PairState> {
    let g = psi.grid();
    let q = q_on(g.nodes(), map);
    let diff: Vec<f64> = psi.u.values().iter().zip(&q).map(|(p, q)| p - q).collect();
    let u = divide_by_r(g.nodes(), &diff)?;
    let ut = divide_by_r(g.nodes(), psi.ut.values())?;
    PairState::new(
        RadialField::new(g.clone(), u, Parity::Even)?,
        RadialField::new(g.clone(), ut, Parity::Even)?,
        psi.t,
    )
}

/// `E(ψ) = ½∫(ψ_t² + ψ_r² + 2 sin²ψ/r² + (ψ - sin ψ cos ψ)²/r⁴) r² dr`.
///
/// Beyond the grid `ψ` is taken to follow `Lπ - α̂ r⁻²`, with `L` and `α̂`
/// read off the last node, which adds `L²π²/(2R) + α̂²/R³`.
pub fn conserved_energy(psi: &PairState) -> Result<f64> {
    let g = psi.grid();
    let psi_r = differentiate(&psi.u)?;
    let dens: Vec<f64> = g
        .nodes()
        .iter()
        .zip(psi.u.values())
        .zip(psi_r.values())
        .zip(psi.ut.values())
        .map(|(((&r, &p), &pr), &pt)| {
            let s = p.sin();
            let tw = twist(p);
            let last = if r > 0.0 { tw * tw / (r * r) } else { 0.0 };
            0.5 * ((pt * pt + pr * pr) * r * r + 2.0 * s * s + last)
        })
        .collect();
    let bulk = integrate_samples(g.nodes(), &dens, 0, g.r_min(), g.r_max())?;
    let r = g.r_max();
    let end = *psi.u.values().last().unwrap();
    let limit = (end / PI).round() * PI;
    let alpha = (limit - end) * r * r;
    Ok(bulk + limit * limit / (2.0 * r) + alpha * alpha / r.powi(3))
}

/// `½∫(u_t² + u_r²) r⁴ dr` over `[a, b]`.
pub fn free_energy_between(state: &PairState, a: f64, b: f64) -> Result<f64> {
    let g = state.grid();
    let ur = differentiate(&state.u)?;
    let dens: Vec<f64> =
        ur.values().iter().zip(state.ut.values()).map(|(x, y)| 0.5 * (x * x + y * y)).collect();
    integrate_samples(g.nodes(), &dens, 4, a, b)
}

/// Energy of the free 5d wave equation over the whole grid.
pub fn free_energy(state: &PairState) -> Result<f64> {
    let g = state.grid();
    free_energy_between(state, g.r_min(), g.r_max())
}

/// `∫_{r ≤ A}(u_t² + u_r²) r⁴ dr`.
pub fn local_energy(state: &PairState, radius: f64) -> Result<f64> {
    let g = state.grid();
    Ok(2.0 * free_energy_between(state, g.r_min(), radius.min(g.r_max()))?)
}

/// `(‖(ψ - Q, ψ_t)‖_{Ḣ¹×L²(R³)}, ‖(u, u_t)‖_{Ḣ¹×L²(R⁵)})`.
///
/// Hardy's inequality in `R⁵` puts the ratio of the two in `[1/3, 1]`.
pub fn isomorphism_norms(state: &PairState, map: &StationaryMap) -> Result<(f64, f64)> {
    let g = state.grid();
    let psi = psi_from_u(state, map)?;
    let q = q_on(g.nodes(), map);
    let w: Vec<f64> = psi.u.values().iter().zip(&q).map(|(p, q)| p - q).collect();
    let w = RadialField::new(g.clone(), w, Parity::Odd)?;
    let wr = differentiate(&w)?;
    let d3: Vec<f64> =
        wr.values().iter().zip(psi.ut.values()).map(|(a, b)| a * a + b * b).collect();
    let n3 = integrate_samples(g.nodes(), &d3, 2, g.r_min(), g.r_max())?.sqrt();
    let n5 = (2.0 * free_energy(state)?).sqrt();
    Ok((n3, n5))
}
