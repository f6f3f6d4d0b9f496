//! Method-of-lines evolution of the radial 5d equation
//! `u_tt - u_rr - (4/r) u_r + V u + Z(r, u) = 0` and of the free wave equation.
//!
//! Space is discretized on a uniform grid with a node at the origin and an
//! even ghost extension, time by classical RK4. The last two nodes are never
//! accelerated (`u_tt = 0` there); with the default padding boundary the grid
//! is large enough that nothing from the diagnostics region reaches them.

mod energy;
mod nonlinearity;
mod wavemap;

use std::sync::Arc;

use serde::Serialize;

pub use energy::{
    conserved_energy, free_energy, free_energy_between, isomorphism_norms, local_energy,
    psi_from_u, u_from_psi,
};
pub use nonlinearity::{nonlinearity_terms, nonlinearity_z};
pub use wavemap::{profile_residual, wavemap_residual};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::radial::{
    sobolev_norms, wkp_norm, PairState, Parity, RadialField, RadialGrid, Spacing,
};
use crate::stationary::StationaryMap;
use nonlinearity::{sample_coupling, ZCoeffs};

/// Largest admissible `dt / h`.
pub const CFL_MAX: f64 = 0.5;

/// The two Strichartz exponents of the `S` norm.
pub const S_EXPONENTS: [f64; 2] = [30.0 / 7.0, 50.0 / 13.0];

/// Which equation is evolved.
#[derive(Debug, Clone)]
pub enum Coupling {
    /// `u_tt = Δ₅ u`.
    Free,
    /// The reduced equation around a stationary map.
    AdkinsNappi(Arc<StationaryMap>),
}

/// Treatment of the outer edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// The grid extends past `diagnostic_radius + t_final`.
    Padding,
    /// Quadratic damping `σ(r) u_t` over the outer `width`.
    Sponge { width: f64, strength: f64 },
}

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub t_final: f64,
    /// `dt / h`.
    pub cfl: f64,
    pub coupling: Coupling,
    pub boundary: Boundary,
    /// Steps between diagnostic samples, at most 10.
    pub sample_every: usize,
    /// Radius `A` of the local energy `∫_{r≤A}(u_t² + u_r²) r⁴ dr`.
    pub local_radius: f64,
    /// Radius whose causal future must stay inside the grid under padding.
    pub diagnostic_radius: f64,
    /// Abort once the monitored energy moves by this fraction.
    pub energy_guard: f64,
    /// Keep a copy of the state every this many samples.
    pub snapshot_every: Option<usize>,
    pub execution: Execution,
}

impl EvolutionConfig {
    pub fn new(coupling: Coupling, t_final: f64) -> Self {
        Self {
            t_final,
            cfl: CFL_MAX,
            coupling,
            boundary: Boundary::Padding,
            sample_every: 10,
            local_radius: 2.0,
            diagnostic_radius: 0.0,
            energy_guard: 0.1,
            snapshot_every: None,
            execution: Execution::default(),
        }
    }

    fn validate(&self, grid: &RadialGrid) -> Result<f64> {
        let h = match grid.spacing() {
            Spacing::Uniform { h } if grid.has_origin() => h,
            _ => return Err(Error::InvalidInput("evolution needs a uniform grid with an origin node".into())),
        };
        if grid.len() < 8 {
            return Err(Error::InvalidInput("evolution grid needs at least 8 nodes".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= CFL_MAX) {
            return Err(Error::InvalidInput(format!("cfl = {} outside (0, {CFL_MAX}]", self.cfl)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidInput(format!("t_final = {} is not a finite time", self.t_final)));
        }
        if !(1..=10).contains(&self.sample_every) {
            return Err(Error::InvalidInput("sample_every must be in 1..=10".into()));
        }
        if self.boundary == Boundary::Padding && grid.r_max() < self.diagnostic_radius + self.t_final {
            return Err(Error::InvalidInput(format!(
                "padding needs r_max >= {} but the grid ends at {}",
                self.diagnostic_radius + self.t_final,
                grid.r_max()
            )));
        }
        Ok(h)
    }
}

/// Time series recorded along a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DiagnosticSeries {
    pub times: Vec<f64>,
    /// `E(ψ)` for the coupled equation, the free 5d energy otherwise.
    pub energy: Vec<f64>,
    pub h_norm: Vec<f64>,
    pub local_energy: Vec<f64>,
    /// `‖u(t)‖³_{W^{1,30/7}}`.
    pub s3: Vec<f64>,
    /// `‖u(t)‖⁵_{W^{1,50/13}}`.
    pub s5: Vec<f64>,
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

impl DiagnosticSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|E(t)/E(0) - 1|`; absolute drift when `E(0) = 0`.
    pub fn energy_drift(&self) -> f64 {
        let Some(&e0) = self.energy.first() else { return 0.0 };
        let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        self.energy.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }

    pub fn max_h_norm(&self) -> f64 {
        self.h_norm.iter().cloned().fold(0.0, f64::max)
    }

    /// The two pieces `(‖u‖_{L³W^{1,30/7}}, ‖u‖_{L⁵W^{1,50/13}})` over the sampled window.
    pub fn strichartz_pieces(&self) -> (f64, f64) {
        (trapezoid(&self.times, &self.s3).cbrt(), trapezoid(&self.times, &self.s5).powf(0.2))
    }

    /// `S` norm over the sampled window, the larger of the two pieces.
    pub fn strichartz_s(&self) -> f64 {
        let (a, b) = self.strichartz_pieces();
        a.max(b)
    }
}

/// `S` norm of a sampled trajectory `(t_k, u(t_k))`.
pub fn strichartz_s(trajectory: &[(f64, RadialField)]) -> Result<f64> {
    let times: Vec<f64> = trajectory.iter().map(|s| s.0).collect();
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sample times must increase".into()));
    }
    let mut s3 = Vec::with_capacity(times.len());
    let mut s5 = Vec::with_capacity(times.len());
    for (_, u) in trajectory {
        s3.push(wkp_norm(u, S_EXPONENTS[0])?.powi(3));
        s5.push(wkp_norm(u, S_EXPONENTS[1])?.powi(5));
    }
    Ok(trapezoid(&times, &s3).cbrt().max(trapezoid(&times, &s5).powf(0.2)))
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: DiagnosticSeries,
    pub state: PairState,
    pub snapshots: Vec<PairState>,
    pub steps: usize,
    pub dt: f64,
}

/// Spatial operator with everything that does not depend on `u` precomputed.
struct Operator {
    grid: Arc<RadialGrid>,
    h: f64,
    potential: Vec<f64>,
    z: Option<Vec<ZCoeffs>>,
    q: Option<Vec<f64>>,
    sponge: Vec<f64>,
    exec: Execution,
}

const CHUNK: usize = 2048;

impl Operator {
    fn new(grid: Arc<RadialGrid>, h: f64, config: &EvolutionConfig) -> Self {
        let nodes = grid.nodes();
        let (potential, z, q) = match &config.coupling {
            Coupling::Free => (vec![0.0; nodes.len()], None, None),
            Coupling::AdkinsNappi(map) => {
                let (v, z) = sample_coupling(map, nodes);
                let q = nodes.iter().map(|&r| if r == 0.0 { 0.0 } else { map.eval(r).0 }).collect();
                (v, Some(z), Some(q))
            }
        };
        let r_max = grid.r_max();
        let sponge = nodes
            .iter()
            .map(|&r| match config.boundary {
                Boundary::Sponge { width, strength } if r > r_max - width && width > 0.0 => {
                    strength * ((r - (r_max - width)) / width).powi(2)
                }
                _ => 0.0,
            })
            .collect();
        Self { grid, h, potential, z, q, sponge, exec: config.execution }
    }

    fn accel(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        let n = u.len();
        let r = self.grid.nodes();
        let c1 = 1.0 / (12.0 * self.h);
        let c2 = c1 / self.h;
        let at = |j: isize| u[j.unsigned_abs()];
        self.exec.for_chunks(out, CHUNK, |off, chunk| {
            for (k, o) in chunk.iter_mut().enumerate() {
                let i = off + k;
                if i + 2 >= n {
                    *o = 0.0;
                    continue;
                }
                let ii = i as isize;
                let (um2, um1, u0, up1, up2) = (at(ii - 2), at(ii - 1), u[i], u[i + 1], u[i + 2]);
                let urr = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) * c2;
                let lap = if i == 0 {
                    5.0 * urr
                } else {
                    urr + 4.0 / r[i] * (um2 - 8.0 * um1 + 8.0 * up1 - up2) * c1
                };
                let mut a = lap - self.potential[i] * u0 - self.sponge[i] * v[i];
                if let Some(z) = &self.z {
                    a -= z[i].eval(u0);
                }
                *o = a;
            }
        });
    }

    fn energy(&self, state: &PairState) -> Result<f64> {
        match &self.q {
            None => free_energy(state),
            Some(q) => {
                let r = self.grid.nodes();
                let psi: Vec<f64> =
                    r.iter().zip(q).zip(state.u.values()).map(|((r, q), u)| q + r * u).collect();
                let psi_t: Vec<f64> = r.iter().zip(state.ut.values()).map(|(r, v)| r * v).collect();
                conserved_energy(&PairState::new(
                    RadialField::new(self.grid.clone(), psi, Parity::Odd)?,
                    RadialField::new(self.grid.clone(), psi_t, Parity::Odd)?,
                    state.t,
                )?)
            }
        }
    }
}

fn field(grid: &Arc<RadialGrid>, values: Vec<f64>, t: f64) -> Result<RadialField> {
    RadialField::new(grid.clone(), values, Parity::Even)
        .map_err(|_| Error::Numerical { t, reason: "non-finite values in the state".into() })
}

/// `(u_t, Δ₅u - V u - Z(r, u))` as a state-shaped derivative.
pub fn rhs(state: &PairState, config: &EvolutionConfig) -> Result<PairState> {
    let h = config.validate(state.grid())?;
    let op = Operator::new(state.grid().clone(), h, config);
    let mut acc = vec![0.0; state.grid().len()];
    op.accel(state.u.values(), state.ut.values(), &mut acc);
    PairState::new(state.ut.clone(), field(state.grid(), acc, state.t)?, state.t)
}

fn sample(op: &Operator, s: &PairState, radius: f64, out: &mut DiagnosticSeries) -> Result<()> {
    out.times.push(s.t);
    out.energy.push(op.energy(s)?);
    out.h_norm.push(sobolev_norms(s)?.h_norm);
    out.local_energy.push(local_energy(s, radius)?);
    out.s3.push(wkp_norm(&s.u, S_EXPONENTS[0])?.powi(3));
    out.s5.push(wkp_norm(&s.u, S_EXPONENTS[1])?.powi(5));
    Ok(())
}

/// Advances `initial` to `t_final` with RK4 and records diagnostics.
pub fn evolve(initial: &PairState, config: &EvolutionConfig) -> Result<Evolution> {
    let grid = initial.grid().clone();
    let h = config.validate(&grid)?;
    if initial.u.parity() == Parity::Odd || initial.ut.parity() == Parity::Odd {
        return Err(Error::Parity("evolution needs even data".into()));
    }
    let op = Operator::new(grid.clone(), h, config);
    let steps = (config.t_final / (config.cfl * h)).ceil() as usize;
    let dt = if steps > 0 { config.t_final / steps as f64 } else { 0.0 };
    let n = grid.len();
    let t0 = initial.t;

    let mut u = initial.u.values().to_vec();
    let mut v = initial.ut.values().to_vec();
    let (mut ku, mut kv) = ([vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]], [
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    ]);
    let mut tu = vec![0.0; n];
    let mut tv = vec![0.0; n];

    let mut series = DiagnosticSeries::default();
    let mut snapshots = Vec::new();
    let current = |u: &[f64], v: &[f64], t: f64| -> Result<PairState> {
        PairState::new(field(&grid, u.to_vec(), t)?, field(&grid, v.to_vec(), t)?, t)
    };
    let first = current(&u, &v, t0)?;
    sample(&op, &first, config.local_radius, &mut series)?;
    if config.snapshot_every.is_some() {
        snapshots.push(first);
    }
    let e0 = series.energy[0];

    for step in 1..=steps {
        let t_prev = t0 + (step - 1) as f64 * dt;
        for stage in 0..4 {
            let c = match stage {
                0 => 0.0,
                3 => dt,
                _ => 0.5 * dt,
            };
            if stage == 0 {
                ku[0].copy_from_slice(&v);
                op.accel(&u, &v, &mut kv[0]);
            } else {
                for i in 0..n {
                    tu[i] = u[i] + c * ku[stage - 1][i];
                    tv[i] = v[i] + c * kv[stage - 1][i];
                }
                ku[stage].copy_from_slice(&tv);
                op.accel(&tu, &tv, &mut kv[stage]);
            }
        }
        let w = dt / 6.0;
        let mut finite = true;
        for i in 0..n {
            u[i] += w * (ku[0][i] + 2.0 * ku[1][i] + 2.0 * ku[2][i] + ku[3][i]);
            v[i] += w * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
            finite &= u[i].is_finite() && v[i].is_finite();
        }
        if !finite {
            return Err(Error::Numerical { t: t_prev, reason: "non-finite values in the state".into() });
        }
        if step % config.sample_every == 0 || step == steps {
            let t = t0 + step as f64 * dt;
            let s = current(&u, &v, t)?;
            sample(&op, &s, config.local_radius, &mut series)?;
            let e = *series.energy.last().unwrap();
            let scale = if e0 != 0.0 { e0.abs() } else { f64::MIN_POSITIVE };
            if (e - e0).abs() > config.energy_guard * scale {
                return Err(Error::Numerical {
                    t: series.times[series.len() - 2],
                    reason: format!("energy moved from {e0:.6e} to {e:.6e}"),
                });
            }
            if let Some(every) = config.snapshot_every {
                if (series.len() - 1) % every.max(1) == 0 {
                    snapshots.push(s);
                }
            }
        }
    }
    let state = current(&u, &v, t0 + steps as f64 * dt)?;
    Ok(Evolution { series, state, snapshots, steps, dt })
}

/// `u₀ = ε exp(-(r - r₀)²/σ²)`, `u₁ = 0`.
pub fn gaussian_perturbation(grid: Arc<RadialGrid>, eps: f64, r0: f64, sigma: f64) -> Result<PairState> {
    let u = RadialField::from_fn(grid.clone(), Parity::Even, |r| {
        eps * (-((r - r0) / sigma).powi(2)).exp()
    })?;
    PairState::new(u, RadialField::zeros(grid, Parity::Even), 0.0)
}

#[cfg(test)]
mod tests;
