//! Exterior energies outside light cones, the projection onto the plane
//! `P(a) = {(c₁ r⁻³, c₂ r⁻³)}` in `Ḣ¹ × L²(r > a)` and the rescaled
//! quantities `v₀ = r³u`, `v₁ = r∫_r^∞ u_t ρ dρ`.
//!
//! Integrals to infinity are cut at the grid edge and completed with the
//! `r⁻³` tail read off the last node. That tail is exact for the `P(a)`
//! family and zero for compactly supported data.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve, Coupling, EvolutionConfig};
use crate::exec::Execution;
use crate::radial::{
    cumulative_from_right, differentiate, integrate_samples, PairState, Parity, RadialField, RadialGrid,
};

/// Ratios below this norm are reported as degenerate.
pub const DEGENERATE_NORM: f64 = 1e-14;

fn tail_coefficient(f: &RadialField) -> f64 {
    let r = f.grid().r_max();
    f.values().last().copied().unwrap_or(0.0) * r.powi(3)
}

/// `∫_{a+|t|}^∞ (u_t² + u_r²) r⁴ dr`.
pub fn exterior_energy(state: &PairState, a: f64) -> Result<f64> {
    let g = state.grid();
    let lo = a + state.t.abs();
    if !(lo >= g.r_min() && lo < g.r_max()) {
        return Err(Error::Domain(format!(
            "cone radius {lo} is outside the grid [{}, {}]",
            g.r_min(),
            g.r_max()
        )));
    }
    let ur = differentiate(&state.u)?;
    let dens: Vec<f64> =
        ur.values().iter().zip(state.ut.values()).map(|(x, y)| x * x + y * y).collect();
    let bulk = integrate_samples(g.nodes(), &dens, 4, lo, g.r_max())?;
    let (c, d) = (tail_coefficient(&state.u), tail_coefficient(&state.ut));
    let r = g.r_max();
    Ok(bulk + 3.0 * c * c / r.powi(3) + d * d / r)
}

/// The split of `(f, g)` restricted to `r > a` into its `P(a)` part and the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionDecomposition {
    pub a: f64,
    /// `a³ f(a)`.
    pub c1: f64,
    /// `a ∫_a^∞ g ρ dρ`.
    pub c2: f64,
    /// `‖π_a(f, g)‖² = 3a³f(a)² + a(∫_a^∞ g ρ dρ)²`.
    pub pi_norm_sq: f64,
    /// `‖π_a^⊥(f, g)‖²` by direct quadrature of the remainder.
    pub perp_norm_sq: f64,
    /// `‖(f, g)‖²_{Ḣ¹×L²(r>a)}`.
    pub total_norm_sq: f64,
}

impl ProjectionDecomposition {
    /// `|total - (‖π‖² + ‖π^⊥‖²)| / total`.
    pub fn pythagoras_error(&self) -> f64 {
        let gap = (self.total_norm_sq - self.pi_norm_sq - self.perp_norm_sq).abs();
        if self.total_norm_sq > 0.0 {
            gap / self.total_norm_sq
        } else {
            gap
        }
    }
}

fn h1_l2_exterior(f: &[f64], g: &[f64], grid: &Arc<RadialGrid>, a: f64, parity: Parity) -> Result<f64> {
    let ff = RadialField::new(grid.clone(), f.to_vec(), parity)?;
    let fr = differentiate(&ff)?;
    let dens: Vec<f64> = fr.values().iter().zip(g).map(|(x, y)| x * x + y * y).collect();
    let bulk = integrate_samples(grid.nodes(), &dens, 4, a, grid.r_max())?;
    let r = grid.r_max();
    let (c, d) = (f[f.len() - 1] * r.powi(3), g[g.len() - 1] * r.powi(3));
    Ok(bulk + 3.0 * c * c / r.powi(3) + d * d / r)
}

/// Projects `(f, g)` onto `P(a)` and its orthogonal complement.
pub fn project_pi_a(f: &RadialField, g: &RadialField, a: f64) -> Result<ProjectionDecomposition> {
    if !f.shares_grid(g) {
        return Err(Error::InvalidInput("f and g live on different grids".into()));
    }
    let grid = f.grid();
    if !(a > 0.0 && a > grid.r_min() && a < grid.r_max()) {
        return Err(Error::Domain(format!("a = {a} is not interior to the grid")));
    }
    let fa = f.interpolate(a);
    let r_end = grid.r_max();
    let moment = integrate_samples(grid.nodes(), g.values(), 1, a, r_end)? + tail_coefficient(g) / r_end;
    let c1 = a.powi(3) * fa;
    let c2 = a * moment;
    let pi_norm_sq = 3.0 * a.powi(3) * fa * fa + a * moment * moment;
    let rest_f: Vec<f64> =
        grid.nodes().iter().zip(f.values()).map(|(&r, &v)| v - c1 * newton(r)).collect();
    let rest_g: Vec<f64> =
        grid.nodes().iter().zip(g.values()).map(|(&r, &v)| v - c2 * newton(r)).collect();
    let perp_norm_sq = h1_l2_exterior(&rest_f, &rest_g, grid, a, Parity::None)?;
    let total_norm_sq = h1_l2_exterior(f.values(), g.values(), grid, a, f.parity())?;
    Ok(ProjectionDecomposition { a, c1, c2, pi_norm_sq, perp_norm_sq, total_norm_sq })
}

/// `r⁻³`, cut off as `0` at the origin where it is never used.
fn newton(r: f64) -> f64 {
    if r > 0.0 {
        r.powi(-3)
    } else {
        0.0
    }
}

/// `v₀ = r³ u` and `v₁ = r ∫_r^∞ u_t ρ dρ`.
pub fn v0_v1(state: &PairState) -> Result<(RadialField, RadialField)> {
    let g = state.grid();
    let r = g.nodes();
    let v0: Vec<f64> = r.iter().zip(state.u.values()).map(|(r, u)| r.powi(3) * u).collect();
    let cum = cumulative_from_right(r, state.ut.values(), 1);
    let tail = tail_coefficient(&state.ut) / g.r_max();
    let v1: Vec<f64> = r.iter().zip(&cum).map(|(r, c)| r * (c + tail)).collect();
    Ok((
        RadialField::new(g.clone(), v0, Parity::None)?,
        RadialField::new(g.clone(), v1, Parity::None)?,
    ))
}

/// One row of the exterior-energy history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSample {
    pub t: f64,
    /// Exterior energy of the forward evolution at `t`.
    pub forward: f64,
    /// Exterior energy of the backward evolution at `-t`.
    pub backward: f64,
}

/// Outcome of [`channel_experiment`].
#[derive(Debug, Clone)]
pub struct ChannelRun {
    pub decomposition: ProjectionDecomposition,
    /// `max_± E_ext(±T) / ‖π_a^⊥‖²`; `None` when the denominator is degenerate.
    pub ratio: Option<f64>,
    pub series: Vec<ChannelSample>,
    pub forward: PairState,
    /// Solution at `-T`, stored with `t = -T`.
    pub backward: PairState,
}

impl ChannelRun {
    pub fn degenerate(&self) -> bool {
        self.ratio.is_none()
    }
}

/// Free evolution of `data` to `±T` with exterior energies outside `r = a + |t|`.
pub fn channel_experiment(data: &PairState, a: f64, t_final: f64, exec: Execution) -> Result<ChannelRun> {
    let grid = data.grid();
    if !(t_final > 0.0) {
        return Err(Error::InvalidInput(format!("T = {t_final} must be positive")));
    }
    if a + t_final >= grid.r_max() {
        return Err(Error::Domain(format!(
            "the cone r = a + T = {} leaves the grid (r_max = {})",
            a + t_final,
            grid.r_max()
        )));
    }
    let decomposition = project_pi_a(&data.u, &data.ut, a)?;
    let mut config = EvolutionConfig::new(Coupling::Free, t_final);
    config.snapshot_every = Some(1);
    config.execution = exec;
    config.energy_guard = f64::INFINITY;
    let start = PairState::new(data.u.clone(), data.ut.clone(), 0.0)?;
    let fwd = evolve(&start, &config)?;
    let reversed = PairState::new(data.u.clone(), data.ut.scaled(-1.0), 0.0)?;
    let bwd = evolve(&reversed, &config)?;
    let mut series = Vec::with_capacity(fwd.snapshots.len());
    for (f, b) in fwd.snapshots.iter().zip(&bwd.snapshots) {
        series.push(ChannelSample { t: f.t, forward: exterior_energy(f, a)?, backward: exterior_energy(b, a)? });
    }
    let last = series.last().copied().expect("at least the initial sample");
    let ratio = (decomposition.perp_norm_sq >= DEGENERATE_NORM)
        .then(|| last.forward.max(last.backward) / decomposition.perp_norm_sq);
    let mut backward = bwd.state;
    backward.ut = backward.ut.scaled(-1.0);
    backward.t = -backward.t;
    Ok(ChannelRun { decomposition, ratio, series, forward: fwd.state, backward })
}

/// Parameters of the random-data ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleOptions {
    pub a: f64,
    pub t_final: f64,
    pub members: usize,
    pub seed: u64,
    /// Grid step of the evolutions.
    pub h: f64,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self { a: 2.0, t_final: 6.0, members: 50, seed: 0x5eed, h: 0.01 }
    }
}

/// Statistics of the empirical channel ratios.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub options: EnsembleOptions,
    pub ratios: Vec<f64>,
    pub min: f64,
    pub p5: f64,
    pub median: f64,
    pub max: f64,
    pub max_pythagoras_error: f64,
    pub degenerate: usize,
}

/// `exp(-1/(1 - s²))` on `|s| < 1`.
pub fn smooth_bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Random smooth data supported in `[a, 2a]`, drawn from `rng`.
pub fn random_bump_data<R: Rng>(grid: &Arc<RadialGrid>, a: f64, rng: &mut R) -> Result<PairState> {
    let piece = |rng: &mut R| {
        let w = rng.gen_range(0.1..0.5) * a;
        let c = rng.gen_range(a + w..2.0 * a - w);
        let amp = rng.gen_range(-1.0..1.0) * a.powi(-3);
        move |r: f64| amp * smooth_bump((r - c) / w)
    };
    let (f1, f2, g1) = (piece(rng), piece(rng), piece(rng));
    let gscale = rng.gen_range(0.0..2.0);
    let u = RadialField::from_fn(grid.clone(), Parity::Even, |r| f1(r) + f2(r))?;
    let ut = RadialField::from_fn(grid.clone(), Parity::Even, |r| gscale * g1(r))?;
    PairState::new(u, ut, 0.0)
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let x = p * (sorted.len() - 1) as f64;
    let i = x.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (x - i as f64) * (sorted[j] - sorted[i])
}

/// Channel ratios over `members` random bumps in `[a, 2a]`, run in parallel.
pub fn channel_ensemble(opts: &EnsembleOptions, exec: Execution) -> Result<EnsembleReport> {
    let r_max = 2.0 * opts.a + opts.t_final + 2.0;
    let grid = Arc::new(RadialGrid::with_origin_step(r_max, opts.h)?);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let data: Vec<PairState> =
        (0..opts.members).map(|_| random_bump_data(&grid, opts.a, &mut rng)).collect::<Result<_>>()?;
    let runs = exec.map(data.len(), |k| channel_experiment(&data[k], opts.a, opts.t_final, Execution::Sequential));
    let mut ratios = Vec::new();
    let mut degenerate = 0;
    let mut max_pythagoras_error = 0.0f64;
    for run in runs {
        let run = run?;
        max_pythagoras_error = max_pythagoras_error.max(run.decomposition.pythagoras_error());
        match run.ratio {
            Some(r) => ratios.push(r),
            None => degenerate += 1,
        }
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(EnsembleReport {
        options: *opts,
        min: sorted.first().copied().unwrap_or(f64::NAN),
        p5: percentile(&sorted, 0.05),
        median: percentile(&sorted, 0.5),
        max: sorted.last().copied().unwrap_or(f64::NAN),
        ratios,
        max_pythagoras_error,
        degenerate,
    })
}

/// `χ(r) r⁻³` with a smooth switch `χ` from `0` on `r ≤ a/2` to `1` on `r ≥ a`.
pub fn newton_family(grid: &Arc<RadialGrid>, a: f64) -> Result<RadialField> {
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    RadialField::from_fn(grid.clone(), Parity::Even, |r| {
        let s = (2.0 * r / a - 1.0).clamp(0.0, 1.0);
        let chi = f(s) / (f(s) + f(1.0 - s));
        if r > 0.0 {
            chi * r.powi(-3)
        } else {
            0.0
        }
    })
}
