//! Two-sided shooting in `x = log r` with a phase-plane bracket and damped Newton.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::map::StationaryMap;
use super::{exterior_series, interior_series, interior_series_unchecked, ode_rhs_log};
use crate::error::{Error, Result, ShotSide};
use crate::exec::Execution;
use crate::ode::{Dopri5, Solution};
use crate::radial::{Parity, RadialField, RadialGrid};

/// Free parameters of a two-sided shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingParams {
    pub alpha: f64,
    pub beta: f64,
    pub r_m: f64,
    pub n: u32,
}

impl ShootingParams {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, r_m: 1.0, n }
    }
}

/// Interior minus exterior state at the matching radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mismatch {
    pub dphi: f64,
    /// Difference of `r φ_r` (equal to `φ_r` at `r_m = 1`).
    pub dphi_x: f64,
}

impl Mismatch {
    pub fn norm(&self) -> f64 {
        self.dphi.abs().max(self.dphi_x.abs())
    }
}

/// Knobs for [`solve_with`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub scan_points: usize,
    pub search_box: (f64, f64),
    pub grid_r_min: f64,
    pub grid_r_max: f64,
    pub grid_dx: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Policy for the parameter scan.
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            scan_points: 61,
            search_box: (1e-3, 1e3),
            grid_r_min: 1e-4,
            grid_r_max: 1e4,
            grid_dx: 0.005,
            rtol: 1e-13,
            atol: 1e-14,
            execution: Execution::default(),
        }
    }
}

/// Radius where the interior shot starts.
pub fn interior_start(beta: f64) -> f64 {
    if beta > 1.0 {
        1e-3 / (beta * beta)
    } else {
        1e-3
    }
}

/// Radius where the exterior shot starts (the neglected series term is below 1e-14 there).
pub fn exterior_start(alpha: f64) -> f64 {
    30.0f64.max(30.0 * alpha.max(0.0).sqrt())
}

const BAND_SLACK: f64 = 1e-6;

fn rhs(x: f64, y: &[f64], dy: &mut [f64]) {
    dy[0] = y[1];
    dy[1] = ode_rhs_log(y[0], y[1], x);
}

struct Shooter {
    n: u32,
    x_m: f64,
    ode: Dopri5,
}

impl Shooter {
    fn new(n: u32, r_m: f64, opts: &SolveOptions) -> Self {
        Self { n, x_m: r_m.ln(), ode: Dopri5::with_tolerances(opts.rtol, opts.atol) }
    }

    fn band(&self) -> (f64, f64) {
        (-BAND_SLACK, self.n as f64 * PI + BAND_SLACK)
    }

    fn run(&self, side: ShotSide, x0: f64, y0: [f64; 2], dense: bool) -> Result<Solution> {
        let (lo, hi) = self.band();
        let blow = 10.0 * (self.n.max(1) as f64) * PI;
        let sol = self.ode.integrate(
            rhs,
            x0,
            &y0,
            self.x_m,
            |_, y| y[0] < lo || y[0] > hi || y[0].abs() > blow || !y[0].is_finite(),
            dense,
        )?;
        if sol.stopped {
            return Err(Error::Divergence { side, x: sol.x, phi: sol.y[0] });
        }
        Ok(sol)
    }

    fn interior(&self, beta: f64, dense: bool) -> Result<Solution> {
        let r0 = interior_start(beta).min(0.5 * self.x_m.exp());
        let (p, dp) = interior_series(beta, r0)?;
        self.run(ShotSide::Interior, r0.ln(), [p, r0 * dp], dense)
    }

    fn exterior(&self, alpha: f64, dense: bool) -> Result<Solution> {
        let r0 = exterior_start(alpha).max(2.0 * self.x_m.exp());
        let (p, dp) = exterior_series(alpha, r0, self.n)?;
        self.run(ShotSide::Exterior, r0.ln(), [p, r0 * dp], dense)
    }

    fn mismatch(&self, alpha: f64, beta: f64) -> Result<Mismatch> {
        let a = self.interior(beta, false)?;
        let b = self.exterior(alpha, false)?;
        Ok(Mismatch { dphi: a.y[0] - b.y[0], dphi_x: a.y[1] - b.y[1] })
    }
}

/// Integrates from both ends and returns the mismatch at `r_m`.
pub fn shoot(params: &ShootingParams) -> Result<Mismatch> {
    if !(params.r_m > 0.0) || params.alpha < 0.0 || params.beta < 0.0 {
        return Err(Error::InvalidInput(format!("bad shooting parameters {params:?}")));
    }
    Shooter::new(params.n, params.r_m, &SolveOptions::default()).mismatch(params.alpha, params.beta)
}

/// Solves for `Q_n` with default options.
pub fn solve_stationary(n: u32) -> Result<StationaryMap> {
    solve_with(n, &SolveOptions::default())
}

fn log_scan(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..k).map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp()).collect()
}

/// Phase-plane endpoints of the shots over a parameter scan (`None` where a shot diverged).
fn scan_curve(
    exec: Execution,
    f: impl Fn(f64) -> Result<Solution> + Sync,
    params: &[f64],
) -> Vec<Option<[f64; 2]>> {
    exec.map(params.len(), |i| f(params[i]).ok().map(|s| [s.y[0], s.y[1]]))
}

fn segment_hit(p: [f64; 2], p2: [f64; 2], q: [f64; 2], q2: [f64; 2]) -> Option<(f64, f64)> {
    let d1 = [p2[0] - p[0], p2[1] - p[1]];
    let d2 = [q2[0] - q[0], q2[1] - q[1]];
    let den = d1[0] * d2[1] - d1[1] * d2[0];
    if den == 0.0 {
        return None;
    }
    let w = [q[0] - p[0], q[1] - p[1]];
    let s = (w[0] * d2[1] - w[1] * d2[0]) / den;
    let t = (w[0] * d1[1] - w[1] * d1[0]) / den;
    ((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t)).then_some((s, t))
}

/// Solves for `Q_n`.
pub fn solve_with(n: u32, opts: &SolveOptions) -> Result<StationaryMap> {
    let grid = Arc::new(log_grid(opts)?);
    if n == 0 {
        return Ok(StationaryMap::zero(grid));
    }
    let sh = Shooter::new(n, 1.0, opts);
    let betas = log_scan(opts.search_box.0, opts.search_box.1, opts.scan_points);
    let alphas = log_scan(opts.search_box.0, opts.search_box.1, opts.scan_points);
    let inner = scan_curve(opts.execution, |b| sh.interior(b, false), &betas);
    let outer = scan_curve(opts.execution, |a| sh.exterior(a, false), &alphas);

    let mut starts = Vec::new();
    let mut closest = f64::INFINITY;
    for i in 0..betas.len() - 1 {
        let (Some(p), Some(p2)) = (inner[i], inner[i + 1]) else { continue };
        for j in 0..alphas.len() - 1 {
            let (Some(q), Some(q2)) = (outer[j], outer[j + 1]) else { continue };
            closest = closest.min(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            if let Some((s, t)) = segment_hit(p, p2, q, q2) {
                let lb = betas[i].ln() + s * (betas[i + 1].ln() - betas[i].ln());
                let la = alphas[j].ln() + t * (alphas[j + 1].ln() - alphas[j].ln());
                starts.push((la, lb));
            }
        }
    }
    if starts.is_empty() {
        return Err(Error::NoBracket { scanned: betas.len() + alphas.len(), closest_gap: closest });
    }

    let mut best: Option<(f64, f64, Mismatch)> = None;
    let mut last_err = None;
    for &(la, lb) in &starts {
        match newton(&sh, la, lb, opts.tol) {
            Ok((a, b, m)) => {
                if best.is_none_or(|(_, _, bm)| m.norm() < bm.norm()) {
                    best = Some((a, b, m));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (alpha, beta, m) = match best {
        Some(b) => b,
        None => return Err(last_err.unwrap_or(Error::Convergence("Newton failed".into()))),
    };
    if m.norm() >= opts.tol {
        return Err(Error::Convergence(format!(
            "shooting mismatch {:.3e} above tolerance {:.1e}",
            m.norm(),
            opts.tol
        )));
    }
    assemble(&sh, grid, alpha, beta, m)
}

fn log_grid(opts: &SolveOptions) -> Result<RadialGrid> {
    let span = (opts.grid_r_max / opts.grid_r_min).ln();
    let intervals = (span / opts.grid_dx).ceil() as usize;
    RadialGrid::log(opts.grid_r_min, opts.grid_r_max, intervals)
}

fn residual(sh: &Shooter, la: f64, lb: f64) -> Result<[f64; 2]> {
    let m = sh.mismatch(la.exp(), lb.exp())?;
    Ok([m.dphi, m.dphi_x])
}

fn newton(sh: &Shooter, mut la: f64, mut lb: f64, tol: f64) -> Result<(f64, f64, Mismatch)> {
    let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
    let mut f = residual(sh, la, lb)?;
    let mut stalled = 0;
    for _ in 0..60 {
        if norm(f) < 1e-13 {
            break;
        }
        let eps = 1e-6;
        let fa_p = residual(sh, la + eps, lb)?;
        let fa_m = residual(sh, la - eps, lb)?;
        let fb_p = residual(sh, la, lb + eps)?;
        let fb_m = residual(sh, la, lb - eps)?;
        let j = [
            [(fa_p[0] - fa_m[0]) / (2.0 * eps), (fb_p[0] - fb_m[0]) / (2.0 * eps)],
            [(fa_p[1] - fa_m[1]) / (2.0 * eps), (fb_p[1] - fb_m[1]) / (2.0 * eps)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Convergence("singular shooting Jacobian".into()));
        }
        let da = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let db = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (na, nb) = (la + lambda * da, lb + lambda * db);
            if let Ok(fnew) = residual(sh, na, nb) {
                if norm(fnew) < norm(f) {
                    la = na;
                    lb = nb;
                    f = fnew;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            stalled += 1;
            if stalled > 1 || norm(f) < tol {
                break;
            }
        }
    }
    Ok((la.exp(), lb.exp(), Mismatch { dphi: f[0], dphi_x: f[1] }))
}

fn assemble(
    sh: &Shooter,
    grid: Arc<RadialGrid>,
    alpha: f64,
    beta: f64,
    m: Mismatch,
) -> Result<StationaryMap> {
    let inner = sh.interior(beta, true)?;
    let outer = sh.exterior(alpha, true)?;
    let r_s = inner.span().0.exp();
    let r_e = outer.span().0.exp();
    let r_m = sh.x_m.exp();
    let n = sh.n;
    let mut q = Vec::with_capacity(grid.len());
    let mut qr = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let (p, dp) = if r <= r_s {
            interior_series_unchecked(beta, r)
        } else if r >= r_e {
            super::exterior_series_unchecked(alpha, r, n)
        } else {
            let sol = if r <= r_m { &inner } else { &outer };
            let y = sol
                .eval(r.ln())
                .ok_or_else(|| Error::Integrator(format!("no dense output at r = {r}")))?;
            (y[0], y[1] / r)
        };
        q.push(p);
        qr.push(dp);
    }
    let q = RadialField::new(grid.clone(), q, Parity::None)?;
    let q_r = RadialField::new(grid, qr, Parity::None)?;
    let mut map = StationaryMap { n, q, q_r, alpha, beta, energy: 0.0, mismatch: m.norm() };
    map.energy = super::energy::map_energy(&map)?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_degree_shot() {
        let m = shoot(&ShootingParams::new(0, 0.0, 0.0)).unwrap();
        assert_eq!(m.norm(), 0.0);
    }

    #[test]
    fn degree_one_converges() {
        let q = solve_stationary(1).unwrap();
        assert!(q.mismatch() < 1e-9, "{}", q.mismatch());
        let m = shoot(&ShootingParams::new(1, q.alpha(), q.beta())).unwrap();
        assert!(m.norm() < 1e-9);
    }

    #[test]
    fn large_beta_overshoots() {
        let q = solve_stationary(1).unwrap();
        let err = shoot(&ShootingParams::new(1, q.alpha(), 1e3 * q.beta())).unwrap_err();
        assert!(matches!(err, Error::Divergence { side: ShotSide::Interior, .. }), "{err:?}");
    }

    #[test]
    fn degree_zero_is_trivial() {
        let q = solve_stationary(0).unwrap();
        assert_eq!((q.alpha(), q.beta(), q.energy()), (0.0, 0.0, 0.0));
        assert_eq!(q.q().sup_norm(), 0.0);
    }
}
