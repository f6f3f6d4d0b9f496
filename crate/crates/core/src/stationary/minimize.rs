//! Direct minimization of the discretized static energy on a log grid.
//!
//! The discrete energy couples only neighbouring nodes, so its Hessian is
//! tridiagonal. Each iteration is a gradient step in the metric given by that
//! Hessian when it is positive definite, or by its kinetic part plus the
//! positive part of the potential curvature otherwise, followed by an Armijo
//! backtracking line search. The end values are free: they carry the energy
//! of the series tails beyond the grid, which fits `α` and `β` continuously
//! instead of pinning the boundary values.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{Parity, RadialField, RadialGrid, Spacing};
use crate::series::twist;

#[derive(Debug, Clone, Copy)]
pub struct MinimizerOptions {
    /// Stop when the discrete L² norm of the gradient falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 5000 }
    }
}

/// Outcome of [`minimize_with`].
#[derive(Debug, Clone)]
pub struct Minimized {
    pub phi: RadialField,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Fitted tail coefficients at the two ends.
    pub alpha: f64,
    pub beta: f64,
}

/// `2n arctan r` on `grid`.
pub fn arctan_profile(grid: Arc<RadialGrid>, n: u32) -> RadialField {
    RadialField::from_fn(grid, Parity::None, |r| 2.0 * n as f64 * r.atan()).expect("finite")
}

/// `nπ min(1, r)` on `grid`.
pub fn ramp_profile(grid: Arc<RadialGrid>, n: u32) -> RadialField {
    RadialField::from_fn(grid, Parity::None, |r| n as f64 * PI * r.min(1.0)).expect("finite")
}

struct Problem {
    n_pi: f64,
    r: Vec<f64>,
    mid: Vec<f64>,
    w: Vec<f64>,
    dx: f64,
}

impl Problem {
    fn new(grid: &RadialGrid, n: u32) -> Result<Self> {
        let dx = match grid.spacing() {
            Spacing::Log { dx } => dx,
            Spacing::Uniform { .. } => {
                return Err(Error::InvalidInput("the minimizer needs a log grid".into()))
            }
        };
        let r = grid.nodes().to_vec();
        let mid = r.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
        let mut w = vec![dx; r.len()];
        w[0] *= 0.5;
        *w.last_mut().unwrap() *= 0.5;
        Ok(Self { n_pi: n as f64 * PI, r, mid, w, dx })
    }

    fn last(&self) -> usize {
        self.r.len() - 1
    }

    fn energy(&self, p: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..p.len() - 1 {
            let d = p[i + 1] - p[i];
            e += 0.5 * self.mid[i] * d * d / self.dx;
        }
        for i in 0..p.len() {
            let s = p[i].sin();
            let t = twist(p[i]);
            e += 0.5 * self.w[i] * (2.0 * s * s * self.r[i] + t * t / self.r[i]);
        }
        let (r0, rn) = (self.r[0], self.r[self.last()]);
        let gap = self.n_pi - p[self.last()];
        e + 0.5 * p[0] * p[0] * r0 + self.n_pi * self.n_pi / (2.0 * rn) + gap * gap * rn
    }

    /// Gradient, Hessian diagonal, Hessian off-diagonal and the convex part of the diagonal.
    fn derivatives(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = p.len();
        let mut g = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut safe = vec![0.0; m];
        let mut off = vec![0.0; m - 1];
        for i in 0..m - 1 {
            let k = self.mid[i] / self.dx;
            let flux = k * (p[i + 1] - p[i]);
            g[i] -= flux;
            g[i + 1] += flux;
            diag[i] += k;
            diag[i + 1] += k;
            safe[i] += k;
            safe[i + 1] += k;
            off[i] = -k;
        }
        for i in 0..m {
            let (s2, c2) = (2.0 * p[i]).sin_cos();
            let sn = p[i].sin();
            let t = twist(p[i]);
            let tp = 2.0 * sn * sn;
            let r = self.r[i];
            let gp = 2.0 * s2 * r + 2.0 * t * tp / r;
            let gpp = 4.0 * c2 * r + (2.0 * tp * tp + 2.0 * t * 2.0 * s2) / r;
            g[i] += 0.5 * self.w[i] * gp;
            diag[i] += 0.5 * self.w[i] * gpp;
            safe[i] += 0.5 * self.w[i] * gpp.max(0.0);
        }
        let (r0, rn, last) = (self.r[0], self.r[m - 1], m - 1);
        g[0] += p[0] * r0;
        diag[0] += r0;
        safe[0] += r0;
        g[last] -= 2.0 * (self.n_pi - p[last]) * rn;
        diag[last] += 2.0 * rn;
        safe[last] += 2.0 * rn;
        (g, diag, off, safe)
    }

    fn grad_norm(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.w).map(|(gi, wi)| gi * gi / wi).sum::<f64>().sqrt()
    }
}

/// Solves a symmetric tridiagonal system; `None` unless positive definite.
fn solve_spd(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut d = vec![0.0; m];
    let mut l = vec![0.0; m];
    let mut y = vec![0.0; m];
    d[0] = diag[0];
    if !(d[0] > 0.0) {
        return None;
    }
    y[0] = rhs[0];
    for i in 1..m {
        l[i] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - l[i] * off[i - 1];
        if !(d[i] > 1e-14 * diag[i].abs()) {
            return None;
        }
        y[i] = rhs[i] - l[i] * y[i - 1];
    }
    let mut x = vec![0.0; m];
    x[m - 1] = y[m - 1] / d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = y[i] / d[i] - l[i + 1] * x[i + 1];
    }
    Some(x)
}

/// Minimizes the static energy starting from `init`; returns the minimizer.
pub fn minimize_static_energy(n: u32, init: &RadialField) -> Result<RadialField> {
    minimize_with(n, init, &MinimizerOptions::default()).map(|m| m.phi)
}

/// Minimizes the static energy starting from `init`.
pub fn minimize_with(n: u32, init: &RadialField, opts: &MinimizerOptions) -> Result<Minimized> {
    let grid = init.grid().clone();
    let prob = Problem::new(&grid, n)?;
    let mut p = init.values().to_vec();
    let mut e = prob.energy(&p);
    let mut it = 0;
    let mut gn;
    loop {
        let (g, diag, off, safe) = prob.derivatives(&p);
        gn = prob.grad_norm(&g);
        if gn < opts.tol {
            break;
        }
        if it >= opts.max_iter {
            return Err(Error::Convergence(format!(
                "energy minimization stopped after {it} iterations with gradient {gn:.3e}"
            )));
        }
        it += 1;
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let dir = solve_spd(&diag, &off, &neg)
            .or_else(|| solve_spd(&safe, &off, &neg))
            .ok_or_else(|| Error::Convergence("metric is not positive definite".into()))?;
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut moved = false;
        while t > f64::EPSILON {
            let trial: Vec<f64> = p.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let et = prob.energy(&trial);
            let roundoff = 1e-14 * e.abs().max(1.0);
            let ok = et <= e + 1e-4 * t * slope
                || ((et - e).abs() <= roundoff && prob.grad_norm(&prob.derivatives(&trial).0) < gn);
            if ok {
                p = trial;
                e = et;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            return Err(Error::Convergence(format!(
                "line search failed at iteration {it} with gradient {gn:.3e}"
            )));
        }
    }
    let last = p.len() - 1;
    let (r0, rn) = (grid.r_min(), grid.r_max());
    let alpha = (prob.n_pi - p[last]) * rn * rn;
    let beta = p[0] / r0;
    let phi = RadialField::new(grid, p, Parity::None)?;
    Ok(Minimized { phi, energy: e, grad_norm: gn, iterations: it, alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::log(1e-3, 1e2, 2900).unwrap())
    }

    #[test]
    fn zero_is_critical() {
        let z = RadialField::zeros(grid(), Parity::None);
        let m = minimize_with(0, &z, &MinimizerOptions::default()).unwrap();
        assert_eq!(m.iterations, 0);
        assert_eq!(m.phi.sup_norm(), 0.0);
    }

    #[test]
    fn agrees_with_shooting() {
        let q = crate::stationary::solve_stationary(1).unwrap();
        for init in [arctan_profile(grid(), 1), ramp_profile(grid(), 1)] {
            let m = minimize_with(1, &init, &MinimizerOptions::default()).unwrap();
            let err = m
                .phi
                .grid()
                .nodes()
                .iter()
                .zip(m.phi.values())
                .map(|(&r, &v)| (v - q.eval(r).0).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-4, "sup difference {err}");
            assert!((m.energy - q.energy()).abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_uniform_grid() {
        let g = Arc::new(RadialGrid::with_origin(1.0, 10).unwrap());
        assert!(minimize_static_energy(1, &RadialField::zeros(g, Parity::None)).is_err());
    }
}
