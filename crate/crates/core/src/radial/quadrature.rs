//! Weighted radial quadrature.
//!
//! Each cell integrates the local cubic interpolant of the samples (the same
//! one used by [`crate::interp::cubic_at`]) against `r^k` with 3-point
//! Gauss-Legendre, so partial cells at the interval ends are handled exactly
//! like full ones.

use crate::error::{Error, Result};
use crate::interp::{lagrange4, stencil_start};
use crate::radial::grid::RadialField;

const GAUSS_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

fn cell_integral(xs: &[f64], ys: &[f64], k: i32, cell: usize, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let n = xs.len();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    if n < 4 {
        for (gx, gw) in GAUSS_X.iter().zip(GAUSS_W) {
            let r = mid + half * gx;
            let t = (r - xs[cell]) / (xs[cell + 1] - xs[cell]);
            acc += gw * (ys[cell] * (1.0 - t) + ys[cell + 1] * t) * r.powi(k);
        }
        return acc * half;
    }
    let s = stencil_start(n, cell);
    for (gx, gw) in GAUSS_X.iter().zip(GAUSS_W) {
        let r = mid + half * gx;
        let w = lagrange4(xs, s, r);
        let f = w[0] * ys[s] + w[1] * ys[s + 1] + w[2] * ys[s + 2] + w[3] * ys[s + 3];
        acc += gw * f * r.powi(k);
    }
    acc * half
}

/// `∫_a^b f(r) r^k dr` for samples `ys` at increasing nodes `xs`.
pub fn integrate_samples(xs: &[f64], ys: &[f64], k: i32, a: f64, b: f64) -> Result<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::InvalidInput("need matching nodes and samples".into()));
    }
    let (r0, r1) = (xs[0], xs[xs.len() - 1]);
    let slack = 1e-12 * r1.abs().max(1.0);
    if !(a <= b) || a < r0 - slack || b > r1 + slack {
        return Err(Error::Domain(format!(
            "integration interval [{a}, {b}] not inside grid [{r0}, {r1}]"
        )));
    }
    if k < 0 && a <= 0.0 {
        return Err(Error::Domain(format!("weight r^{k} is singular at the origin")));
    }
    let (a, b) = (a.max(r0), b.min(r1));
    let first = crate::interp::locate(xs, a);
    let mut total = 0.0;
    for i in first..xs.len() - 1 {
        if xs[i] >= b {
            break;
        }
        let lo = a.max(xs[i]);
        let hi = b.min(xs[i + 1]);
        total += cell_integral(xs, ys, k, i, lo, hi);
    }
    Ok(total)
}

/// `∫_a^b f(r) r^k dr` over a field.
pub fn weighted_integral(f: &RadialField, k: i32, a: f64, b: f64) -> Result<f64> {
    integrate_samples(f.grid().nodes(), f.values(), k, a, b)
}

/// `c_i = ∫_{r_i}^{r_max} f(r) r^k dr` at every node.
pub fn cumulative_from_right(xs: &[f64], ys: &[f64], k: i32) -> Vec<f64> {
    let n = xs.len();
    let mut out = vec![0.0; n];
    for i in (0..n - 1).rev() {
        out[i] = out[i + 1] + cell_integral(xs, ys, k, i, xs[i], xs[i + 1]);
    }
    out
}
