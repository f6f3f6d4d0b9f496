//! Finite-difference derivatives and radial Laplacians.
//!
//! Interior stencils are 5-point centered (4th order). Edges use 4th-order
//! one-sided stencils, except at an origin node of an even or odd field where
//! ghost values `f(-r) = +/- f(r)` keep the centered stencil.

use crate::error::{Error, Result};
use crate::radial::grid::{Parity, RadialField, Spacing};

#[inline]
fn ghost(values: &[f64], parity: Parity, i: isize) -> f64 {
    if i >= 0 {
        return values[i as usize];
    }
    let v = values[(-i) as usize];
    match parity {
        Parity::Odd => -v,
        _ => v,
    }
}

/// First derivative of uniformly spaced samples with step `step`.
///
/// `origin_parity` enables ghost values on the left edge.
pub fn d1_uniform(values: &[f64], step: f64, origin_parity: Option<Parity>) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least 5 nodes");
    let f = values;
    let c = 1.0 / (12.0 * step);
    let mut out = vec![0.0; n];
    let ghosted = matches!(origin_parity, Some(Parity::Even) | Some(Parity::Odd));
    for (i, o) in out.iter_mut().enumerate() {
        let ii = i as isize;
        *o = if i >= 2 && i + 2 < n {
            (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c
        } else if i < 2 && ghosted {
            let p = origin_parity.unwrap();
            (ghost(f, p, ii - 2) - 8.0 * ghost(f, p, ii - 1) + 8.0 * f[i + 1] - f[i + 2]) * c
        } else if i == 0 {
            (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c
        } else if i == 1 {
            (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c
        } else if i == n - 1 {
            (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5])
                * c
        } else {
            (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c
        };
    }
    out
}

/// Second derivative of uniformly spaced samples with step `step`.
pub fn d2_uniform(values: &[f64], step: f64, origin_parity: Option<Parity>) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 6, "need at least 6 nodes");
    let f = values;
    let c = 1.0 / (12.0 * step * step);
    let ghosted = matches!(origin_parity, Some(Parity::Even) | Some(Parity::Odd));
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let ii = i as isize;
        *o = if i >= 2 && i + 2 < n {
            (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * c
        } else if i < 2 && ghosted {
            let p = origin_parity.unwrap();
            (-ghost(f, p, ii - 2) + 16.0 * ghost(f, p, ii - 1) - 30.0 * f[i] + 16.0 * f[i + 1]
                - f[i + 2])
                * c
        } else if i == 0 {
            (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * c
        } else if i == 1 {
            (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * c
        } else if i == n - 1 {
            (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4]
                + 61.0 * f[n - 5]
                - 10.0 * f[n - 6])
                * c
        } else {
            (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5]
                + f[n - 6])
                * c
        };
    }
    out
}

fn flipped(p: Parity) -> Parity {
    match p {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
        Parity::None => Parity::None,
    }
}

/// `d f / d r`.
pub fn differentiate(f: &RadialField) -> Result<RadialField> {
    let grid = f.grid();
    if grid.len() < 5 {
        return Err(Error::InvalidInput("differentiation needs at least 5 nodes".into()));
    }
    let values = match grid.spacing() {
        Spacing::Uniform { h } => {
            let origin = grid.has_origin().then_some(f.parity());
            d1_uniform(f.values(), h, origin)
        }
        Spacing::Log { dx } => {
            let fx = d1_uniform(f.values(), dx, None);
            fx.iter().zip(grid.nodes()).map(|(d, r)| d / r).collect()
        }
    };
    RadialField::new(grid.clone(), values, flipped(f.parity()))
}

/// `f_rr + ((d - 1) / r) f_r`, the radial Laplacian in `R^d`.
///
/// At an origin node the removable singularity is evaluated as `d f_rr(0)`,
/// which requires an even field.
pub fn radial_laplacian(f: &RadialField, d: u32) -> Result<RadialField> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let grid = f.grid();
    if grid.len() < 6 {
        return Err(Error::InvalidInput("Laplacian needs at least 6 nodes".into()));
    }
    let k = (d - 1) as f64;
    let values = match grid.spacing() {
        Spacing::Uniform { h } => {
            if grid.has_origin() && f.parity() != Parity::Even {
                return Err(Error::Parity(format!(
                    "radial Laplacian on an origin grid needs an even field, got {:?}",
                    f.parity()
                )));
            }
            let origin = grid.has_origin().then_some(Parity::Even);
            let f1 = d1_uniform(f.values(), h, origin);
            let f2 = d2_uniform(f.values(), h, origin);
            grid.nodes()
                .iter()
                .enumerate()
                .map(|(i, &r)| if r == 0.0 { d as f64 * f2[i] } else { f2[i] + k / r * f1[i] })
                .collect()
        }
        Spacing::Log { dx } => {
            let fx = d1_uniform(f.values(), dx, None);
            let fxx = d2_uniform(f.values(), dx, None);
            grid.nodes()
                .iter()
                .enumerate()
                .map(|(i, &r)| (fxx[i] + (k - 1.0) * fx[i]) / (r * r))
                .collect()
        }
    };
    RadialField::new(grid.clone(), values, f.parity())
}
