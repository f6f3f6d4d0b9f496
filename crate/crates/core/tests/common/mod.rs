//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use anmap::{Parity, RadialField, RadialGrid};
use nalgebra::DMatrix;
use rand::Rng;

/// Sum of smooth bumps `d_k exp(-1/(1 - s²))`, `s = (r - c_k)/w_k`.
#[derive(Debug, Clone)]
pub struct BumpPotential {
    pub wells: Vec<(f64, f64, f64)>,
}

impl BumpPotential {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let count = rng.gen_range(1..=3);
        let wells = (0..count)
            .map(|_| {
                let c = rng.gen_range(1.0..4.0);
                let w = rng.gen_range(0.3..1.2);
                let d = rng.gen_range(-150.0..30.0);
                (c, w, d)
            })
            .collect();
        Self { wells }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.wells
            .iter()
            .map(|&(c, w, d)| {
                let s = (r - c) / w;
                if s.abs() < 1.0 {
                    d * (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn field(&self, r_max: f64, intervals: usize) -> RadialField {
        let g = Arc::new(RadialGrid::with_origin(r_max, intervals).unwrap());
        RadialField::from_fn(g, Parity::Even, |r| self.eval(r)).unwrap()
    }
}

/// Negative eigenvalues of `-d²/dr² + 2/r² + V` on `(0, L)` with Dirichlet
/// ends, from a dense second-order finite-difference matrix.
pub fn fd_negative_count(v: impl Fn(f64) -> f64, length: f64, points: usize) -> usize {
    let h = length / (points + 1) as f64;
    let mut m = DMatrix::<f64>::zeros(points, points);
    for i in 0..points {
        let r = (i + 1) as f64 * h;
        m[(i, i)] = 2.0 / (h * h) + 2.0 / (r * r) + v(r);
        if i + 1 < points {
            m[(i, i + 1)] = -1.0 / (h * h);
            m[(i + 1, i)] = -1.0 / (h * h);
        }
    }
    m.symmetric_eigenvalues().iter().filter(|&&e| e < 0.0).count()
}
