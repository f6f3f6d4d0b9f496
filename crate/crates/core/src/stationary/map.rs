use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::{exterior_series_unchecked, interior_series_unchecked, ode_rhs_log};
use crate::interp::hermite;
use crate::radial::{Parity, RadialField, RadialGrid};

/// A computed stationary map `Q_n` on a grid uniform in `log r`.
#[derive(Debug, Clone)]
pub struct StationaryMap {
    pub(crate) n: u32,
    pub(crate) q: RadialField,
    pub(crate) q_r: RadialField,
    pub(crate) alpha: f64,
    pub(crate) beta: f64,
    pub(crate) energy: f64,
    pub(crate) mismatch: f64,
}

/// Scalar summary of a [`StationaryMap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSummary {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub energy: f64,
    pub mismatch: f64,
}

impl StationaryMap {
    /// The degree-zero map `Q ≡ 0` on `grid`.
    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        Self {
            n: 0,
            q: RadialField::zeros(grid.clone(), Parity::None),
            q_r: RadialField::zeros(grid, Parity::None),
            alpha: 0.0,
            beta: 0.0,
            energy: 0.0,
            mismatch: 0.0,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Static energy `J(Q_n)`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Max-norm of the shooting mismatch at the matching radius.
    pub fn mismatch(&self) -> f64 {
        self.mismatch
    }

    pub fn q(&self) -> &RadialField {
        &self.q
    }

    pub fn q_r(&self) -> &RadialField {
        &self.q_r
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.q.grid()
    }

    pub fn summary(&self) -> MapSummary {
        MapSummary {
            n: self.n,
            alpha: self.alpha,
            beta: self.beta,
            energy: self.energy,
            mismatch: self.mismatch,
        }
    }

    /// `(Q(r), Q_r(r))` for any `r ≥ 0`.
    ///
    /// Inside the grid this is cubic Hermite interpolation in `log r` (the
    /// slopes come from the ODE itself); outside it the series expansions
    /// take over.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0);
        }
        let g = self.grid();
        if r < g.r_min() {
            return interior_series_unchecked(self.beta, r);
        }
        if r > g.r_max() {
            return exterior_series_unchecked(self.alpha, r, self.n);
        }
        let i = g.cell(r);
        let (r0, r1) = (g.r(i), g.r(i + 1));
        let (x0, x1, x) = (r0.ln(), r1.ln(), r.ln());
        let (q0, q1) = (self.q.values()[i], self.q.values()[i + 1]);
        let (p0, p1) = (r0 * self.q_r.values()[i], r1 * self.q_r.values()[i + 1]);
        let (q, _) = hermite(x0, x1, q0, q1, p0, p1, x);
        let (p, _) = hermite(x0, x1, p0, p1, ode_rhs_log(q0, p0, x0), ode_rhs_log(q1, p1, x1), x);
        (q, p / r)
    }

    /// `Q(r) / r`, equal to `β` at the origin.
    pub fn q_over_r(&self, r: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        if r < self.grid().r_min() {
            let b = self.beta;
            return b + 2.0 / 15.0 * (b.powi(5) - b.powi(3)) * r * r;
        }
        self.eval(r).0 / r
    }

    /// Limit value `nπ`.
    pub fn limit(&self) -> f64 {
        self.n as f64 * PI
    }
}
