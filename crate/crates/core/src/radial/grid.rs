use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the nodes of a [`RadialGrid`] are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Spacing {
    /// Uniform in `r` with step `h`.
    Uniform { h: f64 },
    /// Uniform in `x = log r` with step `dx`.
    Log { dx: f64 },
}

/// A strictly increasing set of radial nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    spacing: Spacing,
}

impl RadialGrid {
    /// Uniform grid on `[r_min, r_max]` with `intervals` cells.
    pub fn uniform(r_min: f64, r_max: f64, intervals: usize) -> Result<Self> {
        if !(r_min >= 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "uniform grid needs 0 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if intervals < 4 {
            return Err(Error::InvalidInput("grid needs at least 5 nodes".into()));
        }
        let h = (r_max - r_min) / intervals as f64;
        let nodes = (0..=intervals).map(|i| r_min + h * i as f64).collect();
        Ok(Self { nodes, spacing: Spacing::Uniform { h } })
    }

    /// Uniform grid `r_i = i h` on `[0, r_max]`; the first node is the origin.
    pub fn with_origin(r_max: f64, intervals: usize) -> Result<Self> {
        Self::uniform(0.0, r_max, intervals)
    }

    /// Uniform grid of step `h` starting at the origin, extended so that it covers `r_max`.
    pub fn with_origin_step(r_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
        }
        let intervals = (r_max / h - 1e-9).ceil().max(4.0) as usize;
        Self::uniform(0.0, h * intervals as f64, intervals)
    }

    /// Grid uniform in `log r` on `[r_min, r_max]`.
    pub fn log(r_min: f64, r_max: f64, intervals: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "log grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if intervals < 4 {
            return Err(Error::InvalidInput("grid needs at least 5 nodes".into()));
        }
        let (x0, x1) = (r_min.ln(), r_max.ln());
        let dx = (x1 - x0) / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|i| (x0 + dx * i as f64).exp()).collect();
        nodes[0] = r_min;
        nodes[intervals] = r_max;
        Ok(Self { nodes, spacing: Spacing::Log { dx } })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Step in the grid's own coordinate (`h` or `dx`).
    pub fn step(&self) -> f64 {
        match self.spacing {
            Spacing::Uniform { h } => h,
            Spacing::Log { dx } => dx,
        }
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn has_origin(&self) -> bool {
        self.nodes[0] == 0.0
    }

    pub fn r(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Index of the cell `[r_i, r_{i+1}]` that contains `r` (clamped to the grid).
    pub fn cell(&self, r: f64) -> usize {
        let last = self.nodes.len() - 2;
        let raw = match self.spacing {
            Spacing::Uniform { h } => ((r - self.nodes[0]) / h).floor(),
            Spacing::Log { dx } => {
                if r <= 0.0 {
                    0.0
                } else {
                    ((r.ln() - self.nodes[0].ln()) / dx).floor()
                }
            }
        };
        let mut i = if raw.is_nan() || raw < 0.0 { 0 } else { (raw as usize).min(last) };
        // guard against rounding at cell boundaries
        while i > 0 && r < self.nodes[i] {
            i -= 1;
        }
        while i < last && r >= self.nodes[i + 1] {
            i += 1;
        }
        i
    }

    /// Index of the node nearest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        let i = self.cell(r);
        if (r - self.nodes[i]).abs() <= (self.nodes[i + 1] - r).abs() {
            i
        } else {
            i + 1
        }
    }

    /// True when `r` lies in `[r_min, r_max]` up to a relative slack.
    pub fn contains(&self, r: f64) -> bool {
        let slack = 1e-12 * self.r_max().abs().max(1.0);
        r >= self.r_min() - slack && r <= self.r_max() + slack
    }

    /// Short textual description used in output headers.
    pub fn signature(&self) -> String {
        match self.spacing {
            Spacing::Uniform { h } => format!(
                "uniform r in [{}, {}], h = {}, nodes = {}",
                self.r_min(),
                self.r_max(),
                h,
                self.len()
            ),
            Spacing::Log { dx } => format!(
                "log r in [{}, {}], dx = {}, nodes = {}",
                self.r_min(),
                self.r_max(),
                dx,
                self.len()
            ),
        }
    }
}

/// Parity of a field under `r -> -r`, used for ghost values at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    #[default]
    None,
}

/// Real values sampled at the nodes of a shared grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    parity: Parity,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values but grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at node {i} (r = {})",
                grid.r(i)
            )));
        }
        Ok(Self { grid, values, parity })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Arc<RadialGrid>, parity: Parity, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, parity)
    }

    pub fn zeros(grid: Arc<RadialGrid>, parity: Parity) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values, parity }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// New field on the same grid from a node-wise map `(r, f) -> g`.
    pub fn map(&self, parity: Parity, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self { grid: self.grid.clone(), values, parity }
    }

    pub fn scaled(&self, k: f64) -> Self {
        self.map(self.parity, |_, v| k * v)
    }

    pub fn shares_grid(&self, other: &RadialField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Value at `r` by local cubic interpolation.
    pub fn interpolate(&self, r: f64) -> f64 {
        crate::interp::cubic_at(self.grid.nodes(), &self.values, r)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Cauchy data / evolution state `(u, u_t)` at time `t`.
#[derive(Debug, Clone)]
pub struct PairState {
    pub u: RadialField,
    pub ut: RadialField,
    pub t: f64,
}

impl PairState {
    pub fn new(u: RadialField, ut: RadialField, t: f64) -> Result<Self> {
        if !u.shares_grid(&ut) {
            return Err(Error::InvalidInput("position and velocity live on different grids".into()));
        }
        Ok(Self { u, ut, t })
    }

    pub fn zeros(grid: Arc<RadialGrid>, parity: Parity) -> Self {
        Self {
            u: RadialField::zeros(grid.clone(), parity),
            ut: RadialField::zeros(grid, parity),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u.grid()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { u: self.u.scaled(k), ut: self.ut.scaled(k), t: self.t }
    }
}
