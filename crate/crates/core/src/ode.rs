//! Dormand-Prince 5(4) integrator with dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and limits for [`Dopri5::integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_step: f64::INFINITY, max_steps: 1_000_000 }
    }
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    pub fn max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }
}

#[derive(Debug, Clone)]
struct DenseStep {
    x0: f64,
    h: f64,
    coeffs: [Vec<f64>; 5],
}

/// Result of an integration: end state plus the dense-output record.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: f64,
    pub y: Vec<f64>,
    /// True when the stop predicate fired before reaching the end point.
    pub stopped: bool,
    pub steps: usize,
    dense: Vec<DenseStep>,
}

impl Solution {
    /// Start and end of the covered interval, in integration order.
    pub fn span(&self) -> (f64, f64) {
        match (self.dense.first(), self.dense.last()) {
            (Some(a), Some(b)) => (a.x0, b.x0 + b.h),
            _ => (self.x, self.x),
        }
    }

    /// Interpolated state at `x` inside the covered interval.
    pub fn eval(&self, x: f64) -> Option<Vec<f64>> {
        if self.dense.is_empty() {
            return None;
        }
        let forward = self.dense[0].h > 0.0;
        let key = |s: &DenseStep| if forward { s.x0 + s.h } else { -(s.x0 + s.h) };
        let target = if forward { x } else { -x };
        let i = self.dense.partition_point(|s| key(s) < target);
        let s = self.dense.get(i).or_else(|| self.dense.last())?;
        let theta = (x - s.x0) / s.h;
        if !(-1e-9..=1.0 + 1e-9).contains(&theta) {
            return None;
        }
        let t1 = 1.0 - theta;
        let c = &s.coeffs;
        Some(
            (0..c[0].len())
                .map(|k| c[0][k] + theta * (c[1][k] + t1 * (c[2][k] + theta * (c[3][k] + t1 * c[4][k]))))
                .collect(),
        )
    }
}

impl Dopri5 {
    /// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
    ///
    /// `stop(x, y)` is checked after every accepted step; when it returns true
    /// the integration ends there with `stopped = true`.
    pub fn integrate<F, S>(
        &self,
        mut f: F,
        x0: f64,
        y0: &[f64],
        x1: f64,
        mut stop: S,
        dense: bool,
    ) -> Result<Solution>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        S: FnMut(f64, &[f64]) -> bool,
    {
        let n = y0.len();
        let dir = if x1 >= x0 { 1.0 } else { -1.0 };
        let span = (x1 - x0).abs();
        let mut x = x0;
        let mut y = y0.to_vec();
        let mut record = Vec::new();
        if span == 0.0 {
            return Ok(Solution { x, y, stopped: false, steps: 0, dense: record });
        }
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        f(x, &y, &mut k[0]);

        // initial step from the usual norm heuristic
        let sc: Vec<f64> = y.iter().map(|v| self.atol + self.rtol * v.abs()).collect();
        let d0 = rms(&y, &sc);
        let d1 = rms(&k[0], &sc);
        let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h = h.min(span).min(self.max_step);
        let mut fac_old: f64 = 1e-4;
        let mut steps = 0;
        let mut last = false;

        loop {
            if steps >= self.max_steps {
                return Err(Error::Integrator(format!("step limit reached at x = {x}")));
            }
            let remaining = (x1 - x) * dir;
            if h >= remaining {
                h = remaining;
                last = true;
            }
            let hs = h * dir;
            let stage = |y: &[f64], coeffs: &[(usize, f64)], k: &Vec<Vec<f64>>, out: &mut [f64]| {
                for i in 0..n {
                    let mut s = y[i];
                    for &(j, a) in coeffs {
                        s += hs * a * k[j][i];
                    }
                    out[i] = s;
                }
            };
            stage(&y, &[(0, A21)], &k, &mut tmp);
            f(x + C2 * hs, &tmp, &mut k[1]);
            stage(&y, &[(0, A31), (1, A32)], &k, &mut tmp);
            f(x + C3 * hs, &tmp, &mut k[2]);
            stage(&y, &[(0, A41), (1, A42), (2, A43)], &k, &mut tmp);
            f(x + C4 * hs, &tmp, &mut k[3]);
            stage(&y, &[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &mut tmp);
            f(x + C5 * hs, &tmp, &mut k[4]);
            stage(&y, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &mut tmp);
            f(x + hs, &tmp, &mut k[5]);
            stage(&y, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &k, &mut ynew);
            f(x + hs, &ynew, &mut k[6]);
            steps += 1;

            let mut err = 0.0;
            for i in 0..n {
                let e = hs
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                        + E7 * k[6][i]);
                let s = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / s) * (e / s);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                h *= 0.1;
                last = false;
                if h < 1e-14 * span {
                    return Err(Error::Integrator(format!("non-finite state near x = {x}")));
                }
                continue;
            }

            // PI step-size control
            let fac11 = err.powf(0.17);
            let fac = (fac11 / fac_old.powf(0.04) / 0.9).clamp(0.1, 5.0);
            if err <= 1.0 {
                if dense {
                    let mut c: [Vec<f64>; 5] = Default::default();
                    c[0] = y.clone();
                    c[1] = (0..n).map(|i| ynew[i] - y[i]).collect();
                    c[2] = (0..n).map(|i| hs * k[0][i] - c[1][i]).collect();
                    c[3] = (0..n).map(|i| c[1][i] - hs * k[6][i] - c[2][i]).collect();
                    c[4] = (0..n)
                        .map(|i| {
                            hs * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                                + D6 * k[5][i]
                                + D7 * k[6][i])
                        })
                        .collect();
                    record.push(DenseStep { x0: x, h: hs, coeffs: c });
                }
                fac_old = err.max(1e-4);
                x = if last { x1 } else { x + hs };
                y.copy_from_slice(&ynew);
                k.swap(0, 6);
                if stop(x, &y) {
                    return Ok(Solution { x, y, stopped: true, steps, dense: record });
                }
                if last {
                    return Ok(Solution { x, y, stopped: false, steps, dense: record });
                }
                h = (h / fac).min(self.max_step);
            } else {
                h /= (fac11 / 0.9).min(5.0);
                last = false;
            }
            if h < 1e-14 * span.max(x.abs()) {
                return Err(Error::Integrator(format!("step size underflow at x = {x}")));
            }
        }
    }
}

fn rms(v: &[f64], sc: &[f64]) -> f64 {
    (v.iter().zip(sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / v.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let sol = Dopri5::with_tolerances(1e-12, 1e-14)
            .integrate(
                |_, y, dy| {
                    dy[0] = y[1];
                    dy[1] = -y[0];
                },
                0.0,
                &[0.0, 1.0],
                10.0,
                |_, _| false,
                true,
            )
            .unwrap();
        assert!((sol.y[0] - 10f64.sin()).abs() < 1e-10);
        for &x in &[0.3, 4.4, 9.99] {
            let y = sol.eval(x).unwrap();
            assert!((y[0] - x.sin()).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn backward_integration_and_stop() {
        let s = Dopri5::default();
        let sol = s
            .integrate(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], -3.0, |_, _| false, true)
            .unwrap();
        assert!((sol.y[0] - (-3.0f64).exp()).abs() < 1e-10);
        assert!((sol.eval(-1.5).unwrap()[0] - (-1.5f64).exp()).abs() < 1e-9);

        let stopped = s
            .integrate(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], 10.0, |_, y| y[0] > 5.0, false)
            .unwrap();
        assert!(stopped.stopped && stopped.x < 10.0 && stopped.y[0] > 5.0);
    }

    #[test]
    fn fifth_order_dense_output() {
        let sol = Dopri5::with_tolerances(1e-13, 1e-15)
            .integrate(|x, _, dy| dy[0] = x.cos(), 0.0, &[0.0], 6.0, |_, _| false, true)
            .unwrap();
        let worst = (0..600)
            .map(|i| {
                let x = 0.01 * i as f64;
                (sol.eval(x).unwrap()[0] - x.sin()).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-11, "worst = {worst}");
    }
}
