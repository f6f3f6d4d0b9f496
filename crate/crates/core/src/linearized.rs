//! The potential of the linearized operator around `Q_n`, the comparison
//! potential `Ṽ` and zero-energy spectral diagnostics for
//! `L_V = -∂_r² + 2/r² + V` on the half line.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::cubic_at;
use crate::ode::Dopri5;
use crate::radial::{d1_uniform, d2_uniform, integrate_samples, Parity, RadialField, Spacing};
use crate::series::{potential_rem, sinc, twist_rem};
use crate::stationary::StationaryMap;

/// `V(r)` from `Q` and `q = Q/r`; finite at `r = 0` where `q = β`.
pub fn potential_from(q_val: f64, q_over_r: f64) -> f64 {
    let s = sinc(q_val);
    let q2 = q_over_r * q_over_r;
    -4.0 * q2 * s * s + potential_rem(q_val) * q2 * q2
}

/// `V(r) = 2(cos 2Q - 1)/r² + (1 - 2cos 2Q + 2Q sin 2Q + cos 4Q)/r⁴` at any `r ≥ 0`.
pub fn potential_at(map: &StationaryMap, r: f64) -> f64 {
    if map.n() == 0 {
        return 0.0;
    }
    let q = map.q_over_r(r);
    let qv = if r == 0.0 { 0.0 } else { map.eval(r).0 };
    potential_from(qv, q)
}

/// `V` on the map's grid.
pub fn potential_v(map: &StationaryMap) -> RadialField {
    if map.n() == 0 {
        return RadialField::zeros(map.grid().clone(), Parity::None);
    }
    let values = map
        .grid()
        .nodes()
        .iter()
        .zip(map.q().values())
        .map(|(&r, &q)| potential_from(q, q / r))
        .collect();
    RadialField::new(map.grid().clone(), values, Parity::None).expect("finite potential")
}

/// `Ṽ` from `Q`, `q = Q/r` and `Q_r`.
pub fn tilde_from(q_val: f64, q_over_r: f64, q_r: f64) -> f64 {
    let s = sinc(q_val);
    4.0 * twist_rem(q_val) * s * s * q_over_r.powi(5) / q_r
}

/// `Ṽ = 2(Q - sin Q cos Q)(1 - cos 2Q) / (r⁵ Q_r)` on the map's grid.
///
/// For `n = 0` the numerator vanishes identically and `Ṽ ≡ 0`.
pub fn potential_tilde(map: &StationaryMap) -> Result<RadialField> {
    if map.n() == 0 {
        return Ok(RadialField::zeros(map.grid().clone(), Parity::None));
    }
    let g = map.grid();
    let mut values = Vec::with_capacity(g.len());
    for ((&r, &q), &qr) in g.nodes().iter().zip(map.q().values()).zip(map.q_r().values()) {
        if !(qr > 0.0) {
            return Err(Error::InvalidInput(format!("Q_r = {qr} is not positive at r = {r}")));
        }
        values.push(tilde_from(q, q / r, qr));
    }
    RadialField::new(g.clone(), values, Parity::None)
}

/// Zero-energy classification at the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    Eigenvalue,
    /// Kept for completeness; with the `2/r²` barrier a bounded zero-energy
    /// solution always decays like `r⁻¹`, so this is never returned.
    Resonance,
    Neither,
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Threshold::Eigenvalue => "eigenvalue",
            Threshold::Resonance => "resonance",
            Threshold::Neither => "neither",
        })
    }
}

/// Regular zero-energy solution `φ = r² y` of `L_V φ = 0`, sampled at the accepted steps.
struct ZeroEnergy {
    zeros: usize,
    /// `(r, y, r y_r)` at every accepted step.
    samples: Vec<(f64, f64, f64)>,
}

fn potential_sampler(v: &RadialField) -> impl Fn(f64) -> f64 + '_ {
    let xs = v.grid().nodes();
    let ys = v.values();
    move |r: f64| cubic_at(xs, ys, r)
}

fn zero_energy_solution(v: &RadialField) -> Result<ZeroEnergy> {
    let g = v.grid();
    if g.len() < 4 {
        return Err(Error::InvalidInput("potential grid too small".into()));
    }
    if let Some(i) = v.values().iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("potential is not finite at node {i}")));
    }
    let vr = potential_sampler(v);
    let r_end = g.r_max();
    let (r_start, max_step) = match g.spacing() {
        Spacing::Log { dx } => (g.r_min(), dx),
        Spacing::Uniform { h } => (if g.has_origin() { 1e-4 * h.min(1.0) } else { g.r_min() }, h / r_end),
    };
    let v0 = vr(r_start);
    // y = 1 + V(0) r²/10 + ...; in x = log r: y_xx + 3 y_x = r² V y
    let mut state = [1.0 + v0 * r_start * r_start / 10.0, v0 * r_start * r_start / 5.0];
    let mut x = r_start.ln();
    let x_end = r_end.ln();
    let ode = Dopri5::with_tolerances(1e-11, 1e-13).max_step(max_step);
    let mut samples = vec![(r_start, state[0], state[1])];
    let mut zeros = 0;
    let mut sign = state[0].signum();
    loop {
        let mut local = Vec::new();
        let sol = ode.integrate(
            |x, y, dy| {
                let r = x.exp();
                dy[0] = y[1];
                dy[1] = -3.0 * y[1] + r * r * vr(r) * y[0];
            },
            x,
            &state,
            x_end,
            |x, y| {
                local.push((x.exp(), y[0], y[1]));
                y[0].abs() > 1e100 || !y[0].is_finite()
            },
            false,
        )?;
        for &(_, y, _) in &local {
            if y != 0.0 && y.signum() != sign {
                zeros += 1;
                sign = y.signum();
            }
        }
        samples.extend(local);
        if !sol.y[0].is_finite() {
            return Err(Error::Numerical { t: sol.x.exp(), reason: "NaN in zero-energy solution".into() });
        }
        if sol.stopped {
            // the solution is only defined up to a constant factor
            let s = 1.0 / sol.y[0].abs();
            for p in samples.iter_mut() {
                p.1 *= s;
                p.2 *= s;
            }
            state = [sol.y[0] * s, sol.y[1] * s];
            x = sol.x;
            continue;
        }
        break;
    }
    Ok(ZeroEnergy { zeros, samples })
}

/// Number of negative eigenvalues of `L_V` on `(0, R_max)` with a Dirichlet
/// condition at `R_max`, by counting zeros of the regular zero-energy solution.
pub fn count_negative_eigenvalues(v: &RadialField) -> Result<usize> {
    Ok(zero_energy_solution(v)?.zeros)
}

/// Large-`r` fit of the regular zero-energy solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub classification: Threshold,
    /// Coefficient of the growing branch `r²` (as `y = φ/r² → c₊`).
    pub c_plus: f64,
    /// Coefficient of the decaying branch `r⁻¹` (`y ∼ c₋ r⁻³`).
    pub c_minus: f64,
    /// `d log|φ| / d log r` at `R_max`.
    pub growth_exponent: f64,
    /// Relative rms residual of the two-term fit.
    pub fit_residual: f64,
    /// Sign changes beyond `R_max` implied by the fitted branches.
    pub zeros_beyond: usize,
}

const C_PLUS_TOL: f64 = 1e-6;
const FIT_TOL: f64 = 1e-3;

fn fit_threshold(z: &ZeroEnergy) -> Result<ThresholdReport> {
    let (r_end, y_end, yx_end) = *z.samples.last().expect("samples");
    let window: Vec<(f64, f64)> =
        z.samples.iter().filter(|s| s.0 >= 0.5 * r_end).map(|s| (s.0, s.1)).collect();
    if window.len() < 3 {
        return Err(Error::Inconclusive("too few samples in the fit window".into()));
    }
    // least squares for y ≈ c₊ + c₋ r⁻³
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, y) in &window {
        let f = (r_end / r).powi(3);
        s11 += 1.0;
        s12 += f;
        s22 += f * f;
        b1 += y;
        b2 += f * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-14 * s11 * s22 {
        return Err(Error::Inconclusive("degenerate fit window".into()));
    }
    let c_plus = (s22 * b1 - s12 * b2) / det;
    let c_scaled = (s11 * b2 - s12 * b1) / det;
    let scale = window.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let rms = (window
        .iter()
        .map(|&(r, y)| (y - c_plus - c_scaled * (r_end / r).powi(3)).powi(2))
        .sum::<f64>()
        / window.len() as f64)
        .sqrt();
    let fit_residual = if scale > 0.0 { rms / scale } else { 0.0 };
    if fit_residual > FIT_TOL {
        return Err(Error::Inconclusive(format!(
            "two-term fit residual {fit_residual:.2e} exceeds {FIT_TOL:.0e}"
        )));
    }
    let classification =
        if c_plus.abs() > C_PLUS_TOL * scale { Threshold::Neither } else { Threshold::Eigenvalue };
    let zeros_beyond = usize::from(
        classification == Threshold::Neither && y_end != 0.0 && y_end.signum() != c_plus.signum(),
    );
    Ok(ThresholdReport {
        classification,
        c_plus,
        c_minus: c_scaled * r_end.powi(3),
        growth_exponent: 2.0 + if y_end != 0.0 { yx_end / y_end } else { 0.0 },
        fit_residual,
        zeros_beyond,
    })
}

/// Classifies the threshold from the large-`r` behaviour of the regular solution.
pub fn threshold_test(v: &RadialField) -> Result<ThresholdReport> {
    fit_threshold(&zero_energy_solution(v)?)
}

/// `‖(L_V - Ṽ)(r² Q_r)‖ / ‖r² Q_r‖` in `L²(dr)` over the map's grid.
pub fn susy_residual(map: &StationaryMap) -> Result<f64> {
    if map.n() == 0 {
        return Ok(0.0);
    }
    let g = map.grid();
    let dx = match g.spacing() {
        Spacing::Log { dx } => dx,
        Spacing::Uniform { .. } => return Err(Error::InvalidInput("expected a log grid".into())),
    };
    let v = potential_v(map);
    let vt = potential_tilde(map)?;
    let r = g.nodes();
    let phi: Vec<f64> = r.iter().zip(map.q_r().values()).map(|(r, qr)| r * r * qr).collect();
    let px = d1_uniform(&phi, dx, None);
    let pxx = d2_uniform(&phi, dx, None);
    let mut res = Vec::with_capacity(r.len());
    let mut nrm = Vec::with_capacity(r.len());
    for i in 0..r.len() {
        let r2 = r[i] * r[i];
        let prr = (pxx[i] - px[i]) / r2;
        let lv = -prr + 2.0 * phi[i] / r2 + (v.values()[i] - vt.values()[i]) * phi[i];
        // dr = r dx
        res.push(lv * lv * r[i]);
        nrm.push(phi[i] * phi[i] * r[i]);
    }
    let xs: Vec<f64> = r.iter().map(|r| r.ln()).collect();
    let (a, b) = (xs[0], xs[xs.len() - 1]);
    let num = integrate_samples(&xs, &res, 0, a, b)?;
    let den = integrate_samples(&xs, &nrm, 0, a, b)?;
    Ok((num / den).sqrt())
}

/// Everything the spectral checks report for one stationary map.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub n: u32,
    pub negative_count: usize,
    pub threshold: ThresholdReport,
    pub factorization_residual: f64,
    /// Smallest nodal value of `Ṽ`.
    pub tilde_min: f64,
    /// Zeros of the regular zero-energy solution of `L_V - Ṽ` on `(0, comparison_radius]`.
    pub comparison_zeros: usize,
    /// Where that solution falls below [`RESOLVED_FRACTION`] of its maximum.
    pub comparison_radius: f64,
    /// `max r⁶ |V(r)|` over the grid.
    pub decay_bound: f64,
    /// `V(0)` from the interior series.
    pub v_origin: f64,
}

/// The comparison operator has a threshold eigenfunction, so its regular solution
/// decays like `r⁻³` and integration error in the growing branch eventually
/// overtakes it. Sign changes are only counted while `|y|` stays above this
/// fraction of its maximum.
pub const RESOLVED_FRACTION: f64 = 1e-6;

fn resolved_zeros(z: &ZeroEnergy) -> (usize, f64) {
    let peak = z.samples.iter().fold(0.0f64, |m, s| m.max(s.1.abs()));
    // cut where |y| never again reaches the floor; genuine zeros are followed by large |y|
    let mut cut = z.samples.len();
    while cut > 1 && z.samples[cut - 1].1.abs() < RESOLVED_FRACTION * peak {
        cut -= 1;
    }
    let kept = &z.samples[..cut];
    let mut zeros = 0;
    let mut sign = kept[0].1.signum();
    for &(_, y, _) in kept {
        if y != 0.0 && y.signum() != sign {
            zeros += 1;
            sign = y.signum();
        }
    }
    (zeros, kept[kept.len() - 1].0)
}

/// Runs every spectral check for `map`.
pub fn spectral_report(map: &StationaryMap) -> Result<SpectralReport> {
    let v = potential_v(map);
    let vt = potential_tilde(map)?;
    let z = zero_energy_solution(&v)?;
    let threshold = fit_threshold(&z)?;
    let diff_vals: Vec<f64> = v.values().iter().zip(vt.values()).map(|(a, b)| a - b).collect();
    let diff = RadialField::new(v.grid().clone(), diff_vals, Parity::None)?;
    let (comparison_zeros, comparison_radius) = resolved_zeros(&zero_energy_solution(&diff)?);
    let decay_bound = v
        .grid()
        .nodes()
        .iter()
        .zip(v.values())
        .map(|(r, x)| r.max(1.0).powi(6) * x.abs())
        .fold(0.0, f64::max);
    Ok(SpectralReport {
        n: map.n(),
        negative_count: z.zeros + threshold.zeros_beyond,
        threshold,
        factorization_residual: susy_residual(map)?,
        tilde_min: vt.values().iter().cloned().fold(f64::INFINITY, f64::min),
        comparison_zeros,
        comparison_radius,
        decay_bound,
        v_origin: potential_at(map, 0.0),
    })
}
