use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::calculus::{differentiate, radial_laplacian};
use crate::radial::grid::{PairState, RadialField};
use crate::radial::quadrature::integrate_samples;

/// Energy-space norms of a 5d radial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevNorms {
    /// `‖(u, u_t)‖_{Ḣ¹ × L²}`
    pub hdot1_l2: f64,
    /// `‖(u, u_t)‖_{Ḣ² × Ḣ¹}`
    pub hdot2_hdot1: f64,
    /// Norm of the intersection space, taken as the larger of the two.
    pub h_norm: f64,
}

fn full_integral(f: &RadialField, values: &[f64], k: i32) -> Result<f64> {
    let g = f.grid();
    integrate_samples(g.nodes(), values, k, g.r_min(), g.r_max())
}

fn squared(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x * x).collect()
}

/// Ḣ¹×L² and Ḣ²×Ḣ¹ norms in `R^5` over the whole grid.
pub fn sobolev_norms(s: &PairState) -> Result<SobolevNorms> {
    let ur = differentiate(&s.u)?;
    let lap = radial_laplacian(&s.u, 5)?;
    let utr = differentiate(&s.ut)?;
    let h1 = full_integral(&s.u, &squared(ur.values()), 4)?;
    let l2 = full_integral(&s.u, &squared(s.ut.values()), 4)?;
    let h2 = full_integral(&s.u, &squared(lap.values()), 4)?;
    let h1t = full_integral(&s.u, &squared(utr.values()), 4)?;
    let hdot1_l2 = (h1 + l2).max(0.0).sqrt();
    let hdot2_hdot1 = (h2 + h1t).max(0.0).sqrt();
    Ok(SobolevNorms { hdot1_l2, hdot2_hdot1, h_norm: hdot1_l2.max(hdot2_hdot1) })
}

/// `(∫ (|f|^p + |f_r|^p) r^4 dr)^{1/p}`.
pub fn wkp_norm(f: &RadialField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("W^(1,p) needs p >= 1, got {p}")));
    }
    let fr = differentiate(f)?;
    let dens: Vec<f64> = f
        .values()
        .iter()
        .zip(fr.values())
        .map(|(a, b)| a.abs().powf(p) + b.abs().powf(p))
        .collect();
    Ok(full_integral(f, &dens, 4)?.max(0.0).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::{Parity, RadialGrid};
    use std::sync::Arc;

    fn gauss_state(n: usize) -> PairState {
        let g = Arc::new(RadialGrid::with_origin(8.0, n).unwrap());
        let u = RadialField::from_fn(g.clone(), Parity::Even, |r| (-r * r).exp()).unwrap();
        PairState::new(u, RadialField::zeros(g, Parity::Even), 0.0).unwrap()
    }

    #[test]
    fn zero_state() {
        let g = Arc::new(RadialGrid::with_origin(2.0, 40).unwrap());
        let s = PairState::zeros(g, Parity::Even);
        let n = sobolev_norms(&s).unwrap();
        assert_eq!((n.hdot1_l2, n.hdot2_hdot1, n.h_norm), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gaussian_hdot1_matches_refined_oracle() {
        // ∫ 4 r^2 e^{-2 r^2} r^4 dr over (0, ∞) = 15 sqrt(pi/2) / 32
        let exact = (15.0 / 32.0 * (std::f64::consts::PI / 2.0).sqrt()).sqrt();
        let coarse = sobolev_norms(&gauss_state(400)).unwrap().hdot1_l2;
        let fine = sobolev_norms(&gauss_state(3200)).unwrap().hdot1_l2;
        assert!(((fine - exact) / exact).abs() < 1e-10);
        assert!(((coarse * coarse - fine * fine) / (fine * fine)).abs() < 1e-6);
    }

    #[test]
    fn homogeneity() {
        let s = gauss_state(400);
        let a = sobolev_norms(&s).unwrap();
        let b = sobolev_norms(&s.scaled(2.0)).unwrap();
        assert!((b.hdot1_l2 - 2.0 * a.hdot1_l2).abs() < 1e-13);
        assert!((b.hdot2_hdot1 - 2.0 * a.hdot2_hdot1).abs() < 1e-12);
        assert!((b.h_norm - 2.0 * a.h_norm).abs() < 1e-12);
        let w = wkp_norm(&s.u, 30.0 / 7.0).unwrap();
        let w3 = wkp_norm(&s.u.scaled(-3.0), 30.0 / 7.0).unwrap();
        assert!((w3 - 3.0 * w).abs() < 1e-12);
    }

    #[test]
    fn tent_w12() {
        let g = Arc::new(RadialGrid::with_origin(2.0, 4000).unwrap());
        let f = RadialField::from_fn(g, Parity::Even, |r| (1.0 - r).max(0.0)).unwrap();
        let exact = (22.0f64 / 105.0).sqrt();
        let v = wkp_norm(&f, 2.0).unwrap();
        assert!(((v - exact) / exact).abs() < 1e-3, "{v} vs {exact}");
    }

    #[test]
    fn rejects_small_p() {
        let g = Arc::new(RadialGrid::with_origin(2.0, 40).unwrap());
        let f = RadialField::zeros(g, Parity::Even);
        assert!(matches!(wkp_norm(&f, 0.5), Err(Error::Domain(_))));
        assert_eq!(wkp_norm(&f, 50.0 / 13.0).unwrap(), 0.0);
    }
}
