//! The nonlinearity `Z(r, u)` of the reduced equation, written as
//! `u² Z₂ + u³ Z₃ + u⁴ Z₄ + u⁵ Z₅` with every `φ = ru` dependent factor
//! evaluated through the cancellation-free kernels of [`crate::series`].

use crate::linearized::potential_from;
use crate::series::{
    cos2_rem, cos2_rem4, cos4_rem4, quad_rem, quintic, sin2_rem, sin4_rem, sinc,
};
use crate::stationary::StationaryMap;

/// The `r`-dependent coefficients of `Z` at one radius.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct ZCoeffs {
    r: f64,
    z2: f64,
    c3a: f64,
    c3b: f64,
    c3c: f64,
    c4k: f64,
    c4a: f64,
    c4k4: f64,
}

impl ZCoeffs {
    /// Coefficients from `Q(r)` and `q = Q/r` (`q = β` at the origin).
    pub(crate) fn new(r: f64, q_val: f64, q: f64) -> Self {
        let s1 = sinc(q_val);
        let s2 = sinc(2.0 * q_val);
        let s4 = sinc(4.0 * q_val);
        let c2 = (2.0 * q_val).cos();
        let q2 = q * q;
        Self {
            r,
            z2: -4.0 * s2 * q + quad_rem(q_val) * q2 * q,
            c3a: c2 + q2 * (2.0 * s2 + s1 * s1),
            c3b: -2.0 * (s1 * q).powi(2),
            c3c: -2.0 * q2 * s2 * s2,
            c4k: r * (2.0 * q_val).sin() - q * c2 - q * s2,
            c4a: 2.0 * q * s2,
            c4k4: q * s4,
        }
    }

    pub(crate) fn at(map: &StationaryMap, r: f64) -> Self {
        let q = map.q_over_r(r);
        let qv = if r == 0.0 { 0.0 } else { map.eval(r).0 };
        Self::new(r, qv, q)
    }

    /// `[u² Z₂, u³ Z₃, u⁴ Z₄, u⁵ Z₅]`.
    pub(crate) fn terms(&self, u: f64) -> [f64; 4] {
        let p = self.r * u;
        let a = sin2_rem(p);
        let u2 = u * u;
        let z3 = self.c3a * a + self.c3b * cos2_rem(p) + self.c3c * sin4_rem(p);
        let z4 = self.c4k * cos2_rem4(p) + self.c4a * a + self.c4k4 * cos4_rem4(p);
        [u2 * self.z2, u2 * u * z3, u2 * u2 * z4, u2 * u2 * u * quintic(p)]
    }

    #[inline]
    pub(crate) fn eval(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let p = self.r * u;
        let a = sin2_rem(p);
        let z3 = self.c3a * a + self.c3b * cos2_rem(p) + self.c3c * sin4_rem(p);
        let z4 = self.c4k * cos2_rem4(p) + self.c4a * a + self.c4k4 * cos4_rem4(p);
        u * u * (self.z2 + u * (z3 + u * (z4 + u * quintic(p))))
    }
}

/// `Z(r, u)` for the reduced equation around `map`.
///
/// `Z = [N(Q + ru) - N(Q) - N'(Q) ru] / r`, where `N(ψ)` collects the
/// zeroth-order terms of the 3d equation.
pub fn nonlinearity_z(r: f64, u: f64, map: &StationaryMap) -> f64 {
    if map.n() == 0 {
        return ZCoeffs::new(r, 0.0, 0.0).eval(u);
    }
    ZCoeffs::at(map, r).eval(u)
}

/// The four homogeneous pieces `[u² Z₂, u³ Z₃, u⁴ Z₄, u⁵ Z₅]` of `Z(r, u)`.
pub fn nonlinearity_terms(r: f64, u: f64, map: &StationaryMap) -> [f64; 4] {
    if map.n() == 0 {
        return ZCoeffs::new(r, 0.0, 0.0).terms(u);
    }
    ZCoeffs::at(map, r).terms(u)
}

/// `V(r)` and `Z` coefficients sampled on `nodes`.
pub(crate) fn sample_coupling(map: &StationaryMap, nodes: &[f64]) -> (Vec<f64>, Vec<ZCoeffs>) {
    nodes
        .iter()
        .map(|&r| {
            let q = map.q_over_r(r);
            let qv = if r == 0.0 { 0.0 } else { map.eval(r).0 };
            let v = if map.n() == 0 { 0.0 } else { potential_from(qv, q) };
            (v, ZCoeffs::new(r, qv, q))
        })
        .unzip()
}
