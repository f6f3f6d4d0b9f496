mod common;

use anmap::linearized::{count_negative_eigenvalues, threshold_test, Threshold};
use common::{fd_negative_count, BumpPotential};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn zero_counting_matches_dense_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..8 {
        let p = BumpPotential::random(&mut rng);
        let ours = count_negative_eigenvalues(&p.field(8.0, 1600)).unwrap();
        let oracle = fd_negative_count(|r| p.eval(r), 8.0, 600);
        assert_eq!(ours, oracle, "{p:?}");
    }
}

#[test]
fn count_is_scale_covariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..4 {
        let p = BumpPotential::random(&mut rng);
        let base = count_negative_eigenvalues(&p.field(8.0, 1600)).unwrap();
        for lambda in [0.5, 2.0] {
            let g = std::sync::Arc::new(anmap::RadialGrid::with_origin(8.0 * lambda, 1600).unwrap());
            let f = anmap::RadialField::from_fn(g, anmap::Parity::Even, |r| p.eval(r / lambda) / (lambda * lambda)).unwrap();
            assert_eq!(count_negative_eigenvalues(&f).unwrap(), base, "lambda = {lambda}");
        }
    }
}

/// Depth `D` of `-D·bump` at which the growing branch of the zero-energy
/// solution switches sign, i.e. the first bound state reaches threshold.
fn critical_depth() -> f64 {
    let field = |d: f64| BumpPotential { wells: vec![(2.0, 1.0, -d)] }.field(30.0, 6000);
    let mut hi = 5.0;
    while threshold_test(&field(hi)).unwrap().c_plus > 0.0 {
        hi += 5.0;
        assert!(hi < 500.0, "no bound state found");
    }
    let mut lo = hi - 5.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if threshold_test(&field(mid)).unwrap().c_plus > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn threshold_fit_at_the_binding_depth() {
    let d = critical_depth();
    let near = |d: f64| threshold_test(&BumpPotential { wells: vec![(2.0, 1.0, -d)] }.field(30.0, 6000)).unwrap();
    let at = near(d);
    assert_eq!(at.classification, Threshold::Eigenvalue, "{at:?}");
    assert!((at.growth_exponent + 1.0).abs() < 1e-2, "{at:?}");
    let off = near(0.9 * d);
    assert_eq!(off.classification, Threshold::Neither);
    assert!(off.growth_exponent > 1.0, "{off:?}");
}
