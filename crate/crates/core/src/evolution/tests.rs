use super::*;
use crate::stationary::solve_stationary;

fn grid(r_max: f64, h: f64) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::with_origin_step(r_max, h).unwrap())
}

fn data(g: &Arc<RadialGrid>, u: impl Fn(f64) -> f64, ut: impl Fn(f64) -> f64) -> PairState {
    PairState::new(
        RadialField::from_fn(g.clone(), Parity::Even, u).unwrap(),
        RadialField::from_fn(g.clone(), Parity::Even, ut).unwrap(),
        0.0,
    )
    .unwrap()
}

/// Smooth bump supported on `[a, b]`.
fn bump(r: f64, a: f64, b: f64) -> f64 {
    let s = (2.0 * r - a - b) / (b - a);
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

#[test]
fn vacuum_is_stationary() {
    let q = Arc::new(solve_stationary(1).unwrap());
    let g = grid(12.0, 0.02);
    let cfg = EvolutionConfig::new(Coupling::AdkinsNappi(q), 2.0);
    let out = evolve(&PairState::zeros(g, Parity::Even), &cfg).unwrap();
    assert_eq!(out.state.u.sup_norm(), 0.0);
    assert_eq!(out.state.ut.sup_norm(), 0.0);
    assert_eq!(out.series.max_h_norm(), 0.0);
}

#[test]
fn finite_speed() {
    let g = grid(12.0, 0.01);
    let s = data(&g, |r| bump(r, 1.0, 2.0), |_| 0.0);
    let mut cfg = EvolutionConfig::new(Coupling::Free, 4.0);
    cfg.diagnostic_radius = 3.0;
    cfg.snapshot_every = Some(5);
    let out = evolve(&s, &cfg).unwrap();
    assert!(out.snapshots.len() > 3);
    for snap in &out.snapshots {
        let e = free_energy_between(snap, 3.0 + snap.t, g.r_max()).unwrap();
        assert!(e < 1e-10, "t = {}: {e:e}", snap.t);
    }
}

#[test]
fn self_convergence_is_fourth_order() {
    let run = |h: f64| {
        let g = grid(8.0, h);
        let s = data(&g, |r| (-r * r).exp(), |_| 0.0);
        let mut cfg = EvolutionConfig::new(Coupling::Free, 2.0);
        cfg.diagnostic_radius = 6.0;
        cfg.sample_every = 10;
        evolve(&s, &cfg).unwrap().state
    };
    let (a, b, c) = (run(0.04), run(0.02), run(0.01));
    let diff = |x: &PairState, y: &PairState, stride: usize| {
        x.u.values()
            .iter()
            .zip(y.u.values().iter().step_by(stride))
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    };
    let d1 = diff(&a, &b, 2);
    let d2 = diff(&b, &c, 2);
    let order = (d1 / d2).log2();
    assert!((3.5..=4.5).contains(&order), "order = {order} ({d1:e}, {d2:e})");
}

#[test]
fn time_reversal() {
    let q = Arc::new(solve_stationary(1).unwrap());
    let g = grid(14.0, 0.02);
    let s = data(&g, |r| 0.05 * (-(r * r - 1.0).powi(2)).exp(), |r| 0.02 * (-r * r).exp());
    let mut cfg = EvolutionConfig::new(Coupling::AdkinsNappi(q), 3.0);
    cfg.diagnostic_radius = 4.0;
    let fwd = evolve(&s, &cfg).unwrap().state;
    let flipped = PairState::new(fwd.u.clone(), fwd.ut.scaled(-1.0), 0.0).unwrap();
    let back = evolve(&flipped, &cfg).unwrap().state;
    let err_u = back.u.values().iter().zip(s.u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let err_v = back.ut.values().iter().zip(s.ut.values()).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
    assert!(err_u < 1e-7 && err_v < 1e-7, "{err_u:e} {err_v:e}");
}

#[test]
fn coupled_energy_is_conserved() {
    let q = Arc::new(solve_stationary(1).unwrap());
    let g = grid(16.0, 0.02);
    let s = gaussian_perturbation(g, 0.1, 1.0, 0.25).unwrap();
    let mut cfg = EvolutionConfig::new(Coupling::AdkinsNappi(q.clone()), 5.0);
    cfg.diagnostic_radius = 3.0;
    let out = evolve(&s, &cfg).unwrap();
    assert!(out.series.energy_drift() < 1e-6, "{:e}", out.series.energy_drift());
    // the perturbation's own energy is conserved too
    let e = &out.series.energy;
    let pert = e[0] - q.energy();
    assert!(pert > 0.0);
    assert!((e[e.len() - 1] - e[0]).abs() < 1e-3 * pert);
}

#[test]
fn free_rhs_annihilates_newton_potential() {
    let g = grid(10.0, 0.01);
    let chi = |r: f64| {
        let s = ((r - 1.0) / 1.0).clamp(0.0, 1.0);
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
            f(s) / (f(s) + f(1.0 - s))
        }
    };
    let s = data(&g, |r| chi(r) * r.max(1.0).powi(-3), |_| 0.0);
    let d = rhs(&s, &EvolutionConfig::new(Coupling::Free, 0.0)).unwrap();
    for (&r, &a) in g.nodes().iter().zip(d.ut.values()) {
        if r >= 2.05 {
            assert!(a.abs() < 1e-8, "r = {r}: {a:e}");
        }
    }
}

#[test]
fn coupled_rhs_vanishes_on_vacuum() {
    let q = Arc::new(solve_stationary(2).unwrap());
    let s = PairState::zeros(grid(5.0, 0.05), Parity::Even);
    let d = rhs(&s, &EvolutionConfig::new(Coupling::AdkinsNappi(q), 0.0)).unwrap();
    assert_eq!(d.ut.sup_norm(), 0.0);
}

#[test]
fn policies_agree_bitwise() {
    let q = Arc::new(solve_stationary(1).unwrap());
    let g = grid(20.0, 0.005);
    let s = gaussian_perturbation(g, 0.01, 1.0, 0.25).unwrap();
    let mut cfg = EvolutionConfig::new(Coupling::AdkinsNappi(q), 0.2);
    cfg.diagnostic_radius = 3.0;
    cfg.execution = Execution::Sequential;
    let a = evolve(&s, &cfg).unwrap();
    cfg.execution = Execution::Parallel;
    let b = evolve(&s, &cfg).unwrap();
    assert_eq!(a.state.u.values(), b.state.u.values());
    assert_eq!(a.series.energy, b.series.energy);
}

#[test]
fn config_is_validated() {
    let s = PairState::zeros(grid(5.0, 0.05), Parity::Even);
    let mut cfg = EvolutionConfig::new(Coupling::Free, 1.0);
    cfg.cfl = 0.8;
    assert!(matches!(evolve(&s, &cfg), Err(Error::InvalidInput(_))));
    let mut cfg = EvolutionConfig::new(Coupling::Free, 10.0);
    cfg.diagnostic_radius = 1.0;
    assert!(matches!(evolve(&s, &cfg), Err(Error::InvalidInput(_))));
    let log = Arc::new(RadialGrid::log(0.1, 5.0, 50).unwrap());
    let s = PairState::zeros(log, Parity::None);
    assert!(evolve(&s, &EvolutionConfig::new(Coupling::Free, 1.0)).is_err());
}

#[test]
fn energy_guard_aborts() {
    // a mild guard on a coarse, under-resolved pulse trips the detector
    let g = grid(30.0, 0.1);
    let s = data(&g, |r| (-(r / 0.15).powi(2)).exp(), |_| 0.0);
    let mut cfg = EvolutionConfig::new(Coupling::Free, 3.0);
    cfg.energy_guard = 1e-9;
    match evolve(&s, &cfg) {
        Err(Error::Numerical { t, .. }) => assert!((0.0..3.0).contains(&t)),
        other => panic!("expected an abort, got {:?}", other.map(|e| e.steps)),
    }
}

#[test]
fn strichartz_norm_properties() {
    let g = grid(6.0, 0.02);
    let zero = vec![(0.0, RadialField::zeros(g.clone(), Parity::Even)), (1.0, RadialField::zeros(g.clone(), Parity::Even))];
    assert_eq!(strichartz_s(&zero).unwrap(), 0.0);
    let traj: Vec<(f64, RadialField)> = (0..5)
        .map(|k| {
            let t = k as f64 * 0.25;
            (t, RadialField::from_fn(g.clone(), Parity::Even, |r| (-(r * r) * (1.0 + t)).exp()).unwrap())
        })
        .collect();
    let s1 = strichartz_s(&traj).unwrap();
    let scaled: Vec<(f64, RadialField)> = traj.iter().map(|(t, f)| (*t, f.scaled(3.0))).collect();
    assert!((strichartz_s(&scaled).unwrap() / s1 - 3.0).abs() < 1e-12);
    let bad = vec![traj[1].clone(), traj[0].clone()];
    assert!(strichartz_s(&bad).is_err());
}
