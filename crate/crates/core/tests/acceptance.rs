//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anmap::channels::{channel_ensemble, channel_experiment, newton_family, project_pi_a, random_bump_data, EnsembleOptions};
use anmap::evolution::{evolve, gaussian_perturbation, profile_residual, wavemap_residual, Coupling, EvolutionConfig};
use anmap::linearized::{count_negative_eigenvalues, potential_v, spectral_report, Threshold};
use anmap::stationary::{arctan_profile, minimize_with, ramp_profile, solve_stationary, MinimizerOptions, StationaryMap};
use anmap::{Execution, PairState, Parity, RadialField, RadialGrid};
use common::{fd_negative_count, BumpPotential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn maps() -> &'static [StationaryMap] {
    use std::sync::OnceLock;
    static MAPS: OnceLock<Vec<StationaryMap>> = OnceLock::new();
    MAPS.get_or_init(|| (0..=3).map(|n| solve_stationary(n).expect("stationary solve")).collect())
}

fn stationary_solutions() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for q in &maps()[1..] {
        let n = q.n();
        let lim = n as f64 * PI;
        let monotone = q.q_r().values().iter().all(|&d| d > 0.0);
        let bounded = q.q().values().iter().all(|&v| v > 0.0 && v < lim);
        let r = q.grid().r_max();
        let tail = (q.q().values().last().unwrap() - (lim - q.alpha() / (r * r))).abs();
        let good = q.mismatch() < 1e-9 && monotone && bounded && tail < 1e-6 && q.alpha() > 0.0 && q.beta() > 0.0;
        ok &= good;
        notes.push(format!(
            "n={n}: alpha={:.9} beta={:.9} mismatch={:.1e} tail={:.1e}",
            q.alpha(),
            q.beta(),
            q.mismatch(),
            tail
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn uniqueness_shadow() -> Outcome {
    let q = &maps()[1];
    let g = Arc::new(RadialGrid::log(1e-3, 1e2, 2900).map_err(|e| e.to_string())?);
    let mut worst = 0.0f64;
    for init in [arctan_profile(g.clone(), 1), ramp_profile(g.clone(), 1)] {
        let m = minimize_with(1, &init, &MinimizerOptions::default()).map_err(|e| e.to_string())?;
        for (&r, &v) in g.nodes().iter().zip(m.phi.values()) {
            worst = worst.max((v - q.eval(r).0).abs());
        }
    }
    Ok((worst < 1e-4, format!("sup |Q_shoot - Q_min| = {worst:.2e} over two initializations")))
}

fn pohozaev_monitor() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for q in &maps()[1..=2] {
        let w = q.pohozaev();
        let v = w.values();
        let rise = v.windows(2).map(|p| p[1] - p[0]).fold(f64::NEG_INFINITY, f64::max);
        let n = q.n() as f64;
        let gap = (v[v.len() - 1] + n * n * PI * PI).abs();
        ok &= rise <= 1e-10 && gap < 1e-3;
        notes.push(format!("n={}: max increment {rise:.1e}, |W(R)+n^2 pi^2| = {gap:.1e}", q.n()));
    }
    Ok((ok, notes.join("; ")))
}

fn degree_zero() -> Outcome {
    let q = &maps()[0];
    let qs = q.q().sup_norm();
    let vs = potential_v(q).sup_norm();
    Ok((qs <= 1e-8 && vs <= 1e-10, format!("sup|Q0| = {qs:.1e}, sup|V| = {vs:.1e}")))
}

fn spectral_claims() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for q in &maps()[1..=2] {
        let rep = spectral_report(q).map_err(|e| e.to_string())?;
        ok &= rep.negative_count == 0 && rep.threshold.classification == Threshold::Neither;
        notes.push(format!("n={}: count={} threshold={}", q.n(), rep.negative_count, rep.threshold.classification));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    let mut total_bound = 0;
    for _ in 0..20 {
        let p = BumpPotential::random(&mut rng);
        let ours = count_negative_eigenvalues(&p.field(8.0, 1600)).map_err(|e| e.to_string())?;
        let oracle = fd_negative_count(|r| p.eval(r), 8.0, 800);
        agree += usize::from(ours == oracle);
        total_bound += oracle;
    }
    ok &= agree == 20;
    notes.push(format!("FD oracle agreement {agree}/20 ({total_bound} bound states in total)"));
    Ok((ok, notes.join("; ")))
}

fn factorization() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for q in &maps()[1..=2] {
        let rep = spectral_report(q).map_err(|e| e.to_string())?;
        ok &= rep.factorization_residual < 1e-5 && rep.tilde_min >= -1e-10;
        notes.push(format!("n={}: residual {:.1e}, min tilde V {:.1e}", q.n(), rep.factorization_residual, rep.tilde_min));
    }
    Ok((ok, notes.join("; ")))
}

fn free_pulse(h: f64) -> Result<PairState, String> {
    let g = Arc::new(RadialGrid::with_origin_step(8.0, h).map_err(|e| e.to_string())?);
    let mut cfg = EvolutionConfig::new(Coupling::Free, 2.0);
    cfg.diagnostic_radius = 6.0;
    let u = RadialField::from_fn(g.clone(), Parity::Even, |r| (-r * r).exp()).map_err(|e| e.to_string())?;
    let s = PairState::new(u, RadialField::zeros(g, Parity::Even), 0.0).map_err(|e| e.to_string())?;
    Ok(evolve(&s, &cfg).map_err(|e| e.to_string())?.state)
}

fn evolution_correctness() -> Outcome {
    let q = Arc::new(maps()[1].clone());
    let g = Arc::new(RadialGrid::with_origin_step(14.0, 0.01).map_err(|e| e.to_string())?);
    let mut cfg = EvolutionConfig::new(Coupling::AdkinsNappi(q.clone()), 10.0);
    cfg.diagnostic_radius = 3.0;
    let still = evolve(&PairState::zeros(g.clone(), Parity::Even), &cfg).map_err(|e| e.to_string())?;
    let h_max = still.series.max_h_norm();

    let kicked = gaussian_perturbation(g, 0.1, 1.0, 0.25).map_err(|e| e.to_string())?;
    let run = evolve(&kicked, &cfg).map_err(|e| e.to_string())?;
    let drift = run.series.energy_drift();

    let (a, b, c) = (free_pulse(0.04)?, free_pulse(0.02)?, free_pulse(0.01)?);
    let diff = |x: &PairState, y: &PairState| {
        x.u.values().iter().zip(y.u.values().iter().step_by(2)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    };
    let order = (diff(&a, &b) / diff(&b, &c)).log2();
    Ok((
        h_max < 1e-6 && drift < 1e-5 && (3.5..=4.5).contains(&order),
        format!("Q1 data h_norm <= {h_max:.1e}; energy drift {drift:.1e} (eps = 0.1, T = 10); free order {order:.3}"),
    ))
}

fn stability_run(h: f64) -> Result<anmap::evolution::Evolution, String> {
    let q = Arc::new(maps()[1].clone());
    let g = Arc::new(RadialGrid::with_origin_step(25.0, h).map_err(|e| e.to_string())?);
    let mut cfg = EvolutionConfig::new(Coupling::AdkinsNappi(q), 20.0);
    cfg.diagnostic_radius = 3.0;
    cfg.local_radius = 2.0;
    let s = gaussian_perturbation(g, 1e-2, 1.0, 0.25).map_err(|e| e.to_string())?;
    evolve(&s, &cfg).map_err(|e| e.to_string())
}

fn stability_shadow() -> Outcome {
    let coarse = stability_run(0.02)?;
    let fine = stability_run(0.01)?;
    let s = &fine.series;
    let decay = s.local_energy.last().unwrap() / s.local_energy[0];
    let growth = s.max_h_norm() / s.h_norm[0];
    let (sc, sf) = (coarse.series.strichartz_s(), s.strichartz_s());
    let spread = (sc / sf - 1.0).abs();
    Ok((
        decay <= 0.1 && growth <= 2.0 && sf.is_finite() && spread <= 0.05,
        format!("local energy ratio {decay:.2e}; max h_norm / h_norm(0) = {growth:.3}; S = {sf:.6e} (refinement change {:.2}%)", 100.0 * spread),
    ))
}

fn channel_formulas() -> Outcome {
    let a = 2.0;
    let g = Arc::new(RadialGrid::with_origin_step(8.0, 0.005).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pyth = 0.0f64;
    for _ in 0..50 {
        let d = random_bump_data(&g, a, &mut rng).map_err(|e| e.to_string())?;
        pyth = pyth.max(project_pi_a(&d.u, &d.ut, a).map_err(|e| e.to_string())?.pythagoras_error());
    }

    let t = 3.0;
    let g = Arc::new(RadialGrid::with_origin_step(a + t + 4.0, 0.005).map_err(|e| e.to_string())?);
    let f = newton_family(&g, a).map_err(|e| e.to_string())?;
    let z = RadialField::zeros(g.clone(), Parity::Even);
    let run = |u: &RadialField, v: &RadialField| {
        let s = PairState::new(u.clone(), v.clone(), 0.0).map_err(|e| e.to_string())?;
        channel_experiment(&s, a, t, Execution::Parallel).map_err(|e| e.to_string())
    };
    let st = run(&f, &z)?;
    let mv = run(&z, &f)?;
    let mut cone = 0.0f64;
    for (i, &r) in g.nodes().iter().enumerate() {
        if r >= a + t {
            cone = cone.max((st.forward.u.values()[i] - r.powi(-3)).abs());
            cone = cone.max((mv.forward.u.values()[i] - t * r.powi(-3)).abs());
        }
    }
    let rep = channel_ensemble(&EnsembleOptions::default(), Execution::Parallel).map_err(|e| e.to_string())?;
    Ok((
        pyth < 1e-8 && cone < 1e-8 && st.degenerate() && mv.degenerate() && rep.p5 > 0.0,
        format!(
            "Pythagoras max rel. error {pyth:.1e}; cone deviation {cone:.1e}; ratio p5 = {:.4e} (min {:.4e}, {} members, seed {})",
            rep.p5,
            rep.min,
            rep.ratios.len(),
            rep.options.seed
        ),
    ))
}

fn blowup_profile() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = rng.gen_range(0.05..5.0);
        let r = rng.gen_range(0.01..10.0);
        worst = worst.max(wavemap_residual(t, r).map_err(|e| e.to_string())?.abs());
    }
    let control = profile_residual(1.0, 1.0, 2.0).map_err(|e| e.to_string())?.abs();
    Ok((worst < 1e-12 && control > 0.1, format!("max |residual| = {worst:.1e}; wrong profile {control:.3}")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("stationary solutions", stationary_solutions),
        ("uniqueness shadow", uniqueness_shadow),
        ("Pohozaev monitor", pohozaev_monitor),
        ("degree zero", degree_zero),
        ("spectral claims", spectral_claims),
        ("factorization identity", factorization),
        ("evolution correctness", evolution_correctness),
        ("asymptotic stability shadow", stability_shadow),
        ("channel formulas", channel_formulas),
        ("blow-up profile residual", blowup_profile),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} [{:>2}] {name}: {detail} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
