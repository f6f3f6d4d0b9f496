//! `anmap`: command-line driver for the stationary, spectral, evolution and
//! channel experiments.

mod config;
mod output;
mod scenarios;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{RunConfig, Scenario, OUT_ENV};
use output::{Meta, Sink, TOOL, VERSION};
use scenarios::{Check, RunError};

const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "anmap", version, about = "Stationary Adkins-Nappi maps and their stability experiments")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $ANMAP_OUT_DIR, then ./anmap-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for Q_n and check its monotonicity, asymptotics and Pohozaev quantity.
    Stationary(Params),
    /// Spectral checks of the linearized operator around Q_n.
    Spectrum(Params),
    /// Evolve a Gaussian perturbation (around Q_n, or free).
    Evolve(Params),
    /// Small-data stability run around Q_n.
    Stability(Params),
    /// Exterior-energy channel experiments on random data.
    Channels(Params),
    /// Residual of the self-similar wave-map profile 2 arctan(r/t).
    BlowupResidual(Params),
    /// Stability runs over a list of amplitudes, in parallel.
    Sweep(Params),
}

/// Overrides for configuration keys; see `KEYS` in the config module.
#[derive(Args, Default)]
struct Params {
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r_max: Option<String>,
    #[arg(long)]
    coupling: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    local_radius: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    energy_tol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    members: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sweep_eps: Option<String>,
    #[arg(long)]
    minimize: Option<String>,
    #[arg(long)]
    execution: Option<String>,
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    json: Option<String>,
    #[arg(long)]
    snapshots: Option<String>,
}

impl Params {
    fn into_map(self) -> BTreeMap<String, String> {
        let Params {
            n, h, dt, t_final, r_max, coupling, eps, r0, sigma, local_radius, energy_tol, a, members, samples,
            sweep_eps, minimize, execution, csv, json, snapshots,
        } = self;
        [
            ("n", n), ("h", h), ("dt", dt), ("t_final", t_final), ("r_max", r_max), ("coupling", coupling),
            ("eps", eps), ("r0", r0), ("sigma", sigma), ("local_radius", local_radius), ("energy_tol", energy_tol),
            ("a", a), ("members", members), ("samples", samples), ("sweep_eps", sweep_eps),
            ("minimize", minimize), ("execution", execution), ("csv", csv), ("json", json), ("snapshots", snapshots),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }
}

#[derive(Serialize)]
struct Report<'a> {
    status: &'static str,
    error: Option<String>,
    checks: &'a [Check],
    files: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, params) = match cli.command {
        Command::Stationary(p) => (Scenario::Stationary, p),
        Command::Spectrum(p) => (Scenario::Spectrum, p),
        Command::Evolve(p) => (Scenario::Evolve, p),
        Command::Stability(p) => (Scenario::Stability, p),
        Command::Channels(p) => (Scenario::Channels, p),
        Command::BlowupResidual(p) => (Scenario::BlowupResidual, p),
        Command::Sweep(p) => (Scenario::Sweep, p),
    };
    let mut flags = params.into_map();
    if let Some(out) = cli.out {
        flags.insert("out".into(), out.display().to_string());
    }
    if let Some(seed) = cli.seed {
        flags.insert("seed".into(), seed.to_string());
    }
    let file = match &cli.config {
        Some(path) => match config::parse_file(path) {
            Ok(m) => m,
            Err(e) => return usage(e),
        },
        None => BTreeMap::new(),
    };
    let cfg = match RunConfig::resolve(scenario, file, flags, std::env::var(OUT_ENV).ok()) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };

    let meta = Meta {
        tool: TOOL,
        version: VERSION,
        scenario: scenario.to_string(),
        grid: String::new(),
        config: cfg.echo.clone(),
    };
    let mut sink = match Sink::new(&cfg.out, meta, cfg.csv, cfg.json) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cfg.out.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let result = scenarios::run(&cfg, &mut sink);
    let files = |s: &Sink| s.written().iter().map(|p| p.display().to_string()).collect::<Vec<_>>();
    let (code, status, error, checks) = match result {
        Ok(checks) => {
            let failed = checks.iter().any(Check::failed);
            (if failed { EXIT_ASSERTION } else { 0 }, if failed { "fail" } else { "pass" }, None, checks)
        }
        Err(e) => {
            let code = match e {
                RunError::Usage(_) => EXIT_USAGE,
                RunError::Numerical(_) => EXIT_NUMERICAL,
                RunError::Io(_) => EXIT_NUMERICAL,
            };
            eprintln!("error: {e}");
            (code, if code == EXIT_USAGE { "usage" } else { "numerical" }, Some(e.to_string()), Vec::new())
        }
    };
    for c in &checks {
        let tag = match (c.pass, c.enforced) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        println!("{tag} {} = {:.6e} ({} {:e})", c.name, c.value, c.relation, c.limit);
    }
    let listed = files(&sink);
    if let Err(e) = sink.report(&Report { status, error, checks: &checks, files: listed }) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    for f in sink.written() {
        println!("wrote {}", f.display());
    }
    ExitCode::from(code)
}

fn usage(e: config::ConfigError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_USAGE)
}
