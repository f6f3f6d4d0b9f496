//! Flat `key = value` run configuration.
//!
//! Values are resolved in order: built-in default, `ANMAP_OUT_DIR` (for
//! `out` only), config file, command-line flag. Every value is kept as text
//! until the whole set is known, then parsed and validated in one place so
//! that a bad value is reported the same way wherever it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anmap::Execution;
use thiserror::Error;

pub const OUT_ENV: &str = "ANMAP_OUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("missing required key `{0}`")]
    Missing(String),
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Stationary,
    Spectrum,
    Evolve,
    Stability,
    Channels,
    BlowupResidual,
    Sweep,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Stationary => "stationary",
            Scenario::Spectrum => "spectrum",
            Scenario::Evolve => "evolve",
            Scenario::Stability => "stability",
            Scenario::Channels => "channels",
            Scenario::BlowupResidual => "blowup-residual",
            Scenario::Sweep => "sweep",
        })
    }
}

/// Every key the configuration understands, with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("n", "degree, or comma-separated degrees"),
    ("h", "evolution grid step"),
    ("dt", "time step (default h/2, at most h/2)"),
    ("t_final", "final time"),
    ("r_max", "outer radius of the evolution grid (default: padded)"),
    ("coupling", "`an` (around Q_n) or `free`"),
    ("eps", "amplitude of the Gaussian perturbation"),
    ("r0", "centre of the Gaussian perturbation"),
    ("sigma", "width of the Gaussian perturbation"),
    ("local_radius", "radius A of the local energy"),
    ("energy_tol", "allowed relative energy drift"),
    ("a", "cut radius of the exterior region"),
    ("members", "size of the random channel ensemble"),
    ("samples", "random (t, r) points for blowup-residual"),
    ("sweep_eps", "comma-separated amplitudes for sweep"),
    ("minimize", "cross-check stationary maps with the minimizer"),
    ("execution", "`parallel` or `sequential`"),
    ("seed", "random seed"),
    ("out", "output directory"),
    ("csv", "write CSV series"),
    ("json", "write JSON summaries"),
    ("snapshots", "write evolution snapshots"),
];

fn defaults(scenario: Scenario) -> BTreeMap<String, String> {
    let t_final = match scenario {
        Scenario::Channels => "6",
        Scenario::Evolve => "10",
        _ => "20",
    };
    let h = match scenario {
        Scenario::Channels | Scenario::Evolve => "0.01",
        _ => "0.02",
    };
    let eps = match scenario {
        Scenario::Evolve => "0.1",
        _ => "0.01",
    };
    [
        ("h", h),
        ("t_final", t_final),
        ("coupling", "an"),
        ("eps", eps),
        ("r0", "1"),
        ("sigma", "0.25"),
        ("local_radius", "2"),
        ("energy_tol", "1e-5"),
        ("a", "2"),
        ("members", "50"),
        ("samples", "100"),
        ("sweep_eps", "0.001,0.003,0.01,0.03,0.1,0.3"),
        ("minimize", "true"),
        ("execution", "parallel"),
        ("seed", "24301"),
        ("out", "anmap-out"),
        ("csv", "true"),
        ("json", "true"),
        ("snapshots", "false"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// Reads a `key = value` file; `#` starts a comment.
pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_text(&text, path)
}

pub fn parse_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { path: path.into(), line: k + 1 })?;
        let key = key.trim();
        check_key(key)?;
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub fn check_key(key: &str) -> Result<(), ConfigError> {
    if KEYS.iter().any(|(k, _)| *k == key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    An,
    Free,
}

/// A fully resolved and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub n: Vec<u32>,
    pub h: f64,
    pub dt: f64,
    pub t_final: f64,
    pub r_max: f64,
    pub coupling: CouplingKind,
    pub eps: f64,
    pub r0: f64,
    pub sigma: f64,
    pub local_radius: f64,
    pub energy_tol: f64,
    pub a: f64,
    pub members: usize,
    pub samples: usize,
    pub sweep_eps: Vec<f64>,
    pub minimize: bool,
    pub execution: Execution,
    pub seed: u64,
    pub out: PathBuf,
    pub csv: bool,
    pub json: bool,
    pub snapshots: bool,
    /// The resolved values as text, in key order, for the output headers.
    pub echo: BTreeMap<String, String>,
}

fn number<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|e| invalid(key, format!("`{v}`: {e}"))))
        .transpose()
}

fn require<T>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::Missing(key.into()))
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("{v} must be positive and finite")))
    }
}

fn boolean(map: &BTreeMap<String, String>, key: &str) -> Result<bool, ConfigError> {
    match map.get(key).map(|s| s.as_str()) {
        Some("true" | "1" | "yes") => Ok(true),
        Some("false" | "0" | "no") | None => Ok(false),
        Some(other) => Err(invalid(key, format!("`{other}` is not a boolean"))),
    }
}

fn list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| invalid(key, format!("`{s}`: {e}"))))
        .collect()
}

/// Largest degree accepted; beyond it the default search box is not known to bracket `α`, `β`.
pub const MAX_DEGREE: u32 = 8;

impl RunConfig {
    /// Merges the layers and validates the result.
    pub fn resolve(
        scenario: Scenario,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
        env_out: Option<String>,
    ) -> Result<Self, ConfigError> {
        let mut map = defaults(scenario);
        if let Some(out) = env_out.filter(|s| !s.is_empty()) {
            map.insert("out".into(), out);
        }
        for (k, v) in file.into_iter().chain(flags) {
            check_key(&k)?;
            map.insert(k, v);
        }

        let needs_n = !matches!(scenario, Scenario::Channels | Scenario::BlowupResidual);
        let n = match map.get("n") {
            Some(text) => {
                let v: Vec<i64> = list("n", text)?;
                if v.is_empty() {
                    return Err(invalid("n", "no degree given"));
                }
                v.into_iter()
                    .map(|d| {
                        if (0..=MAX_DEGREE as i64).contains(&d) {
                            Ok(d as u32)
                        } else {
                            Err(invalid("n", format!("degree {d} outside 0..={MAX_DEGREE}")))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            None if needs_n && !(scenario == Scenario::Evolve && map.get("coupling").map(|s| s.as_str()) == Some("free")) => {
                return Err(ConfigError::Missing("n".into()))
            }
            None => Vec::new(),
        };

        let h = positive("h", require(number(&map, "h")?, "h")?)?;
        let dt = match number::<f64>(&map, "dt")? {
            Some(dt) => {
                let dt = positive("dt", dt)?;
                if dt > 0.5 * h * (1.0 + 1e-12) {
                    return Err(invalid("dt", format!("dt = {dt} exceeds h/2 = {}", 0.5 * h)));
                }
                dt
            }
            None => 0.5 * h,
        };
        let t_final = positive("t_final", require(number(&map, "t_final")?, "t_final")?)?;
        let coupling = match map.get("coupling").map(|s| s.as_str()) {
            Some("an") => CouplingKind::An,
            Some("free") => CouplingKind::Free,
            Some(other) => return Err(invalid("coupling", format!("`{other}` is not `an` or `free`"))),
            None => return Err(ConfigError::Missing("coupling".into())),
        };
        let eps: f64 = require(number(&map, "eps")?, "eps")?;
        if !eps.is_finite() {
            return Err(invalid("eps", "must be finite"));
        }
        let r0: f64 = require(number(&map, "r0")?, "r0")?;
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(invalid("r0", format!("{r0} must be non-negative")));
        }
        let sigma = positive("sigma", require(number(&map, "sigma")?, "sigma")?)?;
        let local_radius = positive("local_radius", require(number(&map, "local_radius")?, "local_radius")?)?;
        let energy_tol = positive("energy_tol", require(number(&map, "energy_tol")?, "energy_tol")?)?;
        let a = positive("a", require(number(&map, "a")?, "a")?)?;
        let members: usize = require(number(&map, "members")?, "members")?;
        if members == 0 {
            return Err(invalid("members", "must be at least 1"));
        }
        let samples: usize = require(number(&map, "samples")?, "samples")?;
        if samples == 0 {
            return Err(invalid("samples", "must be at least 1"));
        }
        let sweep_eps: Vec<f64> = list("sweep_eps", map.get("sweep_eps").map(|s| s.as_str()).unwrap_or(""))?;
        if scenario == Scenario::Sweep && sweep_eps.is_empty() {
            return Err(ConfigError::Missing("sweep_eps".into()));
        }
        let execution = match map.get("execution").map(|s| s.as_str()) {
            Some("parallel") => Execution::Parallel,
            Some("sequential") => Execution::Sequential,
            Some(other) => return Err(invalid("execution", format!("`{other}` is not `parallel` or `sequential`"))),
            None => Execution::default(),
        };
        let seed: u64 = require(number(&map, "seed")?, "seed")?;
        let out = PathBuf::from(require(map.get("out").cloned(), "out")?);

        // the support of the initial bump plus its causal future
        let support = r0 + 4.0 * sigma;
        let needed = match scenario {
            Scenario::Channels => 2.0 * a + t_final + 2.0,
            _ => support.max(local_radius) + t_final + 1.0,
        };
        let r_max = match number::<f64>(&map, "r_max")? {
            Some(r) => {
                let r = positive("r_max", r)?;
                if r < needed {
                    return Err(invalid("r_max", format!("{r} is below the padded radius {needed}")));
                }
                r
            }
            None => needed,
        };
        if r_max / h > 5e6 {
            return Err(invalid("h", format!("{} grid points is too many", (r_max / h) as u64)));
        }

        let minimize = boolean(&map, "minimize")?;
        let csv = boolean(&map, "csv")?;
        let json = boolean(&map, "json")?;
        let snapshots = boolean(&map, "snapshots")?;

        let mut echo = map;
        echo.insert("dt".into(), format!("{dt}"));
        echo.insert("r_max".into(), format!("{r_max}"));
        Ok(Self {
            scenario,
            n,
            h,
            dt,
            t_final,
            r_max,
            coupling,
            eps,
            r0,
            sigma,
            local_radius,
            energy_tol,
            a,
            members,
            samples,
            sweep_eps,
            minimize,
            execution,
            seed,
            out,
            csv,
            json,
            snapshots,
            echo,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn empty_file_and_flags() {
        let file = parse_text("", Path::new("empty.conf")).unwrap();
        let cfg = RunConfig::resolve(Scenario::Stability, file, flags(&[("n", "1"), ("eps", "1e-2")]), None).unwrap();
        assert_eq!(cfg.n, vec![1]);
        assert_eq!(cfg.dt, 0.01);
    }

    #[test]
    fn negative_degree_names_n() {
        let file = parse_text("n = -1\n", Path::new("c")).unwrap();
        let err = RunConfig::resolve(Scenario::Stationary, file, BTreeMap::new(), None).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "n"), "{err}");
    }

    #[test]
    fn flag_beats_file() {
        let file = parse_text("n = 1\ndt = 0.01 # coarse\n", Path::new("c")).unwrap();
        let cfg = RunConfig::resolve(Scenario::Evolve, file, flags(&[("dt", "0.005")]), None).unwrap();
        assert_eq!(cfg.dt, 0.005);
    }

    #[test]
    fn unknown_and_malformed() {
        assert!(matches!(parse_text("colour = red", Path::new("c")), Err(ConfigError::UnknownKey(k)) if k == "colour"));
        assert!(matches!(parse_text("n 1", Path::new("c")), Err(ConfigError::Syntax { line: 1, .. })));
        let err = RunConfig::resolve(Scenario::Evolve, flags(&[("n", "1"), ("h", "abc")]), BTreeMap::new(), None);
        assert!(matches!(err, Err(ConfigError::Invalid { key, .. }) if key == "h"));
    }

    #[test]
    fn missing_degree() {
        let err = RunConfig::resolve(Scenario::Spectrum, BTreeMap::new(), BTreeMap::new(), None).unwrap_err();
        assert!(matches!(err, ConfigError::Missing(k) if k == "n"));
    }

    #[test]
    fn output_directory_layers() {
        let base = flags(&[("n", "1")]);
        let env = RunConfig::resolve(Scenario::Stationary, base.clone(), BTreeMap::new(), Some("from-env".into())).unwrap();
        assert_eq!(env.out, PathBuf::from("from-env"));
        let flag = RunConfig::resolve(Scenario::Stationary, base, flags(&[("out", "from-flag")]), Some("from-env".into())).unwrap();
        assert_eq!(flag.out, PathBuf::from("from-flag"));
    }

    #[test]
    fn cfl_and_padding_are_checked() {
        let base = flags(&[("n", "1"), ("h", "0.02"), ("dt", "0.02")]);
        assert!(matches!(RunConfig::resolve(Scenario::Evolve, base, BTreeMap::new(), None), Err(ConfigError::Invalid { key, .. }) if key == "dt"));
        let base = flags(&[("n", "1"), ("r_max", "5")]);
        assert!(matches!(RunConfig::resolve(Scenario::Evolve, base, BTreeMap::new(), None), Err(ConfigError::Invalid { key, .. }) if key == "r_max"));
    }
}
