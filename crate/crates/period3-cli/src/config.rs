//! Flat `key = value` run configuration. Blank lines and `#` comments are
//! ignored; list values are comma separated. Command-line flags override
//! file values.

use period3::ModelParams;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const FIGURES: [&str; 11] =
    ["fig1d", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig12", "fig13"];
pub const SWEEP_OPS: [&str; 5] = ["activation_energy", "nonlocality", "harmonic", "kappa_b", "slow_mode"];

/// Keys accepted in a config file, with their meaning.
pub const KEYS: [(&str, &str); 17] = [
    ("f", "scaled drive amplitude, 0 <= f <= 10"),
    ("lambda", "scaled Planck constant, 0 < lambda <= 1"),
    ("kappa", "scaled decay rate, >= 0"),
    ("nbar", "bath Planck number, >= 0"),
    ("sign_delta", "sign of the detuning, 1 or -1"),
    ("g_points", "points on RWA-energy grids, 2..=10000"),
    ("f_points", "points on drive grids, 2..=10000"),
    ("kappa_points", "points on damping grids, 2..=10000"),
    ("n_max", "Fock truncation, 3..=20000"),
    ("seed", "RNG seed, unsigned integer"),
    ("trajectories", "Monte Carlo ensemble size, >= 1"),
    ("out", "output directory"),
    ("figure", "figure id"),
    ("sweep_op", "operation evaluated at each sweep point"),
    ("sweep_f", "comma-separated f values"),
    ("sweep_nbar", "comma-separated nbar values"),
    ("sweep_kappa", "comma-separated kappa values"),
];

fn accepted_keys() -> String {
    KEYS.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("[E_UNKNOWN_KEY] unknown key `{0}`; accepted keys: {keys}", keys = accepted_keys())]
    UnknownKey(String),
    #[error("[E_RANGE] `{key}` = {value}: {rule}")]
    Range { key: String, value: String, rule: String },
    #[error("[E_MISSING] required field `{0}` not set")]
    Missing(String),
    #[error("[E_SYNTAX] line {line}: {text}")]
    Syntax { line: usize, text: String },
    #[error("[E_IO] {0}")]
    Io(String),
}

impl ConfigError {
    /// Stable identifier of the failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::UnknownKey(_) => "E_UNKNOWN_KEY",
            ConfigError::Range { .. } => "E_RANGE",
            ConfigError::Missing(_) => "E_MISSING",
            ConfigError::Syntax { .. } => "E_SYNTAX",
            ConfigError::Io(_) => "E_IO",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub f: Option<f64>,
    pub lambda: Option<f64>,
    pub kappa: Option<f64>,
    pub nbar: Option<f64>,
    pub sign_delta: Option<f64>,
    pub g_points: Option<usize>,
    pub f_points: Option<usize>,
    pub kappa_points: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub trajectories: Option<usize>,
    pub out: Option<PathBuf>,
    pub figure: Option<String>,
    pub sweep_op: Option<String>,
    pub sweep_f: Option<Vec<f64>>,
    pub sweep_nbar: Option<Vec<f64>>,
    pub sweep_kappa: Option<Vec<f64>>,
}

fn range(key: &str, value: &str, rule: &str) -> ConfigError {
    ConfigError::Range { key: key.into(), value: value.into(), rule: rule.into() }
}

fn real(key: &str, v: &str, ok: impl Fn(f64) -> bool, rule: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.trim().parse().map_err(|_| range(key, v, "not a number"))?;
    if x.is_finite() && ok(x) {
        Ok(x)
    } else {
        Err(range(key, v, rule))
    }
}

fn count(key: &str, v: &str, lo: usize, hi: usize) -> Result<usize, ConfigError> {
    let n: usize = v.trim().parse().map_err(|_| range(key, v, "not an unsigned integer"))?;
    if (lo..=hi).contains(&n) {
        Ok(n)
    } else {
        Err(range(key, v, &format!("must lie in {lo}..={hi}")))
    }
}

fn list(key: &str, v: &str, ok: impl Fn(f64) -> bool + Copy, rule: &str) -> Result<Vec<f64>, ConfigError> {
    let xs = v.split(',').map(|s| real(key, s, ok, rule)).collect::<Result<Vec<_>, _>>()?;
    if xs.is_empty() {
        return Err(range(key, v, "empty list"));
    }
    Ok(xs)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "f" => self.f = Some(real(key, v, |x| (0.0..=10.0).contains(&x), "must lie in [0, 10]")?),
            "lambda" => self.lambda = Some(real(key, v, |x| x > 0.0 && x <= 1.0, "must lie in (0, 1]")?),
            "kappa" => self.kappa = Some(real(key, v, |x| x >= 0.0, "must be >= 0")?),
            "nbar" => self.nbar = Some(real(key, v, |x| x >= 0.0, "must be >= 0")?),
            "sign_delta" => self.sign_delta = Some(real(key, v, |x| x == 1.0 || x == -1.0, "must be 1 or -1")?),
            "g_points" => self.g_points = Some(count(key, v, 2, 10_000)?),
            "f_points" => self.f_points = Some(count(key, v, 2, 10_000)?),
            "kappa_points" => self.kappa_points = Some(count(key, v, 2, 10_000)?),
            "n_max" => self.n_max = Some(count(key, v, 3, 20_000)?),
            "seed" => self.seed = Some(v.parse().map_err(|_| range(key, v, "not an unsigned integer"))?),
            "trajectories" => self.trajectories = Some(count(key, v, 1, 100_000_000)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "figure" => {
                if !FIGURES.contains(&v) {
                    return Err(range(key, v, &format!("must be one of {}", FIGURES.join(", "))));
                }
                self.figure = Some(v.into());
            }
            "sweep_op" => {
                if !SWEEP_OPS.contains(&v) {
                    return Err(range(key, v, &format!("must be one of {}", SWEEP_OPS.join(", "))));
                }
                self.sweep_op = Some(v.into());
            }
            "sweep_f" => {
                self.sweep_f = Some(list(key, v, |x| (0.0..=10.0).contains(&x), "entries must lie in [0, 10]")?)
            }
            "sweep_nbar" => self.sweep_nbar = Some(list(key, v, |x| x >= 0.0, "entries must be >= 0")?),
            "sweep_kappa" => self.sweep_kappa = Some(list(key, v, |x| x >= 0.0, "entries must be >= 0")?),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.into() });
            };
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Values set in `other` replace ours.
    pub fn merge(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => { $( if other.$field.is_some() { self.$field = other.$field; } )* };
        }
        take!(
            f,
            lambda,
            kappa,
            nbar,
            sign_delta,
            g_points,
            f_points,
            kappa_points,
            n_max,
            seed,
            trajectories,
            out,
            figure,
            sweep_op,
            sweep_f,
            sweep_nbar,
            sweep_kappa
        );
        self
    }

    /// Fills unset model fields from `defaults`.
    pub fn with_defaults(self, defaults: &RunConfig) -> Self {
        defaults.clone().merge(self)
    }

    fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
        v.ok_or_else(|| ConfigError::Missing(key.into()))
    }

    /// Model parameters; f, lambda, kappa and nbar are required.
    pub fn model(&self) -> Result<ModelParams, ConfigError> {
        let f = Self::need(self.f, "f")?;
        let lambda = Self::need(self.lambda, "lambda")?;
        let kappa = Self::need(self.kappa, "kappa")?;
        let nbar = Self::need(self.nbar, "nbar")?;
        let s = self.sign_delta.unwrap_or(1.0);
        ModelParams::new(f, lambda, kappa, nbar, s).map_err(|e| range("model", "", &e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

impl fmt::Display for RunConfig {
    /// One `key=value` per set field, in schema order.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &Vec<f64>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut parts: Vec<String> = Vec::new();
        macro_rules! show {
            ($($field:ident),*) => { $( if let Some(v) = &self.$field { parts.push(format!("{}={}", stringify!($field), v)); } )* };
        }
        show!(f, lambda, kappa, nbar, sign_delta, g_points, f_points, kappa_points, n_max, seed, trajectories);
        if let Some(v) = &self.out {
            parts.push(format!("out={}", v.display()));
        }
        show!(figure, sweep_op);
        for (k, v) in [("sweep_f", &self.sweep_f), ("sweep_nbar", &self.sweep_nbar), ("sweep_kappa", &self.sweep_kappa)]
        {
            if let Some(v) = v {
                parts.push(format!("{k}={}", join(v)));
            }
        }
        write!(out, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_valid() {
        let cfg = RunConfig::parse_str("f = 0.5\nlambda = 0.004\nkappa = 0.01\nnbar = 0  # cold\n").unwrap();
        let m = cfg.model().unwrap();
        assert_eq!((m.f, m.lambda, m.kappa, m.nbar, m.sign_delta), (0.5, 0.004, 0.01, 0.0, 1.0));
    }

    #[test]
    fn errors_are_distinguished() {
        assert_eq!(RunConfig::parse_str("nbar = -0.1").unwrap_err().code(), "E_RANGE");
        assert_eq!(RunConfig::parse_str("temperature = 1").unwrap_err().code(), "E_UNKNOWN_KEY");
        assert_eq!(RunConfig::parse_str("f 0.5").unwrap_err().code(), "E_SYNTAX");
        let cfg = RunConfig::parse_str("f = 0.5\nlambda = 0.004\nkappa = 0.01").unwrap();
        assert_eq!(cfg.model().unwrap_err(), ConfigError::Missing("nbar".into()));
    }

    #[test]
    fn overrides_win() {
        let file = RunConfig::parse_str("f = 0.5\nlambda = 0.004\nkappa = 0.01\nnbar = 0").unwrap();
        let mut flags = RunConfig::default();
        flags.set("nbar", "0.05").unwrap();
        assert_eq!(file.merge(flags).model().unwrap().nbar, 0.05);
    }

    #[test]
    fn display_round_trips() {
        let cfg = RunConfig::parse_str("f=0.5\nlambda=0.004\nsweep_f=0.1,0.2\nfigure=fig7").unwrap();
        let text = cfg.to_string().replace(' ', "\n");
        assert_eq!(RunConfig::parse_str(&text).unwrap(), cfg);
    }
}
