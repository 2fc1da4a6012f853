//! Run configuration: built-in defaults, overlaid by a flat `key = value`
//! file, overlaid by command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bands::{DEFAULT_COARSE_POINTS, DEFAULT_REFINE_TOL};
use crate::meanfield::{DriveParams, DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::model::{normalize_phase, LatticeParams};
use crate::quench::{QuenchTime, DEFAULT_TQ_FACTOR};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected csv or json, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TqRule {
    #[default]
    PerK,
    GlobalMinGap,
    Fixed,
}

impl TqRule {
    fn name(self) -> &'static str {
        match self {
            TqRule::PerK => "per-k",
            TqRule::GlobalMinGap => "global-min-gap",
            TqRule::Fixed => "fixed",
        }
    }
}

/// A value as it appears in a config file or on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Text(String),
    Number(f64),
    Integer(i64),
    Bool(bool),
    List(Vec<RawValue>),
}

impl From<&str> for RawValue {
    fn from(s: &str) -> Self {
        RawValue::Text(s.to_owned())
    }
}

/// A resolved value echoed into output metadata.
#[derive(Debug, Clone, PartialEq)]
pub enum MetaValue {
    Float(f64),
    Int(u64),
    Text(String),
    FloatList(Vec<f64>),
}

/// All numbers in emitted files use 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl fmt::Display for MetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaValue::Float(x) => f.write_str(&fmt_float(*x)),
            MetaValue::Int(n) => write!(f, "{n}"),
            MetaValue::Text(s) => f.write_str(&serde_json::to_string(s).expect("string serializes")),
            MetaValue::FloatList(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| fmt_float(*x)).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lattice: LatticeParams,
    /// Ω_d
    pub rabi: f64,
    /// G
    pub g_vacuum: f64,
    pub n_k: usize,
    pub n_t: usize,
    pub n_k_coarse: usize,
    pub refine_tol: f64,
    /// Wavenumber of `quench-trace`, in radians.
    pub kd: f64,
    /// Phases for `gap` and `quench-scan`; empty means just `lattice.phase`.
    pub thetas: Vec<f64>,
    pub tq_rule: TqRule,
    pub tq_factor: f64,
    pub t_q: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub n_steps: usize,
    // run controls, not echoed
    pub format: Format,
    pub out: Option<PathBuf>,
    pub verify: bool,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeParams::strong_hopping(),
            rabi: 1.0,
            g_vacuum: 0.001,
            n_k: 512,
            n_t: 512,
            n_k_coarse: DEFAULT_COARSE_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
            kd: 0.48 * PI,
            thetas: Vec::new(),
            tq_rule: TqRule::PerK,
            tq_factor: DEFAULT_TQ_FACTOR,
            t_q: 1.0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            damping: DEFAULT_DAMPING,
            n_steps: 1024,
            format: Format::Csv,
            out: None,
            verify: false,
            threads: 0,
        }
    }
}

/// Keys accepted in config files and as `--key value` flags.
pub const PARAM_KEYS: &[&str] = &[
    "omega_m",
    "delta",
    "J",
    "K",
    "g",
    "theta",
    "kappa",
    "Gamma",
    "gamma_m",
    "n_th",
    "Omega_d",
    "G",
    "n_k",
    "n_t",
    "n_k_coarse",
    "refine_tol",
    "kd",
    "thetas",
    "tq_rule",
    "tq_factor",
    "t_q",
    "tol",
    "max_iter",
    "damping",
    "n_steps",
];

/// Parses a number, also accepting multiples of π such as `pi`, `-pi/2`,
/// `0.8pi`, `3*pi/4`.
pub fn parse_number(key: &str, text: &str) -> Result<f64, ConfigError> {
    let s = text.trim();
    let bad = || ConfigError::new(key, format!("cannot parse `{text}` as a number"));
    let v = if let Some(pos) = s.find("pi") {
        let (coef, rest) = (s[..pos].trim_end_matches('*').trim(), &s[pos + 2..]);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let rest = rest.trim();
        let div = if rest.is_empty() {
            1.0
        } else if let Some(d) = rest.strip_prefix('/') {
            d.trim().parse::<f64>().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        c * PI / div
    } else {
        s.parse::<f64>().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("`{text}` is not finite")))
    }
}

fn as_float(key: &str, v: &RawValue) -> Result<f64, ConfigError> {
    match v {
        RawValue::Number(x) => Ok(*x),
        RawValue::Integer(n) => Ok(*n as f64),
        RawValue::Text(s) => parse_number(key, s),
        _ => Err(ConfigError::new(key, "expected a number")),
    }
}

fn as_count(key: &str, v: &RawValue) -> Result<usize, ConfigError> {
    let n = match v {
        RawValue::Integer(n) => *n,
        RawValue::Text(s) => s
            .trim()
            .parse::<i64>()
            .map_err(|_| ConfigError::new(key, format!("cannot parse `{s}` as an integer")))?,
        _ => return Err(ConfigError::new(key, "expected an integer")),
    };
    usize::try_from(n).map_err(|_| ConfigError::new(key, format!("must be non-negative, got {n}")))
}

fn as_text<'a>(key: &str, v: &'a RawValue) -> Result<&'a str, ConfigError> {
    match v {
        RawValue::Text(s) => Ok(s),
        _ => Err(ConfigError::new(key, "expected a string")),
    }
}

fn as_bool(key: &str, v: &RawValue) -> Result<bool, ConfigError> {
    match v {
        RawValue::Bool(b) => Ok(*b),
        RawValue::Text(s) => match s.trim() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(ConfigError::new(key, format!("expected true or false, got `{s}`"))),
        },
        _ => Err(ConfigError::new(key, "expected a boolean")),
    }
}

fn as_float_list(key: &str, v: &RawValue) -> Result<Vec<f64>, ConfigError> {
    match v {
        RawValue::List(items) => items.iter().map(|x| as_float(key, x)).collect(),
        RawValue::Text(s) => s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| parse_number(key, p))
            .collect(),
        other => Ok(vec![as_float(key, other)?]),
    }
}

fn from_toml(v: &toml::Value) -> RawValue {
    match v {
        toml::Value::String(s) => RawValue::Text(s.clone()),
        toml::Value::Integer(n) => RawValue::Integer(*n),
        toml::Value::Float(x) => RawValue::Number(*x),
        toml::Value::Boolean(b) => RawValue::Bool(*b),
        toml::Value::Array(a) => RawValue::List(a.iter().map(from_toml).collect()),
        other => RawValue::Text(other.to_string()),
    }
}

impl RunConfig {
    /// Applies one key. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &RawValue) -> Result<(), ConfigError> {
        let l = &mut self.lattice;
        match key {
            "omega_m" => l.omega_m = as_float(key, value)?,
            "delta" => l.detuning = as_float(key, value)?,
            "J" => l.j_hop = as_float(key, value)?,
            "K" => l.k_hop = as_float(key, value)?,
            "g" => l.coupling = as_float(key, value)?,
            "theta" => l.phase = as_float(key, value)?,
            "kappa" => l.kappa = as_float(key, value)?,
            "Gamma" | "gamma_m" => l.gamma = as_float(key, value)?,
            "n_th" => l.n_th = as_float(key, value)?,
            "Omega_d" => self.rabi = as_float(key, value)?,
            "G" => self.g_vacuum = as_float(key, value)?,
            "n_k" => self.n_k = as_count(key, value)?,
            "n_t" => self.n_t = as_count(key, value)?,
            "n_k_coarse" => self.n_k_coarse = as_count(key, value)?,
            "refine_tol" => self.refine_tol = as_float(key, value)?,
            "kd" => self.kd = as_float(key, value)?,
            "thetas" => self.thetas = as_float_list(key, value)?,
            "tq_rule" => {
                self.tq_rule = match as_text(key, value)? {
                    "per-k" => TqRule::PerK,
                    "global-min-gap" => TqRule::GlobalMinGap,
                    "fixed" => TqRule::Fixed,
                    s => {
                        return Err(ConfigError::new(
                            key,
                            format!("expected per-k, global-min-gap or fixed, got `{s}`"),
                        ))
                    }
                }
            }
            "tq_factor" => self.tq_factor = as_float(key, value)?,
            "t_q" => self.t_q = as_float(key, value)?,
            "tol" => self.tol = as_float(key, value)?,
            "max_iter" => self.max_iter = as_count(key, value)?,
            "damping" => self.damping = as_float(key, value)?,
            "n_steps" => self.n_steps = as_count(key, value)?,
            "format" => self.format = as_text(key, value)?.parse().map_err(|e| ConfigError::new(key, e))?,
            "out" => self.out = Some(PathBuf::from(as_text(key, value)?)),
            "verify" => self.verify = as_bool(key, value)?,
            "threads" => self.threads = as_count(key, value)?,
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    /// Overlays the keys of a flat TOML document.
    pub fn apply_toml_str(&mut self, text: &str) -> Result<(), ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::new("<file>", e.message().to_owned()))?;
        self.apply_table(&table)
    }

    fn apply_table(&mut self, table: &toml::Table) -> Result<(), ConfigError> {
        if table.contains_key("Gamma") && table.contains_key("gamma_m") {
            return Err(ConfigError::new(
                "gamma_m",
                "`Gamma` and `gamma_m` are aliases; give only one",
            ));
        }
        for (key, value) in table {
            if matches!(value, toml::Value::Table(_)) {
                return Err(ConfigError::new(key.as_str(), "nested tables are not supported"));
            }
            self.set(key, &from_toml(value))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        self.apply_toml_str(&text)
    }

    /// Overlays `(key, value)` pairs given as text, e.g. from flags.
    pub fn apply_pairs<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<(), ConfigError> {
        for (k, v) in pairs {
            self.set(k, &RawValue::Text(v.to_owned()))?;
        }
        Ok(())
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve<'a>(
        file: Option<&Path>,
        flags: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        cfg.apply_pairs(flags)?;
        cfg.validated()
    }

    /// Reads a configuration back from the `# key = value` header of a CSV
    /// file written by [`crate::cli::emit`].
    pub fn from_csv_metadata(text: &str) -> Result<Self, ConfigError> {
        let body: String = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim())
            .filter(|l| !(l.starts_with("tool ") || l.starts_with("command ")))
            .collect::<Vec<_>>()
            .join("\n");
        let mut cfg = Self::default();
        cfg.apply_toml_str(&body)?;
        cfg.validated()
    }

    /// Phases to sweep for multi-phase commands.
    pub fn phase_list(&self) -> Vec<f64> {
        if self.thetas.is_empty() {
            vec![self.lattice.phase]
        } else {
            self.thetas.clone()
        }
    }

    pub fn quench_time(&self) -> QuenchTime {
        match self.tq_rule {
            TqRule::PerK => QuenchTime::PerPoint { factor: self.tq_factor },
            TqRule::GlobalMinGap => QuenchTime::GlobalMinGap { factor: self.tq_factor },
            TqRule::Fixed => QuenchTime::Fixed(self.t_q),
        }
    }

    pub fn drive(&self) -> DriveParams {
        let l = &self.lattice;
        DriveParams {
            rabi: self.rabi,
            g_vacuum: self.g_vacuum,
            gamma_m: l.gamma,
            detuning: l.detuning,
            j_hop: l.j_hop,
            k_hop: l.k_hop,
            omega_m: l.omega_m,
            kappa: l.kappa,
            phase: l.phase,
        }
    }

    /// Checks every invariant; normalizes phases.
    pub fn validated(mut self) -> Result<Self, ConfigError> {
        self.lattice = self.lattice.validated().map_err(|e| match e {
            crate::Error::InvalidParameter { name, reason } => ConfigError::new(name, reason),
            other => ConfigError::new("<lattice>", other.to_string()),
        })?;
        let check = |ok: bool, key: &str, msg: &str| if ok { Ok(()) } else { Err(ConfigError::new(key, msg)) };
        check(
            self.rabi.is_finite() && self.rabi >= 0.0,
            "Omega_d",
            "must be finite and >= 0",
        )?;
        check(
            self.g_vacuum.is_finite() && self.g_vacuum >= 0.0,
            "G",
            "must be finite and >= 0",
        )?;
        check(self.n_k >= 2, "n_k", "must be at least 2")?;
        check(self.n_t >= 2, "n_t", "must be at least 2")?;
        check(self.n_k_coarse >= 64, "n_k_coarse", "must be at least 64")?;
        check(self.refine_tol > 0.0, "refine_tol", "must be > 0")?;
        check(self.kd.abs() <= PI * (1.0 + 1e-12), "kd", "must lie in [-pi, pi]")?;
        check(self.tq_factor > 0.0, "tq_factor", "must be > 0")?;
        check(self.t_q > 0.0, "t_q", "must be > 0")?;
        check(self.tol > 0.0, "tol", "must be > 0")?;
        check(
            self.damping > 0.0 && self.damping <= 1.0,
            "damping",
            "must lie in (0, 1]",
        )?;
        check(self.n_steps >= 16, "n_steps", "must be at least 16")?;
        self.thetas = self.thetas.iter().map(|&t| normalize_phase(t)).collect();
        Ok(self)
    }

    /// The resolved physics and grid settings, in a fixed order.
    pub fn metadata(&self) -> Vec<(String, MetaValue)> {
        use MetaValue::*;
        let l = &self.lattice;
        let pairs: Vec<(&str, MetaValue)> = vec![
            ("omega_m", Float(l.omega_m)),
            ("delta", Float(l.detuning)),
            ("J", Float(l.j_hop)),
            ("K", Float(l.k_hop)),
            ("g", Float(l.coupling)),
            ("theta", Float(l.phase)),
            ("kappa", Float(l.kappa)),
            ("Gamma", Float(l.gamma)),
            ("n_th", Float(l.n_th)),
            ("Omega_d", Float(self.rabi)),
            ("G", Float(self.g_vacuum)),
            ("n_k", Int(self.n_k as u64)),
            ("n_t", Int(self.n_t as u64)),
            ("n_k_coarse", Int(self.n_k_coarse as u64)),
            ("refine_tol", Float(self.refine_tol)),
            ("kd", Float(self.kd)),
            ("thetas", FloatList(self.thetas.clone())),
            ("tq_rule", Text(self.tq_rule.name().to_owned())),
            ("tq_factor", Float(self.tq_factor)),
            ("t_q", Float(self.t_q)),
            ("tol", Float(self.tol)),
            ("max_iter", Int(self.max_iter as u64)),
            ("damping", Float(self.damping)),
            ("n_steps", Int(self.n_steps as u64)),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
    }

    /// Copy with the run controls reset, for comparing physics settings.
    pub fn without_controls(&self) -> Self {
        let d = Self::default();
        Self {
            format: d.format,
            out: d.out,
            verify: d.verify,
            threads: d.threads,
            ..self.clone()
        }
    }
}
