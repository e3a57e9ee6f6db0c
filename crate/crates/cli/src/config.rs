//! Flat `key = value` experiment configuration with optional `[section]` headers.
//!
//! ```text
//! # Case II sweep
//! [system]
//! case = case2
//! Omega = 0.5
//! [sweep]
//! omega_c = logspace(0.5, 10, 20)
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kcc_core::bath::BathParams;
use kcc_core::dynamics::PositivityMode;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: `{key}`: {message}")]
pub struct ConfigError {
    /// One-based line number, 0 when the offending value is a default.
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self { line, key: key.to_string(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// |+⟩ measured in the σx basis under H = (ω0/2)σz.
    Case1,
    /// |0⟩ measured in the σz basis under H = (ω0/2)σz + Ω σx.
    Case2,
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "case1" => Ok(Case::Case1),
            "case2" => Ok(Case::Case2),
            _ => Err(format!("expected case1 or case2, got `{s}`")),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Case1 => "case1",
            Case::Case2 => "case2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Rates,
    Viol,
    Nonmarkov,
    Thermo,
    Witnesses,
}

impl Group {
    pub const ALL: [Group; 5] = [Group::Rates, Group::Viol, Group::Nonmarkov, Group::Thermo, Group::Witnesses];

    pub fn name(self) -> &'static str {
        match self {
            Group::Rates => "rates",
            Group::Viol => "viol",
            Group::Nonmarkov => "nonmarkov",
            Group::Thermo => "thermo",
            Group::Witnesses => "witnesses",
        }
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown output group `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub case: Case,
    pub s: f64,
    pub alpha: f64,
    /// Bath temperature in units of ω0; β = 1/T.
    pub temperature: f64,
    pub omega0: f64,
    /// Drive strength Ω, used by Case II only.
    pub big_omega: f64,
    pub t1: f64,
    pub t2: f64,
    pub horizon: f64,
    pub omega_c_sweep: Vec<f64>,
    pub grid_steps: usize,
    pub ode_step: f64,
    pub positivity: PositivityMode,
    pub outputs: Vec<Group>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            case: Case::Case1,
            s: 1.5,
            alpha: 0.5,
            temperature: 300.0,
            omega0: 1.0,
            big_omega: 0.5,
            t1: 15.0,
            t2: 30.0,
            horizon: 30.0,
            omega_c_sweep: logspace(0.5, 10.0, 20),
            grid_steps: 3000,
            ode_step: 1e-3,
            positivity: PositivityMode::Permissive,
            outputs: Group::ALL.to_vec(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn bath(&self, omega_c: f64) -> BathParams {
        BathParams { s: self.s, alpha: self.alpha, omega_c, beta: 1.0 / self.temperature, epsilon: self.omega0 }
    }

    pub fn wants(&self, group: Group) -> bool {
        self.outputs.contains(&group)
    }

    /// Checks the cross-key invariants; `line_of` maps a key to the line that set it.
    pub fn validate_with(&self, line_of: impl Fn(&str) -> usize) -> Result<(), ConfigError> {
        let err = |key: &str, msg: String| Err(ConfigError::new(line_of(key), key, msg));
        let positive = [
            ("s", self.s),
            ("alpha", self.alpha),
            ("temperature", self.temperature),
            ("omega0", self.omega0),
            ("horizon", self.horizon),
            ("ode_step", self.ode_step),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return err(key, format!("must be positive and finite, got {v}"));
            }
        }
        if self.s <= 1.0 {
            return err("s", format!("super-Ohmic exponent must exceed 1, got {}", self.s));
        }
        if !self.big_omega.is_finite() {
            return err("Omega", "must be finite".into());
        }
        if !(self.t1 >= 0.0) {
            return err("t1", format!("must be non-negative, got {}", self.t1));
        }
        if self.t1 > self.t2 {
            let key = if line_of("t1") >= line_of("t2") { "t1" } else { "t2" };
            return err(key, format!("need t1 <= t2, got t1 = {} and t2 = {}", self.t1, self.t2));
        }
        if self.t2 > self.horizon {
            let key = if line_of("t2") >= line_of("horizon") { "t2" } else { "horizon" };
            return err(key, format!("need t2 <= horizon, got t2 = {} and horizon = {}", self.t2, self.horizon));
        }
        if self.t1 > self.horizon {
            return err("t1", format!("need t1 <= horizon = {}, got {}", self.horizon, self.t1));
        }
        if self.grid_steps < 2 {
            return err("grid_steps", format!("need at least 2 steps, got {}", self.grid_steps));
        }
        if self.omega_c_sweep.is_empty() {
            return err("omega_c", "sweep is empty".into());
        }
        if self.omega_c_sweep.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return err("omega_c", "sweep values must be positive".into());
        }
        if self.omega_c_sweep.windows(2).any(|w| w[1] <= w[0]) {
            return err("omega_c", "sweep values must be strictly increasing".into());
        }
        if self.outputs.is_empty() {
            return err("outputs", "no output groups requested".into());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with(|_| 0)
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect(),
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Parses `logspace(a, b, n)`, `linspace(a, b, n)` or a comma-separated list.
pub fn parse_sweep(value: &str) -> Result<Vec<f64>, String> {
    for (name, f) in [("logspace", logspace as fn(f64, f64, usize) -> Vec<f64>), ("linspace", linspace)] {
        if let Some(args) = value.strip_prefix(name) {
            let inner = args
                .trim()
                .strip_prefix('(')
                .and_then(|a| a.strip_suffix(')'))
                .ok_or_else(|| format!("expected {name}(start, stop, count)"))?;
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(format!("{name} takes 3 arguments, got {}", parts.len()));
            }
            let lo = parse_f64(parts[0])?;
            let hi = parse_f64(parts[1])?;
            let n = parts[2].parse::<usize>().map_err(|_| format!("expected a count, got `{}`", parts[2]))?;
            if name == "logspace" && !(lo > 0.0 && hi > 0.0) {
                return Err("logspace bounds must be positive".into());
            }
            return Ok(f(lo, hi, n));
        }
    }
    value.split(',').map(|v| parse_f64(v.trim())).collect()
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got `{v}`"))
}

const KEYS: [(&str, &str); 15] = [
    ("case", "system"),
    ("Omega", "system"),
    ("omega0", "system"),
    ("s", "bath"),
    ("alpha", "bath"),
    ("temperature", "bath"),
    ("t1", "times"),
    ("t2", "times"),
    ("horizon", "times"),
    ("grid_steps", "numerics"),
    ("ode_step", "numerics"),
    ("positivity", "numerics"),
    ("omega_c", "sweep"),
    ("outputs", "output"),
    ("out_dir", "output"),
];

/// Parses a configuration document, filling unspecified keys with defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut lines_seen: Vec<(&str, usize)> = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line_no, line, "unterminated section header"))?
                .trim();
            if !KEYS.iter().any(|&(_, s)| s == name) {
                return Err(ConfigError::new(line_no, name, "unknown section"));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::new(line_no, line, "expected `key = value`"))?;
        let &(key, home) = KEYS
            .iter()
            .find(|&&(k, _)| k == key)
            .ok_or_else(|| ConfigError::new(line_no, key, "unknown key"))?;
        if let Some(s) = &section {
            if s != home {
                return Err(ConfigError::new(line_no, key, format!("belongs in section [{home}], found in [{s}]")));
            }
        }
        if lines_seen.iter().any(|&(k, _)| k == key) {
            return Err(ConfigError::new(line_no, key, "duplicate key"));
        }
        lines_seen.push((key, line_no));
        apply(&mut cfg, key, value).map_err(|m| ConfigError::new(line_no, key, m))?;
    }
    let line_of = |key: &str| lines_seen.iter().find(|&&(k, _)| k == key).map_or(0, |&(_, l)| l);
    if cfg.case == Case::Case1 && line_of("Omega") > 0 {
        return Err(ConfigError::new(line_of("Omega"), "Omega", "drive applies to case2 only"));
    }
    cfg.validate_with(line_of)?;
    Ok(cfg)
}

/// Sets a single key from its textual value.
pub fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<(), String> {
    match key {
        "case" => cfg.case = value.parse()?,
        "Omega" => cfg.big_omega = parse_f64(value)?,
        "omega0" => cfg.omega0 = parse_f64(value)?,
        "s" => cfg.s = parse_f64(value)?,
        "alpha" => cfg.alpha = parse_f64(value)?,
        "temperature" => cfg.temperature = parse_f64(value)?,
        "t1" => cfg.t1 = parse_f64(value)?,
        "t2" => cfg.t2 = parse_f64(value)?,
        "horizon" => cfg.horizon = parse_f64(value)?,
        "grid_steps" => {
            cfg.grid_steps = value.parse().map_err(|_| format!("expected a count, got `{value}`"))?;
        }
        "ode_step" => cfg.ode_step = parse_f64(value)?,
        "positivity" => {
            cfg.positivity = match value {
                "strict" => PositivityMode::Strict,
                "permissive" => PositivityMode::Permissive,
                _ => return Err(format!("expected strict or permissive, got `{value}`")),
            }
        }
        "omega_c" => cfg.omega_c_sweep = parse_sweep(value)?,
        "outputs" => {
            let mut groups: Vec<Group> = value.split(',').map(|g| g.trim().parse()).collect::<Result<_, _>>()?;
            groups.sort();
            groups.dedup();
            cfg.outputs = groups;
        }
        "out_dir" => cfg.out_dir = PathBuf::from(value),
        _ => return Err("unknown key".into()),
    }
    Ok(())
}
