//! Scenario files: a scenario name, its parameters and run settings.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use collapse_core::linalg::Complex64;
use collapse_core::spacetime::SpacetimePoint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown scenario {name:?}; valid names: {}", SCENARIOS.join(", "))]
    UnknownScenario { name: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Core(#[from] collapse_core::Error),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

pub const SCENARIOS: [&str; 10] =
    ["tz", "t2", "signaling", "grw", "csl", "toy-one", "toy-two", "toy-stats", "counterfactual", "relativistic-t2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    /// Trace destination; `-` is stdout.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub params: toml::Table,
}

impl FromStr for ScenarioFile {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }
}

impl ScenarioFile {
    pub fn new(scenario: &str) -> Result<Self> {
        let file =
            Self { scenario: scenario.to_string(), seed: None, trials: None, output: None, params: toml::Table::new() };
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        text.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(ConfigError::UnknownScenario { name: self.scenario.clone() });
        }
        if self.trials == Some(0) {
            return Err(field("trials", "must be positive"));
        }
        Ok(())
    }

    pub fn params(&self) -> Params<'_> {
        Params(&self.params)
    }

    /// Every scenario draws random numbers except a forced relativistic
    /// run and the counterfactual classifier.
    pub fn seed_required(&self) -> bool {
        !matches!(self.scenario.as_str(), "counterfactual")
            && !(self.scenario == "relativistic-t2" && self.params.contains_key("forced"))
    }
}

pub fn field(name: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: name.to_string(), message: message.into() }
}

/// Typed access to the `[params]` table.
#[derive(Debug, Clone, Copy)]
pub struct Params<'a>(pub &'a toml::Table);

impl<'a> Params<'a> {
    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => as_f64(v).ok_or_else(|| field(key, "expected a number")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(_) => Err(field(key, "expected a non-negative integer")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.0.get(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(field(key, "expected true or false")),
        }
    }

    pub fn str_or(&self, key: &str, default: &'a str) -> Result<&'a str> {
        match self.0.get(key) {
            None => Ok(default),
            Some(toml::Value::String(s)) => Ok(s),
            Some(_) => Err(field(key, "expected a string")),
        }
    }

    /// `[x, t]`.
    pub fn point_or(&self, key: &str, default: SpacetimePoint) -> Result<SpacetimePoint> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => point(v).ok_or_else(|| field(key, "expected [x, t]")),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| as_f64(v).ok_or_else(|| field(key, "expected numbers")))
                .collect::<Result<_>>()
                .map(Some),
            Some(_) => Err(field(key, "expected an array of numbers")),
        }
    }

    /// Numbers are real amplitudes; `[re, im]` pairs are complex.
    pub fn amplitudes(&self, key: &str) -> Result<Option<Vec<Complex64>>> {
        let Some(v) = self.0.get(key) else { return Ok(None) };
        let toml::Value::Array(items) = v else { return Err(field(key, "expected an array of amplitudes")) };
        items
            .iter()
            .map(|item| match item {
                toml::Value::Array(pair) if pair.len() == 2 => match (as_f64(&pair[0]), as_f64(&pair[1])) {
                    (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(field(key, "amplitude pairs must be numbers")),
                },
                other => as_f64(other)
                    .map(|re| Complex64::new(re, 0.0))
                    .ok_or_else(|| field(key, "expected a number or [re, im]")),
            })
            .collect::<Result<_>>()
            .map(Some)
    }

    pub fn table_list(&self, key: &str) -> Result<Vec<Params<'a>>> {
        match self.0.get(key) {
            None => Ok(Vec::new()),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| v.as_table().map(Params).ok_or_else(|| field(key, "expected an array of tables")))
                .collect(),
            Some(_) => Err(field(key, "expected an array of tables")),
        }
    }

    pub fn get(&self, key: &str) -> Option<&'a toml::Value> {
        self.0.get(key)
    }
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(f) => Some(*f),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

pub fn point(v: &toml::Value) -> Option<SpacetimePoint> {
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    Some(SpacetimePoint::new(as_f64(&a[0])?, as_f64(&a[1])?))
}

/// `"a,b,c"` with each entry in {−1, 0, 1}.
pub fn parse_triple(text: &str) -> Result<[i8; 3]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(field("forced", format!("expected three comma-separated values, got {text:?}")));
    }
    let mut out = [0i8; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        let v: i8 = p.parse().map_err(|_| field("forced", format!("{p:?} is not an integer")))?;
        if !(-1..=1).contains(&v) {
            return Err(field("forced", format!("{v} is not a probe value")));
        }
        *o = v;
    }
    Ok(out)
}
