//! Experiment configuration: a command plus a flat map of scalar parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MTLAB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "mtlab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Constants,
    Eval,
    Maximize,
    Gap,
    Sharpness,
    Pde,
    Eigen,
    Conditions,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Constants => "constants",
            CommandKind::Eval => "eval",
            CommandKind::Maximize => "maximize",
            CommandKind::Gap => "gap",
            CommandKind::Sharpness => "sharpness",
            CommandKind::Pde => "pde",
            CommandKind::Eigen => "eigen",
            CommandKind::Conditions => "conditions",
        }
    }

    /// Parameter keys the command accepts, besides `out`.
    pub fn allowed_keys(self) -> &'static [&'static str] {
        const GRID: [&str; 5] = ["n", "grid_count", "grading", "strength", "strength1"];
        match self {
            CommandKind::Constants => &["n"],
            CommandKind::Eval => &[
                "n", "grid_count", "grading", "strength", "strength1", "kind", "alpha", "gamma_mult", "input",
            ],
            CommandKind::Maximize => &[
                "n", "grid_count", "grading", "strength", "strength1", "kind", "alpha", "gamma_mult",
                "max_iters", "tol_rel", "seed", "monotone",
            ],
            CommandKind::Gap => &[
                "n", "grid_count", "grading", "strength", "strength1", "kind", "alpha", "gamma_mult",
                "max_iters", "tol_rel", "seed", "monotone", "versus", "resolution",
            ],
            CommandKind::Sharpness => &[
                "n", "grid_count", "grading", "strength", "strength1", "kind", "alpha", "gamma_mult", "j",
            ],
            CommandKind::Pde => &[
                "n", "grid_count", "grading", "strength", "strength1", "alpha", "alpha0", "c", "m", "r",
                "s_max", "scan_samples",
            ],
            CommandKind::Eigen => &GRID,
            CommandKind::Conditions => &["n", "alpha", "alpha0", "c", "m", "r"],
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.params = normalize_keys(std::mem::take(&mut cfg.params));
        Ok(cfg)
    }

    /// Adds `other` on top of `self`; keys in `other` win.
    pub fn merge(&mut self, other: BTreeMap<String, Value>) {
        self.params.extend(normalize_keys(other));
    }

    /// Output directory: `out` parameter, then the environment, then the default.
    pub fn out_dir(&self) -> Result<PathBuf, CliError> {
        match self.params.get("out") {
            Some(Value::String(s)) => Ok(PathBuf::from(s)),
            Some(other) => Err(CliError::Config(format!("out must be a string, got {other}"))),
            None => Ok(std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))),
        }
    }

    pub fn params(&self) -> Result<Params<'_>, CliError> {
        let allowed = self.command.allowed_keys();
        for key in self.params.keys() {
            if key != "out" && !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown parameter `{key}` for `{}` (accepted: {})",
                    self.command,
                    allowed.join(", ")
                )));
            }
        }
        Ok(Params { map: &self.params })
    }
}

fn normalize_keys(map: BTreeMap<String, Value>) -> BTreeMap<String, Value> {
    map.into_iter()
        .map(|(k, v)| (k.replace('-', "_"), v))
        .filter(|(_, v)| !v.is_null())
        .collect()
}

/// Typed read access to the parameter map. Numbers may also be given as strings.
#[derive(Debug, Clone, Copy)]
pub struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
}

fn bad(key: &str, want: &str, got: &Value) -> CliError {
    CliError::Config(format!("parameter `{key}` must be {want}, got {got}"))
}

impl Params<'_> {
    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        let Some(v) = self.map.get(key) else {
            return Ok(None);
        };
        let x = match v {
            Value::Number(x) => x.as_f64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        match x {
            Some(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(bad(key, "a finite number", v)),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn positive_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let x = self.f64_or(key, default)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(CliError::Config(format!("parameter `{key}` must be positive, got {x}")))
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        let Some(v) = self.map.get(key) else {
            return Ok(None);
        };
        let x = match v {
            Value::Number(x) => x.as_u64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        x.map(Some).ok_or_else(|| bad(key, "a non-negative integer", v))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.u64(key)?.map_or(default, |x| x as usize))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(Value::String(s)) if s == "true" || s == "false" => Ok(s == "true"),
            Some(v) => Err(bad(key, "a boolean", v)),
        }
    }

    pub fn str(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(bad(key, "a string", v)),
        }
    }

    /// A list given either as a JSON array or as a comma-separated string.
    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(v) = self.map.get(key) else {
            return Ok(None);
        };
        let items: Option<Vec<f64>> = match v {
            Value::Array(xs) => xs.iter().map(|x| x.as_f64()).collect(),
            Value::String(s) => s.split(',').map(|t| t.trim().parse().ok()).collect(),
            Value::Number(x) => x.as_f64().map(|x| vec![x]),
            _ => None,
        };
        match items {
            Some(xs) if !xs.is_empty() && xs.iter().all(|x| x.is_finite()) => Ok(Some(xs)),
            _ => Err(bad(key, "a non-empty list of numbers", v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_and_normalizes_kebab_keys() {
        let cfg = ExperimentConfig::from_json(
            r#"{"command":"sharpness","params":{"gamma-mult":1.1,"j":"64, 256","n":2}}"#,
        )
        .unwrap();
        assert_eq!(cfg.command, CommandKind::Sharpness);
        let p = cfg.params().unwrap();
        assert_eq!(p.f64("gamma_mult").unwrap(), Some(1.1));
        assert_eq!(p.f64_list("j").unwrap(), Some(vec![64.0, 256.0]));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_types() {
        let cfg = ExperimentConfig::new(CommandKind::Constants).with("kind", "mt");
        assert!(matches!(cfg.params(), Err(CliError::Config(_))));
        let cfg = ExperimentConfig::new(CommandKind::Eval).with("n", json!([1, 2]));
        let p = cfg.params().unwrap();
        assert!(p.u64("n").is_err());
        assert!(p.f64("n").is_err());
    }

    #[test]
    fn out_dir_prefers_explicit_param() {
        let cfg = ExperimentConfig::new(CommandKind::Eigen).with("out", "/tmp/x");
        assert_eq!(cfg.out_dir().unwrap(), PathBuf::from("/tmp/x"));
    }

    #[test]
    fn unknown_command_is_a_config_error() {
        assert!(ExperimentConfig::from_json(r#"{"command":"frobnicate"}"#).is_err());
    }
}
