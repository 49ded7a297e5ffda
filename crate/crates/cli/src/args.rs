//! Command-line flags. Each subcommand's flags become entries of the
//! parameter map, so a JSON config and the command line are interchangeable.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::config::{CommandKind, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mtlab", version, about = "Supercritical Moser–Trudinger experiments")]
pub struct Cli {
    /// Output directory (default: $MTLAB_OUT_DIR, then ./mtlab-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON file with `command` and `params`; flags on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct GridArgs {
    /// Dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_count: Option<usize>,
    /// log, uniform or doubly.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<String>,
    /// Grading strength toward r = 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    /// Grading strength toward r = 1 (doubly-graded grids).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength1: Option<f64>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct FunctionalArgs {
    /// mt, mt1 or mt2.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// γ as a multiple of α_n.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_mult: Option<f64>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct OptimArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_rel: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Rearrange iterates to be nonincreasing in r.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub monotone: bool,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct NonlinearityArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct ConstantsArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub functional: FunctionalArgs,
    /// zero, linear, moser:<j> or concentrating:<eps>.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct MaximizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub functional: FunctionalArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct GapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub maximize: MaximizeArgs,
    /// mt, mt1, mt2 or j-level.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub versus: Option<String>,
    /// Extra tolerance added before a gap counts as real.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct SharpnessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub functional: FunctionalArgs,
    /// Comma-separated list of Moser indices.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub j: Vec<f64>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct PdeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub nonlinearity: NonlinearityArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_count: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength1: Option<f64>,
    /// Upper end of the scan for u(0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension constants.
    Constants(ConstantsArgs),
    /// Evaluate a functional on a test function.
    Eval(EvalArgs),
    /// Maximize a functional over unit-energy radial functions.
    Maximize(MaximizeArgs),
    /// Compare the maximum of a functional with another functional or a level.
    Gap(GapArgs),
    /// Functional values along Moser's sequence for γ ≥ α_n.
    Sharpness(SharpnessArgs),
    /// Solve the radial boundary value problem by shooting.
    Pde(PdeArgs),
    /// First Dirichlet eigenvalue of the n-Laplacian.
    Eigen(GridArgs),
    /// Sampled checks of the conditions on the nonlinearity.
    Conditions(NonlinearityArgs),
}

fn to_map(args: &impl Serialize) -> BTreeMap<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Constants(_) => CommandKind::Constants,
            Command::Eval(_) => CommandKind::Eval,
            Command::Maximize(_) => CommandKind::Maximize,
            Command::Gap(_) => CommandKind::Gap,
            Command::Sharpness(_) => CommandKind::Sharpness,
            Command::Pde(_) => CommandKind::Pde,
            Command::Eigen(_) => CommandKind::Eigen,
            Command::Conditions(_) => CommandKind::Conditions,
        }
    }

    pub fn params(&self) -> BTreeMap<String, Value> {
        match self {
            Command::Constants(a) => to_map(a),
            Command::Eval(a) => to_map(a),
            Command::Maximize(a) => to_map(a),
            Command::Gap(a) => to_map(a),
            Command::Sharpness(a) => to_map(a),
            Command::Pde(a) => to_map(a),
            Command::Eigen(a) => to_map(a),
            Command::Conditions(a) => to_map(a),
        }
    }
}

impl Cli {
    /// Combines the config file, the subcommand flags and `--out`.
    pub fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ExperimentConfig::from_json(&text)?
            }
            None => match &self.command {
                Some(c) => ExperimentConfig::new(c.kind()),
                None => return Err(CliError::Config("no command given (see --help)".into())),
            },
        };
        if let Some(c) = &self.command {
            if c.kind() != cfg.command {
                return Err(CliError::Config(format!(
                    "config file is for `{}` but the command line says `{}`",
                    cfg.command,
                    c.kind()
                )));
            }
            cfg.merge(c.params());
        }
        if let Some(out) = self.out {
            cfg.params
                .insert("out".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn parse(args: &[&str]) -> ExperimentConfig {
        Cli::try_parse_from(args).unwrap().into_config().unwrap()
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sharpness_flags_become_params() {
        let cfg = parse(&[
            "mtlab", "sharpness", "--kind", "mt2", "--gamma-mult", "1.1", "--n", "2", "--j", "64,256,1024",
        ]);
        assert_eq!(cfg.command, CommandKind::Sharpness);
        let p = cfg.params().unwrap();
        assert_eq!(p.f64_list("j").unwrap(), Some(vec![64.0, 256.0, 1024.0]));
        assert_eq!(p.f64("gamma_mult").unwrap(), Some(1.1));
        assert_eq!(p.str("kind").unwrap(), Some("mt2"));
    }

    #[test]
    fn unset_flags_are_absent() {
        let cfg = parse(&["mtlab", "maximize"]);
        assert!(cfg.params.is_empty());
        let cfg = parse(&["mtlab", "maximize", "--monotone", "--out", "/tmp/o"]);
        assert_eq!(cfg.params.get("monotone"), Some(&Value::Bool(true)));
        assert_eq!(cfg.out_dir().unwrap(), PathBuf::from("/tmp/o"));
    }

    #[test]
    fn missing_command_is_a_config_error() {
        let err = Cli::try_parse_from(["mtlab"]).unwrap().into_config().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
