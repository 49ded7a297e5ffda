//! Validation of a configuration into typed module inputs.
//!
//! Everything here runs before any numerical work, so a failure is a
//! configuration error.

use mtlab_core::pde::{BvpOptions, NonlinearitySpec};
use mtlab_core::radial::DEFAULT_STRENGTH;
use mtlab_core::{
    DimensionConstants, FunctionalKind, FunctionalSpec, Grading, MaximizerOptions, RadialGrid,
};

use crate::config::{CommandKind, ExperimentConfig, Params};
use crate::error::CliError;

pub const DEFAULT_GRID_COUNT: usize = 2000;
pub const DEFAULT_PDE_GRID_COUNT: usize = 401;
/// Grading strength toward `r = 1` for doubly-graded grids. Much larger
/// values put nodes closer to 1 than double precision can separate.
pub const DEFAULT_STRENGTH1: f64 = 12.0;

/// Test function fed to `eval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Input {
    Zero,
    /// `1 - r`, normalized to unit energy.
    Linear,
    Moser(f64),
    Concentrating(f64),
}

impl Input {
    fn parse(s: &str) -> Result<Self, CliError> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |what: &str| -> Result<f64, CliError> {
            arg.and_then(|a| a.trim().parse::<f64>().ok())
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Config(format!("input `{s}`: expected `{head}:<{what}>`")))
        };
        match head {
            "zero" if arg.is_none() => Ok(Input::Zero),
            "linear" if arg.is_none() => Ok(Input::Linear),
            "moser" => {
                let j = num("j")?;
                if j < 1.0 {
                    return Err(CliError::Config(format!("moser input needs j >= 1, got {j}")));
                }
                Ok(Input::Moser(j))
            }
            "concentrating" => {
                let eps = num("eps")?;
                if !(eps > 0.0 && eps < 0.5) {
                    return Err(CliError::Config(format!(
                        "concentrating input needs eps in (0, 1/2), got {eps}"
                    )));
                }
                Ok(Input::Concentrating(eps))
            }
            _ => Err(CliError::Config(format!(
                "unknown input `{s}` (zero, linear, moser:<j>, concentrating:<eps>)"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Input::Zero => "zero".into(),
            Input::Linear => "linear".into(),
            Input::Moser(j) => format!("moser:{j}"),
            Input::Concentrating(eps) => format!("concentrating:{eps}"),
        }
    }
}

/// What a gap run compares against.
#[derive(Debug, Clone)]
pub enum Versus {
    Functional(FunctionalSpec),
    ConcentrationLevel,
}

#[derive(Debug, Clone)]
pub enum Plan {
    Constants {
        n: usize,
    },
    Eval {
        spec: FunctionalSpec,
        grid: RadialGrid,
        input: Input,
    },
    Maximize {
        spec: FunctionalSpec,
        grid: RadialGrid,
        opts: MaximizerOptions,
    },
    Gap {
        spec: FunctionalSpec,
        versus: Versus,
        grid: RadialGrid,
        opts: MaximizerOptions,
    },
    Sharpness {
        spec: FunctionalSpec,
        j: Vec<f64>,
        grid: RadialGrid,
    },
    Pde {
        spec: NonlinearitySpec,
        grid: RadialGrid,
        bvp: BvpOptions,
    },
    Eigen {
        n: usize,
        grid: RadialGrid,
    },
    Conditions {
        spec: NonlinearitySpec,
    },
}

fn module(e: mtlab_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn dimension(p: &Params) -> Result<usize, CliError> {
    let n = p.usize_or("n", 2)?;
    DimensionConstants::new(n).map_err(module)?;
    Ok(n)
}

fn grid(p: &Params, default_count: usize, default_grading: &str) -> Result<RadialGrid, CliError> {
    let count = p.usize_or("grid_count", default_count)?;
    let strength = p.positive_or("strength", DEFAULT_STRENGTH)?;
    let grading = match p.str("grading")?.unwrap_or(default_grading) {
        "log" => Grading::LogGradedOrigin { strength },
        "uniform" => Grading::Uniform,
        "doubly" => Grading::DoublyGraded {
            strength0: strength,
            strength1: p.positive_or("strength1", DEFAULT_STRENGTH1)?,
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown grading `{other}` (log, uniform, doubly)"
            )))
        }
    };
    RadialGrid::new(count, grading).map_err(module)
}

/// MT1 defaults to a grid graded toward both ends.
fn default_grading(kind: FunctionalKind) -> &'static str {
    if kind == FunctionalKind::Mt1 {
        "doubly"
    } else {
        "log"
    }
}

fn kind(p: &Params, key: &str, default: &str) -> Result<FunctionalKind, CliError> {
    match p.str(key)?.unwrap_or(default) {
        "mt" => Ok(FunctionalKind::Mt),
        "mt1" => Ok(FunctionalKind::Mt1),
        "mt2" => Ok(FunctionalKind::Mt2),
        other => Err(CliError::Config(format!(
            "unknown functional `{other}` for `{key}` (mt, mt1, mt2)"
        ))),
    }
}

fn functional(p: &Params, n: usize, kind: FunctionalKind) -> Result<FunctionalSpec, CliError> {
    let alpha = p.positive_or("alpha", 1.0)?;
    let mult = p.positive_or("gamma_mult", 1.0)?;
    let spec = FunctionalSpec::of_kind(kind, n, alpha)
        .and_then(|s| s.with_gamma_mult(mult))
        .map_err(module)?;
    spec.validate().map_err(module)?;
    Ok(spec)
}

fn maximizer_options(p: &Params) -> Result<MaximizerOptions, CliError> {
    let d = MaximizerOptions::default();
    let opts = MaximizerOptions {
        max_iters: p.usize_or("max_iters", d.max_iters)?,
        tol_rel: p.positive_or("tol_rel", d.tol_rel)?,
        seed: p.u64("seed")?.unwrap_or(d.seed),
        monotone_projection: p.bool_or("monotone", d.monotone_projection)?,
        resolution: p.f64_or("resolution", d.resolution)?,
        ..d
    };
    if opts.resolution < 0.0 {
        return Err(CliError::Config("resolution must be non-negative".into()));
    }
    opts.validate().map_err(module)?;
    Ok(opts)
}

fn nonlinearity(p: &Params, n: usize) -> Result<NonlinearitySpec, CliError> {
    let d = NonlinearitySpec::defaults(n).map_err(module)?;
    let spec = NonlinearitySpec {
        n,
        alpha: p.f64_or("alpha", d.alpha)?,
        alpha0: p.f64_or("alpha0", d.alpha0)?,
        c: p.f64_or("c", d.c)?,
        m: p.f64_or("m", d.m)?,
        r: p.f64_or("r", d.r)?,
    };
    spec.validate().map_err(module)?;
    Ok(spec)
}

impl Plan {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let p = cfg.params()?;
        cfg.out_dir()?;
        let n = dimension(&p)?;
        let plan = match cfg.command {
            CommandKind::Constants => Plan::Constants { n },
            CommandKind::Eval => {
                let k = kind(&p, "kind", "mt")?;
                Plan::Eval {
                    spec: functional(&p, n, k)?,
                    grid: grid(&p, DEFAULT_GRID_COUNT, default_grading(k))?,
                    input: Input::parse(p.str("input")?.unwrap_or("zero"))?,
                }
            }
            CommandKind::Maximize => {
                let k = kind(&p, "kind", "mt1")?;
                Plan::Maximize {
                    spec: functional(&p, n, k)?,
                    grid: grid(&p, DEFAULT_GRID_COUNT, default_grading(k))?,
                    opts: maximizer_options(&p)?,
                }
            }
            CommandKind::Gap => {
                let k = kind(&p, "kind", "mt1")?;
                let spec = functional(&p, n, k)?;
                let versus = match p.str("versus")?.unwrap_or("mt") {
                    "j-level" | "j_level" => Versus::ConcentrationLevel,
                    _ => Versus::Functional(functional(&p, n, kind(&p, "versus", "mt")?)?),
                };
                Plan::Gap {
                    spec,
                    versus,
                    grid: grid(&p, DEFAULT_GRID_COUNT, default_grading(k))?,
                    opts: maximizer_options(&p)?,
                }
            }
            CommandKind::Sharpness => {
                let k = kind(&p, "kind", "mt2")?;
                if k == FunctionalKind::Mt {
                    return Err(CliError::Config("sharpness is defined for mt1 and mt2".into()));
                }
                let spec = functional(&p, n, k)?;
                let dc = DimensionConstants::new(n).map_err(module)?;
                if spec.gamma < dc.alpha_n * (1.0 - 1e-12) {
                    return Err(CliError::Config(format!(
                        "sharpness needs gamma_mult >= 1, got {}",
                        spec.gamma / dc.alpha_n
                    )));
                }
                let j = p.f64_list("j")?.unwrap_or_else(|| vec![64.0, 256.0, 1024.0]);
                if let Some(bad) = j.iter().find(|&&x| x < 1.0) {
                    return Err(CliError::Config(format!("every j must be >= 1, got {bad}")));
                }
                Plan::Sharpness {
                    spec,
                    j,
                    grid: grid(&p, DEFAULT_GRID_COUNT, default_grading(k))?,
                }
            }
            CommandKind::Pde => {
                let d = BvpOptions::default();
                let bvp = BvpOptions {
                    s_max: p.positive_or("s_max", d.s_max)?,
                    scan_samples: p.usize_or("scan_samples", d.scan_samples)?,
                    ..d
                };
                if bvp.scan_samples < 2 {
                    return Err(CliError::Config("scan_samples must be at least 2".into()));
                }
                Plan::Pde {
                    spec: nonlinearity(&p, n)?,
                    grid: grid(&p, DEFAULT_PDE_GRID_COUNT, "uniform")?,
                    bvp,
                }
            }
            CommandKind::Eigen => Plan::Eigen {
                n,
                grid: grid(&p, DEFAULT_PDE_GRID_COUNT, "uniform")?,
            },
            CommandKind::Conditions => Plan::Conditions {
                spec: nonlinearity(&p, n)?,
            },
        };
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(cfg: ExperimentConfig) -> Result<Plan, CliError> {
        Plan::from_config(&cfg)
    }

    #[test]
    fn eval_defaults() {
        let Plan::Eval { spec, grid, input } = plan(ExperimentConfig::new(CommandKind::Eval)).unwrap()
        else {
            panic!("wrong plan")
        };
        assert_eq!(spec.kind, FunctionalKind::Mt);
        assert_eq!(grid.len(), DEFAULT_GRID_COUNT);
        assert_eq!(input, Input::Zero);
    }

    #[test]
    fn precondition_violations_are_config_errors() {
        let cases = [
            ExperimentConfig::new(CommandKind::Constants).with("n", 1),
            ExperimentConfig::new(CommandKind::Eval).with("grid_count", 3),
            ExperimentConfig::new(CommandKind::Eval).with("alpha", -1.0),
            ExperimentConfig::new(CommandKind::Eval).with("input", "moser"),
            ExperimentConfig::new(CommandKind::Eval).with("input", "concentrating:0.7"),
            ExperimentConfig::new(CommandKind::Sharpness).with("gamma_mult", 0.9),
            ExperimentConfig::new(CommandKind::Sharpness).with("kind", "mt"),
            ExperimentConfig::new(CommandKind::Maximize).with("tol_rel", 0.0),
            ExperimentConfig::new(CommandKind::Pde).with("alpha0", -2.0),
            ExperimentConfig::new(CommandKind::Eigen).with("grading", "spiral"),
        ];
        for cfg in cases {
            match plan(cfg.clone()) {
                Err(e @ CliError::Config(_)) => assert_eq!(e.exit_code(), 2),
                other => panic!("{cfg:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn mt1_defaults_to_doubly_graded() {
        let Plan::Maximize { grid, .. } = plan(ExperimentConfig::new(CommandKind::Maximize)).unwrap() else {
            panic!("wrong plan")
        };
        assert!(matches!(
            grid.grading(),
            Grading::DoublyGraded { strength1, .. } if strength1 == DEFAULT_STRENGTH1
        ));
        let nodes = grid.nodes();
        assert!(nodes[nodes.len() - 2] < 1.0 - 1e-6);
    }

    #[test]
    fn gap_against_concentration_level() {
        let cfg = ExperimentConfig::new(CommandKind::Gap).with("versus", "j-level");
        assert!(matches!(
            plan(cfg).unwrap(),
            Plan::Gap {
                versus: Versus::ConcentrationLevel,
                ..
            }
        ));
    }

    #[test]
    fn input_labels_round_trip() {
        for s in ["zero", "linear", "moser:64", "concentrating:0.001"] {
            assert_eq!(Input::parse(s).unwrap().label(), s);
        }
    }
}
