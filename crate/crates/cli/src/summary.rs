//! JSON summaries written by each command.

use std::collections::BTreeMap;

use mtlab_core::families::BlowupRow;
use mtlab_core::maximizer::{StartSummary, Thresholds};
use mtlab_core::pde::conditions::ConditionReport;
use mtlab_core::pde::NonlinearitySpec;
use mtlab_core::{FunctionalKind, GapVerdict, StartDescriptor, Status};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalInfo {
    pub kind: FunctionalKind,
    pub n: usize,
    pub gamma: f64,
    pub gamma_mult: f64,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSummary {
    pub n: usize,
    pub omega: f64,
    pub ball_volume: f64,
    pub alpha_n: f64,
    pub harmonic_partial: f64,
    /// Concentration level.
    #[serde(rename = "J")]
    pub j_level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub functional: FunctionalInfo,
    pub input: String,
    pub grid_nodes: usize,
    pub energy: f64,
    pub value: f64,
    pub divergent: bool,
    pub max_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub len: usize,
    pub first_value: f64,
    pub last_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalValues {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizeSummary {
    pub functional: FunctionalInfo,
    pub grid_nodes: usize,
    pub seed: u64,
    pub best_value: f64,
    pub iterations: usize,
    pub status: Status,
    pub diverged: bool,
    pub start_provenance: StartDescriptor,
    pub thresholds: Thresholds,
    pub starts: Vec<StartSummary>,
    pub trace: TraceSummary,
    pub argmax: NodalValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub first: MaximizeSummary,
    pub second: Option<MaximizeSummary>,
    pub baseline: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub verdict: GapVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSummary {
    pub functional: FunctionalInfo,
    pub grid_nodes: usize,
    pub rows: Vec<BlowupRow>,
    /// Every value is at least its analytic lower bound.
    pub dominates_lower_bound: bool,
    /// Least-squares slope of `ln value` against `ln j` (absent for one row).
    pub fitted_slope: Option<f64>,
    /// `n (γ/α_n - 1)`.
    pub expected_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSummary {
    pub spec: NonlinearitySpec,
    pub grid_nodes: usize,
    pub s: f64,
    pub boundary_residual: f64,
    pub positive: bool,
    pub monotone: bool,
    pub flux_residual: f64,
    /// `I(u)` of the computed solution.
    pub energy: f64,
    pub level_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub n: usize,
    pub lambda1: f64,
    pub grid_nodes: usize,
    pub boundary_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionsSummary {
    pub all_passed: bool,
    pub report: ConditionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "result", rename_all = "kebab-case")]
pub enum Outcome {
    Constants(ConstantsSummary),
    Eval(EvalSummary),
    Maximize(MaximizeSummary),
    Gap(GapSummary),
    Sharpness(SharpnessSummary),
    Pde(PdeSummary),
    Eigen(EigenSummary),
    Conditions(ConditionsSummary),
}

/// Top-level JSON document: the parameters as given plus the command result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub status: String,
    pub params: BTreeMap<String, Value>,
    #[serde(flatten)]
    pub outcome: Outcome,
}

fn check(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Io(format!("summary fails validation: {what}")))
    }
}

fn finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

impl FunctionalInfo {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 2, "n >= 2")?;
        check(self.gamma > 0.0 && self.gamma_mult > 0.0, "positive gamma")?;
        check(
            self.alpha.is_some() == (self.kind != FunctionalKind::Mt),
            "alpha present exactly for mt1/mt2",
        )
    }
}

impl MaximizeSummary {
    fn validate(&self) -> Result<(), CliError> {
        self.functional.validate()?;
        check(self.best_value.is_finite(), "finite best value")?;
        check(self.argmax.nodes.len() == self.argmax.values.len(), "argmax lengths")?;
        check(finite(&self.argmax.values), "finite argmax")?;
        check(self.argmax.nodes.windows(2).all(|w| w[0] < w[1]), "increasing nodes")?;
        check(!self.starts.is_empty(), "at least one start")?;
        check(
            self.trace.len == 0 || self.trace.first_value <= self.trace.last_value,
            "nondecreasing trace",
        )
    }
}

impl Summary {
    pub fn new(params: BTreeMap<String, Value>, outcome: Outcome) -> Self {
        Self {
            status: "ok".into(),
            params,
            outcome,
        }
    }

    pub fn command(&self) -> &'static str {
        match self.outcome {
            Outcome::Constants(_) => "constants",
            Outcome::Eval(_) => "eval",
            Outcome::Maximize(_) => "maximize",
            Outcome::Gap(_) => "gap",
            Outcome::Sharpness(_) => "sharpness",
            Outcome::Pde(_) => "pde",
            Outcome::Eigen(_) => "eigen",
            Outcome::Conditions(_) => "conditions",
        }
    }

    /// Structural checks that every emitted summary satisfies.
    pub fn validate(&self) -> Result<(), CliError> {
        check(self.status == "ok", "status ok")?;
        match &self.outcome {
            Outcome::Constants(c) => {
                check(c.n >= 2, "n >= 2")?;
                check(
                    finite(&[c.omega, c.ball_volume, c.alpha_n, c.j_level])
                        && c.omega > 0.0
                        && c.j_level > c.ball_volume,
                    "positive constants with J > |B|",
                )
            }
            Outcome::Eval(e) => {
                e.functional.validate()?;
                check(e.value.is_finite() && e.value > 0.0, "positive value")?;
                check(e.energy.is_finite() && e.energy >= 0.0, "non-negative energy")
            }
            Outcome::Maximize(m) => m.validate(),
            Outcome::Gap(g) => {
                g.first.validate()?;
                if let Some(s) = &g.second {
                    s.validate()?;
                }
                check(finite(&[g.baseline, g.gap, g.tolerance]), "finite gap")?;
                check(
                    (g.first.best_value - g.baseline - g.gap).abs() <= 1e-12 * g.first.best_value.abs().max(1.0),
                    "gap equals first minus baseline",
                )
            }
            Outcome::Sharpness(s) => {
                s.functional.validate()?;
                check(!s.rows.is_empty(), "at least one row")?;
                check(s.rows.iter().all(|r| r.j >= 1.0 && r.value.is_finite()), "rows")?;
                check(
                    s.dominates_lower_bound == s.rows.iter().all(|r| r.value >= r.lower_bound),
                    "dominance flag",
                )
            }
            Outcome::Pde(p) => {
                check(p.s > 0.0 && p.s.is_finite(), "positive s")?;
                check(finite(&[p.boundary_residual, p.flux_residual, p.energy, p.level_bound]), "finite")
            }
            Outcome::Eigen(e) => check(e.n >= 2 && e.lambda1 > 0.0 && e.lambda1.is_finite(), "positive λ₁"),
            Outcome::Conditions(c) => check(
                c.all_passed == c.report.entries().iter().all(|e| e.passed),
                "all_passed flag",
            ),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))
    }

    /// Parses and validates a summary written by [`Summary::to_json`].
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let s: Summary = serde_json::from_str(text).map_err(|e| CliError::Io(format!("summary: {e}")))?;
        s.validate()?;
        Ok(s)
    }
}
