//! Dispatch of a validated plan to the numerical modules.

use std::sync::Arc;

use mtlab_core::families::concentrating_function;
use mtlab_core::numerics::linear_fit;
use mtlab_core::pde::{
    check_conditions, eigenfunction, energy_i, flux_identity_residual, lambda1, level_bound, solve_bvp,
};
use mtlab_core::{
    blowup_table, certified_gap_report, eval_functional, maximize, moser_function, normalize,
    Comparator, DimensionConstants, FunctionalSpec, MaximizerReport, MoserParams,
    RadialFunction, RadialGrid,
};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{render_csv, PlotSeries};
use crate::plan::{Input, Plan, Versus};
use crate::summary::{
    ConditionsSummary, ConstantsSummary, EigenSummary, EvalSummary, FunctionalInfo, GapSummary,
    MaximizeSummary, NodalValues, Outcome, PdeSummary, SharpnessSummary, TraceSummary,
};

/// Everything a command produces, before anything is written.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub outcome: Outcome,
    /// `(file name, CSV text)`.
    pub tables: Vec<(String, String)>,
    pub plots: Vec<PlotSeries>,
}

#[derive(Serialize)]
struct NodalRow {
    r: f64,
    u: f64,
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    value: f64,
    step: f64,
    energy: f64,
}

#[derive(Serialize)]
struct ProfileRow {
    r: f64,
    u: f64,
    du: f64,
    flux: f64,
}

fn info(spec: &FunctionalSpec) -> Result<FunctionalInfo, CliError> {
    let dc = DimensionConstants::new(spec.n)?;
    Ok(FunctionalInfo {
        kind: spec.kind,
        n: spec.n,
        gamma: spec.gamma,
        gamma_mult: spec.gamma / dc.alpha_n,
        alpha: spec.alpha,
    })
}

fn nodal_rows(nodes: &[f64], values: &[f64]) -> Vec<NodalRow> {
    nodes.iter().zip(values).map(|(&r, &u)| NodalRow { r, u }).collect()
}

fn input_function(input: Input, n: usize, grid: &RadialGrid) -> Result<RadialFunction, CliError> {
    let arc = Arc::new(grid.clone());
    Ok(match input {
        Input::Zero => RadialFunction::zero(arc, n)?,
        Input::Linear => normalize(&RadialFunction::from_fn(arc, n, |r| 1.0 - r)?)?,
        Input::Moser(j) => moser_function(MoserParams::new(j, n)?, grid)?,
        Input::Concentrating(eps) => concentrating_function(eps, n, grid)?.0,
    })
}

fn maximize_summary(
    spec: &FunctionalSpec,
    grid: &RadialGrid,
    seed: u64,
    rep: &MaximizerReport,
) -> Result<MaximizeSummary, CliError> {
    Ok(MaximizeSummary {
        functional: info(spec)?,
        grid_nodes: grid.len(),
        seed,
        best_value: rep.best_value,
        iterations: rep.iterations,
        status: rep.status,
        diverged: rep.diverged,
        start_provenance: rep.start_provenance.clone(),
        thresholds: rep.compared_thresholds,
        starts: rep.starts.clone(),
        trace: TraceSummary {
            len: rep.trace.len(),
            first_value: rep.trace.first().map_or(rep.best_value, |t| t.value),
            last_value: rep.trace.last().map_or(rep.best_value, |t| t.value),
        },
        argmax: NodalValues {
            nodes: rep.argmax.grid().nodes().to_vec(),
            values: rep.argmax.values().to_vec(),
        },
    })
}

/// Trace and argmax tables plus their plot series, under `prefix`.
fn maximizer_files(prefix: &str, rep: &MaximizerReport, art: &mut Artifacts) -> Result<(), CliError> {
    let trace: Vec<TraceRow> = rep
        .trace
        .iter()
        .enumerate()
        .map(|(k, t)| TraceRow {
            iteration: k,
            value: t.value,
            step: t.step,
            energy: t.energy,
        })
        .collect();
    let nodes = rep.argmax.grid().nodes();
    let values = rep.argmax.values();
    art.tables.push((format!("{prefix}_trace.csv"), render_csv(&trace)?));
    art.tables
        .push((format!("{prefix}_argmax.csv"), render_csv(&nodal_rows(nodes, values))?));
    art.plots.push(PlotSeries::new(
        &format!("{prefix}_trace_plot"),
        "iteration",
        "value",
        trace.iter().map(|t| (t.iteration as f64, t.value)).collect(),
    ));
    art.plots.push(PlotSeries::new(
        &format!("{prefix}_argmax_plot"),
        "r",
        "u",
        nodes.iter().copied().zip(values.iter().copied()).collect(),
    ));
    Ok(())
}

impl Artifacts {
    fn new(outcome: Outcome) -> Self {
        Self {
            outcome,
            tables: Vec::new(),
            plots: Vec::new(),
        }
    }
}

pub fn execute(plan: &Plan) -> Result<Artifacts, CliError> {
    match plan {
        Plan::Constants { n } => {
            let dc = DimensionConstants::new(*n)?;
            Ok(Artifacts::new(Outcome::Constants(ConstantsSummary {
                n: dc.n,
                omega: dc.omega,
                ball_volume: dc.ball_volume,
                alpha_n: dc.alpha_n,
                harmonic_partial: dc.harmonic_partial,
                j_level: dc.concentration_level,
            })))
        }
        Plan::Eval { spec, grid, input } => {
            let u = input_function(*input, spec.n, grid)?;
            let res = eval_functional(&u, spec)?;
            let mut art = Artifacts::new(Outcome::Eval(EvalSummary {
                functional: info(spec)?,
                input: input.label(),
                grid_nodes: u.grid().len(),
                energy: mtlab_core::dirichlet_energy(&u),
                value: res.value,
                divergent: res.divergent,
                max_exponent: res.max_exponent,
            }));
            art.tables
                .push(("eval_input.csv".into(), render_csv(&nodal_rows(u.grid().nodes(), u.values()))?));
            Ok(art)
        }
        Plan::Maximize { spec, grid, opts } => {
            let rep = maximize(spec, grid, opts)?;
            let mut art = Artifacts::new(Outcome::Maximize(maximize_summary(spec, grid, opts.seed, &rep)?));
            maximizer_files("maximize", &rep, &mut art)?;
            Ok(art)
        }
        Plan::Gap {
            spec,
            versus,
            grid,
            opts,
        } => {
            let (comparator, second_spec) = match versus {
                Versus::Functional(s) => (Comparator::Functional(s.clone()), Some(s)),
                Versus::ConcentrationLevel => (
                    Comparator::Level(DimensionConstants::new(spec.n)?.concentration_level),
                    None,
                ),
            };
            let rep = certified_gap_report(spec, &comparator, grid, opts)?;
            let second = match (&rep.second, second_spec) {
                (Some(r), Some(s)) => Some(maximize_summary(s, grid, opts.seed, r)?),
                _ => None,
            };
            let mut art = Artifacts::new(Outcome::Gap(GapSummary {
                first: maximize_summary(spec, grid, opts.seed, &rep.first)?,
                second,
                baseline: rep.baseline,
                gap: rep.gap,
                tolerance: rep.tolerance,
                verdict: rep.verdict,
            }));
            maximizer_files("gap_first", &rep.first, &mut art)?;
            if let Some(r) = &rep.second {
                maximizer_files("gap_second", r, &mut art)?;
            }
            Ok(art)
        }
        Plan::Sharpness { spec, j, grid } => {
            let alpha = spec.alpha.unwrap_or(1.0);
            let rows = blowup_table(spec.kind, spec.gamma, alpha, spec.n, j, grid)?;
            let dc = DimensionConstants::new(spec.n)?;
            let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.j.ln(), r.value.ln())).unzip();
            let fitted_slope = (rows.len() >= 2).then(|| linear_fit(&x, &y).0);
            let mut art = Artifacts::new(Outcome::Sharpness(SharpnessSummary {
                functional: info(spec)?,
                grid_nodes: grid.len(),
                dominates_lower_bound: rows.iter().all(|r| r.value >= r.lower_bound),
                fitted_slope,
                expected_slope: spec.n as f64 * (spec.gamma / dc.alpha_n - 1.0),
                rows: rows.clone(),
            }));
            art.tables.push(("sharpness.csv".into(), render_csv(&rows)?));
            art.plots.push(PlotSeries::new(
                "sharpness_loglog",
                "ln_j",
                "ln_value",
                x.into_iter().zip(y).collect(),
            ));
            Ok(art)
        }
        Plan::Pde { spec, grid, bvp } => {
            let sol = solve_bvp(spec, None, grid, bvp)?;
            let profile = sol.profile()?;
            let rows: Vec<ProfileRow> = (0..sol.nodes.len())
                .map(|k| ProfileRow {
                    r: sol.nodes[k],
                    u: profile.values()[k],
                    du: sol.du[k],
                    flux: sol.flux[k],
                })
                .collect();
            let mut art = Artifacts::new(Outcome::Pde(PdeSummary {
                spec: *spec,
                grid_nodes: grid.len(),
                s: sol.s,
                boundary_residual: sol.boundary_residual,
                positive: sol.positive,
                monotone: sol.monotone,
                flux_residual: flux_identity_residual(spec, &sol),
                energy: energy_i(&profile, spec)?,
                level_bound: level_bound(spec)?,
            }));
            art.tables.push(("pde_profile.csv".into(), render_csv(&rows)?));
            art.plots.push(PlotSeries::new(
                "pde_profile_plot",
                "r",
                "u",
                rows.iter().map(|p| (p.r, p.u)).collect(),
            ));
            Ok(art)
        }
        Plan::Eigen { n, grid } => {
            let lam = lambda1(*n)?;
            let u = eigenfunction(*n, lam, grid)?;
            let mut art = Artifacts::new(Outcome::Eigen(EigenSummary {
                n: *n,
                lambda1: lam,
                grid_nodes: grid.len(),
                boundary_value: *u.last().unwrap(),
            }));
            art.tables
                .push(("eigenfunction.csv".into(), render_csv(&nodal_rows(grid.nodes(), &u))?));
            art.plots.push(PlotSeries::new(
                "eigenfunction_plot",
                "r",
                "u",
                grid.nodes().iter().copied().zip(u).collect(),
            ));
            Ok(art)
        }
        Plan::Conditions { spec } => {
            let report = check_conditions(spec)?;
            Ok(Artifacts::new(Outcome::Conditions(ConditionsSummary {
                all_passed: report.entries().iter().all(|e| e.passed),
                report,
            })))
        }
    }
}
