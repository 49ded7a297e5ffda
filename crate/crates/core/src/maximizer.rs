//! Projected gradient ascent on the unit n-energy sphere.
//!
//! Search directions are gradients preconditioned by the energy metric, which
//! in the variable `x = -log r` is a one-dimensional stiffness matrix. Each
//! trial point is pulled back onto the sphere by exact rescaling, so every
//! accepted iterate is feasible.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{concentrating_function, moser_function, MoserParams};
use crate::functionals::{DiscreteFunctional, FunctionalSpec};
use crate::numerics::{linear_fit, solve_tridiagonal};
use crate::radial::{energy_with, DimensionConstants, RadialFunction, RadialGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StartDescriptor {
    /// Random smooth perturbation of zero.
    ZeroPerturbed,
    Moser { j: f64 },
    Concentrating { eps: f64 },
    /// A previous solution, given by nodes and values and interpolated linearly.
    Previous { nodes: Vec<f64>, values: Vec<f64> },
}

impl StartDescriptor {
    pub fn label(&self) -> String {
        match self {
            StartDescriptor::ZeroPerturbed => "zero-perturbed".into(),
            StartDescriptor::Moser { j } => format!("moser(j={j})"),
            StartDescriptor::Concentrating { eps } => format!("concentrating(eps={eps:e})"),
            StartDescriptor::Previous { .. } => "previous-solution".into(),
        }
    }
}

pub fn default_starts() -> Vec<StartDescriptor> {
    let mut v = vec![StartDescriptor::ZeroPerturbed];
    v.extend([8.0, 64.0, 512.0].map(|j| StartDescriptor::Moser { j }));
    v.extend([1e-2, 1e-4, 1e-6].map(|eps| StartDescriptor::Concentrating { eps }));
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizerOptions {
    pub max_iters: usize,
    pub tol_rel: f64,
    /// Initial step length, measured in the energy metric.
    pub step0: f64,
    pub starts: Vec<StartDescriptor>,
    pub seed: u64,
    pub monotone_projection: bool,
    /// Values above this count as divergence.
    pub ceiling: f64,
    /// Added to the numerical tolerance when deciding whether a gap is real.
    pub resolution: f64,
}

impl Default for MaximizerOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol_rel: 1e-8,
            step0: 0.1,
            starts: default_starts(),
            seed: 0x5eed,
            monotone_projection: false,
            ceiling: 1e6,
            resolution: 0.0,
        }
    }
}

impl MaximizerOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol_rel must be positive, got {}",
                self.tol_rel
            )));
        }
        if self.starts.is_empty() {
            return Err(Error::InvalidParameter("at least one start is required".into()));
        }
        if !(self.step0 > 0.0) || !(self.ceiling > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "step0, ceiling and max_iters must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
    /// Never rose above `|B| + 1e-6`.
    TrivialPlateau,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub value: f64,
    pub step: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub start: StartDescriptor,
    pub initial_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Best value of the plain functional on the same grid, when known.
    pub mt_numeric: Option<f64>,
    /// Concentration level.
    pub j_level: f64,
}

#[derive(Debug, Clone)]
pub struct MaximizerReport {
    pub best_value: f64,
    pub argmax: RadialFunction,
    pub trace: Vec<TraceEntry>,
    pub start_provenance: StartDescriptor,
    pub iterations: usize,
    pub status: Status,
    pub diverged: bool,
    pub compared_thresholds: Thresholds,
    pub starts: Vec<StartSummary>,
}

struct RunResult {
    summary: StartSummary,
    values: Vec<f64>,
    trace: Vec<TraceEntry>,
}

/// Maximizes `spec` over unit-energy radial functions on `grid` from every
/// configured start and keeps the best run.
pub fn maximize(
    spec: &FunctionalSpec,
    grid: &RadialGrid,
    opts: &MaximizerOptions,
) -> Result<MaximizerReport> {
    opts.validate()?;
    let functional = DiscreteFunctional::new(spec, grid)?;
    let dc = DimensionConstants::new(spec.n)?;
    let grid = Arc::new(grid.clone());
    let runs: Vec<RunResult> = opts
        .starts
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let u0 = start_values(start, &grid, spec.n, opts.seed.wrapping_add(k as u64))?;
            Ok(ascend(&functional, u0, start.clone(), opts, dc.ball_volume))
        })
        .collect::<Result<Vec<_>>>()?;

    let all_diverged = runs.iter().all(|r| r.summary.status == Status::Diverged);
    let best = if all_diverged {
        runs.iter()
            .max_by(|a, b| a.summary.value.total_cmp(&b.summary.value))
            .unwrap()
    } else {
        runs.iter()
            .filter(|r| r.summary.status != Status::Diverged)
            .max_by(|a, b| {
                a.summary
                    .value
                    .total_cmp(&b.summary.value)
                    .then(b.summary.iterations.cmp(&a.summary.iterations))
            })
            .unwrap()
    };
    let diverged = runs.iter().any(|r| r.summary.status == Status::Diverged);
    let status = if all_diverged {
        Status::Diverged
    } else if best.summary.value < dc.ball_volume + 1e-6 {
        Status::TrivialPlateau
    } else {
        best.summary.status
    };
    let argmax = RadialFunction::new(grid.clone(), best.values.clone(), spec.n)?;
    Ok(MaximizerReport {
        best_value: best.summary.value,
        argmax,
        trace: best.trace.clone(),
        start_provenance: best.summary.start.clone(),
        iterations: best.summary.iterations,
        status,
        diverged,
        compared_thresholds: Thresholds {
            mt_numeric: (spec.kind == crate::functionals::FunctionalKind::Mt
                && spec.gamma == dc.alpha_n
                && !all_diverged)
                .then_some(best.summary.value),
            j_level: dc.concentration_level,
        },
        starts: runs.into_iter().map(|r| r.summary).collect(),
    })
}

/// Unit-energy nodal values for a start, sampled on `grid`.
fn start_values(start: &StartDescriptor, grid: &Arc<RadialGrid>, n: usize, seed: u64) -> Result<Vec<f64>> {
    let u = match start {
        StartDescriptor::ZeroPerturbed => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coef: Vec<f64> = (1..=8)
                .map(|k| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z / k as f64
                })
                .collect();
            RadialFunction::from_fn(grid.clone(), n, |r| {
                coef.iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k as f64 + 0.5) * std::f64::consts::PI * r).cos())
                    .sum()
            })?
        }
        StartDescriptor::Moser { j } => {
            moser_function(MoserParams::new(*j, n)?, grid)?.resample(grid.clone())?
        }
        StartDescriptor::Concentrating { eps } => {
            concentrating_function(*eps, n, grid)?.0.resample(grid.clone())?
        }
        StartDescriptor::Previous { nodes, values } => {
            if nodes.len() != values.len() || nodes.len() < 2 {
                return Err(Error::InvalidParameter(
                    "previous solution needs matching nodes and values".into(),
                ));
            }
            RadialFunction::from_fn(grid.clone(), n, |r| {
                let k = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
                let (a, b) = (nodes[k - 1], nodes[k]);
                let t = ((r - a) / (b - a)).clamp(0.0, 1.0);
                values[k - 1] + t * (values[k] - values[k - 1])
            })?
        }
    };
    Ok(crate::radial::normalize(&u)?.into_values())
}

/// Energy metric restricted to the free nodes, as tridiagonal bands.
struct Metric {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Metric {
    fn new(f: &DiscreteFunctional, values: &[f64]) -> Self {
        let g = f.geometry();
        let n = g.n;
        let cells = g.cells();
        let k: Vec<f64> = if n == 2 {
            g.energy_coef.iter().map(|c| g.omega * c).collect()
        } else {
            let d: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            let dmax = d.iter().cloned().fold(0.0, f64::max);
            let reg = 1e-3 * dmax + 1e-12;
            d.iter()
                .zip(&g.energy_coef)
                .map(|(x, c)| g.omega * c * (x + reg).powi(n as i32 - 2))
                .collect()
        };
        // free nodes are 0..cells-1 (node `cells` is the boundary)
        let m = cells;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m - 1];
        for i in 0..cells {
            diag[i] += k[i];
            if i + 1 < m {
                diag[i + 1] += k[i];
                off[i] = -k[i];
            }
        }
        Self {
            lower: off.clone(),
            diag,
            upper: off,
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        solve_tridiagonal(&self.lower, &self.diag, &self.upper, &mut x);
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rescale(f: &DiscreteFunctional, values: &mut [f64]) -> bool {
    let e = energy_with(f.geometry(), values);
    if !(e > 0.0) || !e.is_finite() {
        return false;
    }
    let s = e.powf(-1.0 / f.geometry().n as f64);
    values.iter_mut().for_each(|v| *v *= s);
    true
}

fn rearrange(values: &mut [f64]) {
    let last = values.len() - 1;
    let mut free: Vec<f64> = values[..last].iter().map(|v| v.abs()).collect();
    free.sort_by(|a, b| b.total_cmp(a));
    values[..last].copy_from_slice(&free);
    values[last] = 0.0;
}

fn ascend(
    f: &DiscreteFunctional,
    mut u: Vec<f64>,
    start: StartDescriptor,
    opts: &MaximizerOptions,
    ball_volume: f64,
) -> RunResult {
    if opts.monotone_projection {
        rearrange(&mut u);
        rescale(f, &mut u);
    }
    let first = f.value(&u);
    let initial_value = first.value;
    let mut value = first.value;
    let mut trace = vec![TraceEntry {
        value,
        step: 0.0,
        energy: energy_with(f.geometry(), &u),
    }];
    let mut step = opts.step0;
    let mut status = Status::MaxIters;
    let mut iterations = 0;
    if first.divergent || value > opts.ceiling {
        status = Status::Diverged;
    } else {
        let m = u.len() - 1;
        'outer: for it in 1..=opts.max_iters {
            iterations = it;
            let (_, g) = f.value_and_gradient(&u);
            let metric = Metric::new(f, &u);
            let mut d = metric.solve(&g);
            let free = &u[..m];
            let ku = metric.apply(free);
            let uku = dot(free, &ku);
            if uku > 0.0 {
                let c = dot(free, &g) / uku;
                d.iter_mut().zip(free).for_each(|(di, ui)| *di -= c * ui);
            }
            let dnorm = dot(&d, &metric.apply(&d)).sqrt();
            if !(dnorm > 0.0) || !dnorm.is_finite() {
                status = Status::Converged;
                break;
            }
            loop {
                let t = step / dnorm;
                let mut cand: Vec<f64> = free.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                cand.push(0.0);
                if opts.monotone_projection {
                    rearrange(&mut cand);
                }
                if rescale(f, &mut cand) {
                    let res = f.value(&cand);
                    if res.divergent || res.value > opts.ceiling {
                        u = cand;
                        value = res.value;
                        trace.push(TraceEntry {
                            value,
                            step,
                            energy: energy_with(f.geometry(), &u),
                        });
                        status = Status::Diverged;
                        break 'outer;
                    }
                    if res.value > value {
                        let gain = (res.value - value) / value.abs().max(f64::MIN_POSITIVE);
                        u = cand;
                        value = res.value;
                        trace.push(TraceEntry {
                            value,
                            step,
                            energy: energy_with(f.geometry(), &u),
                        });
                        step *= 2.0;
                        if gain < opts.tol_rel {
                            status = Status::Converged;
                            break 'outer;
                        }
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-14 {
                    status = Status::Converged;
                    break 'outer;
                }
            }
        }
    }
    if status != Status::Diverged && value < ball_volume + 1e-6 {
        status = Status::TrivialPlateau;
    }
    RunResult {
        summary: StartSummary {
            start,
            initial_value,
            value,
            iterations,
            status,
        },
        values: u,
        trace,
    }
}

/// What the first functional is compared against.
#[derive(Debug, Clone)]
pub enum Comparator {
    Functional(FunctionalSpec),
    /// A fixed level such as the concentration level.
    Level(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapVerdict {
    Positive,
    Negative,
    IndistinguishableAtResolution,
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub first: MaximizerReport,
    pub second: Option<MaximizerReport>,
    pub baseline: f64,
    /// `first.best_value - baseline`.
    pub gap: f64,
    pub tolerance: f64,
    pub verdict: GapVerdict,
}

impl GapReport {
    pub fn significant(&self) -> bool {
        self.verdict == GapVerdict::Positive
    }
}

/// Maximizes `spec` and compares it with `other` on the identical grid.
pub fn certified_gap_report(
    spec: &FunctionalSpec,
    other: &Comparator,
    grid: &RadialGrid,
    opts: &MaximizerOptions,
) -> Result<GapReport> {
    let mut first = maximize(spec, grid, opts)?;
    let (second, baseline) = match other {
        Comparator::Functional(s2) => {
            if s2.n != spec.n {
                return Err(Error::DimensionMismatch {
                    function: s2.n,
                    functional: spec.n,
                });
            }
            let r = maximize(s2, grid, opts)?;
            let b = r.best_value;
            (Some(r), b)
        }
        Comparator::Level(level) => (None, *level),
    };
    if let Some(s) = &second {
        if s.compared_thresholds.mt_numeric.is_some() {
            first.compared_thresholds.mt_numeric = s.compared_thresholds.mt_numeric;
        }
    }
    let gap = first.best_value - baseline;
    let tolerance = 10.0 * opts.tol_rel * (first.best_value.abs() + baseline.abs()) + opts.resolution;
    let verdict = if gap.abs() <= tolerance {
        GapVerdict::IndistinguishableAtResolution
    } else if gap > 0.0 {
        GapVerdict::Positive
    } else {
        GapVerdict::Negative
    };
    Ok(GapReport {
        first,
        second,
        baseline,
        gap,
        tolerance,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub j: f64,
    /// Functional value at the normalized Moser start.
    pub start_value: f64,
    /// Maximizer result from that start; absent once an earlier `j` tripped.
    pub best_value: Option<f64>,
    pub status: Option<Status>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub rows: Vec<ProbeRow>,
    pub diverged: bool,
    pub tripped_at_j: Option<f64>,
    /// Fitted slope of `log start_value` against `log j` over the sweep.
    pub growth_slope: f64,
    /// `n (γ/α_n - 1)`.
    pub expected_slope: f64,
}

/// Default Moser sweep for divergence probes: `j = 2^8, 2^16, …, 2^56`.
pub fn default_probe_sweep() -> Vec<f64> {
    (1..=7).map(|k| 2f64.powi(8 * k)).collect()
}

/// Runs the maximizer from Moser starts of increasing `j` until the
/// divergence flag trips or the ceiling is exceeded. The start values are
/// recorded for the whole sweep to measure growth in `j`.
pub fn divergence_probe(
    spec: &FunctionalSpec,
    grid: &RadialGrid,
    opts: &MaximizerOptions,
    j_sweep: &[f64],
) -> Result<DivergenceReport> {
    let dc = DimensionConstants::new(spec.n)?;
    let f = DiscreteFunctional::new(spec, grid)?;
    let arc = Arc::new(grid.clone());
    let mut rows = Vec::new();
    let mut tripped = None;
    for &j in j_sweep {
        let u0 = start_values(&StartDescriptor::Moser { j }, &arc, spec.n, opts.seed)?;
        let start_value = f.value(&u0).value;
        let (best_value, status) = if tripped.is_none() {
            let mut o = opts.clone();
            o.starts = vec![StartDescriptor::Moser { j }];
            let rep = maximize(spec, grid, &o)?;
            let status = if rep.best_value > opts.ceiling {
                Status::Diverged
            } else {
                rep.status
            };
            if status == Status::Diverged {
                tripped = Some(j);
            }
            (Some(rep.best_value), Some(status))
        } else {
            (None, None)
        };
        rows.push(ProbeRow {
            j,
            start_value,
            best_value,
            status,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.j.ln(), r.start_value.ln())).unzip();
    let growth_slope = if x.len() >= 2 { linear_fit(&x, &y).0 } else { f64::NAN };
    Ok(DivergenceReport {
        rows,
        diverged: tripped.is_some(),
        tripped_at_j: tripped,
        growth_slope,
        expected_slope: spec.n as f64 * (spec.gamma / dc.alpha_n - 1.0),
    })
}
