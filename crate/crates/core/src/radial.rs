//! Grids, cell geometry, dimensional constants and the Dirichlet n-energy of
//! radial profiles on the unit ball.
//!
//! A profile is stored by its nodal values. Cells that do not touch the origin
//! interpolate linearly in `log r`, so `u' ∝ 1/r` on each of them; the cell
//! `[0, r_1]` interpolates linearly in `r`. In the variable `x = -log r` the
//! radial n-energy `ω ∫ |u'|^n r^{n-1} dr` becomes the plain one-dimensional
//! energy `ω ∫ |du/dx|^n dx`, which the log-linear cells integrate exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GRID_NODES: usize = 16;

/// Default strength of the geometric grading toward the origin.
pub const DEFAULT_STRENGTH: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Grading {
    Uniform,
    /// Geometric nodes with `nodes[1] = e^{-strength}`.
    LogGradedOrigin { strength: f64 },
    /// Geometric toward 0 and, mirrored, toward 1.
    DoublyGraded { strength0: f64, strength1: f64 },
}

impl Default for Grading {
    fn default() -> Self {
        Grading::LogGradedOrigin {
            strength: DEFAULT_STRENGTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    grading: Grading,
}

impl RadialGrid {
    pub fn new(count: usize, grading: Grading) -> Result<Self> {
        if count < MIN_GRID_NODES {
            return Err(Error::GridTooSmall {
                count,
                min: MIN_GRID_NODES,
            });
        }
        let nodes = match grading {
            Grading::Uniform => (0..count)
                .map(|k| k as f64 / (count - 1) as f64)
                .collect(),
            Grading::LogGradedOrigin { strength } => {
                check_strength(strength)?;
                let m = (count - 2) as f64;
                let mut nodes = Vec::with_capacity(count);
                nodes.push(0.0);
                for k in 1..count {
                    nodes.push((-strength * (1.0 - (k - 1) as f64 / m)).exp());
                }
                nodes
            }
            Grading::DoublyGraded {
                strength0,
                strength1,
            } => {
                check_strength(strength0)?;
                check_strength(strength1)?;
                doubly_graded(count, strength0, strength1)
            }
        };
        let mut nodes = nodes;
        nodes[0] = 0.0;
        *nodes.last_mut().unwrap() = 1.0;
        Self::from_nodes_with(nodes, grading)
    }

    /// Log-graded grid with the default strength.
    pub fn log_graded(count: usize) -> Result<Self> {
        Self::new(count, Grading::default())
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        Self::from_nodes_with(nodes, Grading::Uniform)
    }

    fn from_nodes_with(nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < MIN_GRID_NODES {
            return Err(Error::GridTooSmall {
                count: nodes.len(),
                min: MIN_GRID_NODES,
            });
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid(
                "first node must be 0 and last node must be 1".into(),
            ));
        }
        if let Some(k) = nodes
            .windows(2)
            .position(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::InvalidGrid(format!(
                "nodes not strictly increasing at index {}",
                k + 1
            )));
        }
        Ok(Self { nodes, grading })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of nodes strictly inside `(0, r)`.
    pub fn nodes_below(&self, r: f64) -> usize {
        self.nodes.iter().filter(|&&x| x > 0.0 && x < r).count()
    }

    /// Copy of the grid with the given radii inserted as nodes. Radii already
    /// present (to relative 1e-13) are snapped onto instead of duplicated.
    pub fn with_breakpoints(&self, radii: &[f64]) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        for &b in radii {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::OutOfDomain {
                    what: "breakpoint",
                    value: b,
                    domain: "(0, 1)",
                });
            }
            let pos = nodes.partition_point(|&x| x < b);
            let near = |k: usize| (nodes[k] - b).abs() <= 1e-13 * b;
            if near(pos) {
                nodes[pos] = b;
            } else if pos > 0 && near(pos - 1) {
                nodes[pos - 1] = b;
            } else {
                nodes.insert(pos, b);
            }
        }
        Self::from_nodes_with(nodes, self.grading)
    }

    /// Index of the cell containing `r` (cells are `[nodes[i], nodes[i+1]]`).
    pub fn locate(&self, r: f64) -> usize {
        let pos = self.nodes.partition_point(|&x| x <= r);
        pos.clamp(1, self.nodes.len() - 1) - 1
    }
}

fn check_strength(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStrength(s))
    }
}

fn doubly_graded(count: usize, s0: f64, s1: f64) -> Vec<f64> {
    // Geometric from e^{-s0} up to 1/2, mirrored geometric from 1/2 to
    // 1 - e^{-s1}; nodes shared out by log-length.
    let len0 = s0 - 2f64.ln();
    let len1 = s1 - 2f64.ln();
    let (len0, len1) = (len0.max(1.0), len1.max(1.0));
    let interior = count - 3; // excluding 0, 1/2-meeting point counted once, 1
    let n0 = ((interior as f64) * len0 / (len0 + len1)).round().max(2.0) as usize;
    let n1 = interior.saturating_sub(n0).max(2);
    let lo = (-s0).exp().min(0.25);
    let hi = (-s1).exp().min(0.25);
    let mut nodes = Vec::with_capacity(count);
    nodes.push(0.0);
    for k in 0..=n0 {
        let t = k as f64 / n0 as f64;
        nodes.push(lo * (0.5 / lo).powf(t));
    }
    for k in (0..n1).rev() {
        let t = k as f64 / n1 as f64;
        nodes.push(1.0 - hi * (0.5 / hi).powf(t));
    }
    nodes.push(1.0);
    nodes.dedup();
    nodes
}

/// Per-cell geometry for a grid in dimension n.
#[derive(Debug, Clone)]
pub struct CellGeometry {
    pub n: usize,
    /// `ω_{n-1}`.
    pub omega: f64,
    /// Exact `∫_a^b r^{n-1} dr`.
    pub weight: Vec<f64>,
    /// Evaluation radius (geometric mean of the cell ends, `r_1 / 2` at the origin).
    pub mid: Vec<f64>,
    /// Energy coefficient: `E = ω Σ coef_i |u_{i+1} - u_i|^n`.
    pub energy_coef: Vec<f64>,
    /// Log-width `log(b/a)`; for the origin cell the effective width `n^{1/(n-1)}`.
    pub log_width: Vec<f64>,
}

impl CellGeometry {
    pub fn new(grid: &RadialGrid, n: usize) -> Result<Self> {
        let constants = DimensionConstants::new(n)?;
        let nodes = grid.nodes();
        let nf = n as f64;
        let cells = grid.cells();
        let mut weight = Vec::with_capacity(cells);
        let mut mid = Vec::with_capacity(cells);
        let mut energy_coef = Vec::with_capacity(cells);
        let mut log_width = Vec::with_capacity(cells);
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            weight.push(cell_weight(a, b, n));
            if a == 0.0 {
                mid.push(0.5 * b);
                energy_coef.push(1.0 / nf);
                log_width.push(nf.powf(1.0 / (nf - 1.0)));
            } else {
                let l = (b / a).ln();
                mid.push((a * b).sqrt());
                energy_coef.push(l.powf(1.0 - nf));
                log_width.push(l);
            }
        }
        Ok(Self {
            n,
            omega: constants.omega,
            weight,
            mid,
            energy_coef,
            log_width,
        })
    }

    pub fn cells(&self) -> usize {
        self.weight.len()
    }
}

/// `∫_a^b r^{n-1} dr`, evaluated without cancellation for thin cells.
fn cell_weight(a: f64, b: f64, n: usize) -> f64 {
    if a == 0.0 {
        return b.powi(n as i32) / n as f64;
    }
    // (b^n - a^n)/n = a^n (q^n - 1)/n with q = b/a
    let q = b / a;
    a.powi(n as i32) * ((n as f64) * q.ln()).exp_m1() / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionConstants {
    pub n: usize,
    /// Surface measure of the unit sphere `S^{n-1}`.
    pub omega: f64,
    /// Volume of the unit ball, `|B|`.
    pub ball_volume: f64,
    pub alpha_n: f64,
    /// `Σ_{i=1}^{n-1} 1/i`.
    pub harmonic_partial: f64,
    /// Concentration level `|B| (1 + e^{harmonic_partial})`.
    pub concentration_level: f64,
}

impl DimensionConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let nf = n as f64;
        let omega = 2.0 * PI.powf(0.5 * nf) / gamma_half_integer(n);
        let ball_volume = omega / nf;
        let alpha_n = nf * omega.powf(1.0 / (nf - 1.0));
        let harmonic_partial: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
        Ok(Self {
            n,
            omega,
            ball_volume,
            alpha_n,
            harmonic_partial,
            concentration_level: ball_volume * (1.0 + harmonic_partial.exp()),
        })
    }

    /// `α_n` from the volume form `n^{n/(n-1)} |B|^{1/(n-1)}`.
    pub fn alpha_n_from_volume(&self) -> f64 {
        let nf = self.n as f64;
        nf.powf(nf / (nf - 1.0)) * self.ball_volume.powf(1.0 / (nf - 1.0))
    }

    /// `n / (n-1)`.
    pub fn critical_exponent(&self) -> f64 {
        let nf = self.n as f64;
        nf / (nf - 1.0)
    }
}

pub fn constants_for(n: usize) -> Result<DimensionConstants> {
    DimensionConstants::new(n)
}

/// `Γ(m/2)` by the recursion from `Γ(1) = 1`, `Γ(1/2) = √π`.
fn gamma_half_integer(m: usize) -> f64 {
    let (mut g, mut x) = if m.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = m as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Nodal values of a radial profile in dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    n: usize,
}

impl RadialFunction {
    /// The last value must be zero (Dirichlet condition) and all values finite.
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite nodal value {v}")));
        }
        if *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidParameter(
                "boundary value u(1) must be exactly 0".into(),
            ));
        }
        Ok(Self { grid, values, n })
    }

    pub fn zero(grid: Arc<RadialGrid>, n: usize) -> Result<Self> {
        let len = grid.len();
        Self::new(grid, vec![0.0; len], n)
    }

    /// Samples `profile` at the nodes; the value at r = 1 is forced to 0.
    pub fn from_fn(grid: Arc<RadialGrid>, n: usize, profile: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&r| profile(r)).collect();
        *values.last_mut().unwrap() = 0.0;
        Self::new(grid, values, n)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * t).collect(),
            n: self.n,
        }
    }

    /// Same grid, new values (validated).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values, self.n)
    }

    /// Interpolated value, using the same element shapes as the energy.
    pub fn value_at(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        let nodes = self.grid.nodes();
        let i = self.grid.locate(r);
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (ua, ub) = (self.values[i], self.values[i + 1]);
        let t = if a == 0.0 {
            r / b
        } else if r <= a {
            0.0
        } else {
            (r / a).ln() / (b / a).ln()
        };
        ua + t * (ub - ua)
    }

    /// Piecewise derivative `u'` on each cell, evaluated at the cell's
    /// evaluation radius.
    pub fn cell_derivatives(&self) -> Vec<f64> {
        let nodes = self.grid.nodes();
        nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, u)| {
                let (a, b) = (r[0], r[1]);
                if a == 0.0 {
                    (u[1] - u[0]) / b
                } else {
                    (u[1] - u[0]) / (b / a).ln() / (a * b).sqrt()
                }
            })
            .collect()
    }

    /// Interpolates onto another grid (same dimension).
    pub fn resample(&self, grid: Arc<RadialGrid>) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| self.value_at(r)).collect::<Vec<_>>();
        let mut values = values;
        *values.last_mut().unwrap() = 0.0;
        Self::new(grid, values, self.n)
    }
}

/// `∫_B |∇u|^n dx` of the interpolated profile.
pub fn dirichlet_energy(u: &RadialFunction) -> f64 {
    let geom = CellGeometry::new(u.grid(), u.dim()).expect("validated dimension");
    energy_with(&geom, u.values())
}

/// Energy on precomputed geometry.
pub fn energy_with(geom: &CellGeometry, values: &[f64]) -> f64 {
    let n = geom.n as i32;
    let sum: f64 = values
        .windows(2)
        .zip(&geom.energy_coef)
        .map(|(u, c)| c * (u[1] - u[0]).abs().powi(n))
        .sum();
    geom.omega * sum
}

/// Rescales `u` onto the unit energy sphere.
pub fn normalize(u: &RadialFunction) -> Result<RadialFunction> {
    let e = dirichlet_energy(u);
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::ZeroEnergy);
    }
    Ok(u.scaled(e.powf(-1.0 / u.dim() as f64)))
}

/// Upper bound `(n/α_n)^{(n-1)/n} (-log r)^{(n-1)/n}` on `|u(r)|` for unit-energy `u`.
pub fn pointwise_bound(r: f64, n: usize) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: "(0, 1)",
        });
    }
    let c = DimensionConstants::new(n)?;
    let nf = n as f64;
    let e = (nf - 1.0) / nf;
    Ok((nf / c.alpha_n).powf(e) * (-r.ln()).powf(e))
}
