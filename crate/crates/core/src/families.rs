//! Closed-form test functions: Moser's sequence, the concentrating family and
//! the mountain-pass family built from it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{DiscreteFunctional, FunctionalKind, FunctionalSpec};
use crate::radial::{
    dirichlet_energy, DimensionConstants, Grading, RadialFunction, RadialGrid, DEFAULT_STRENGTH,
};

/// Nodes required strictly inside the inner region of a family member.
pub const MIN_INNER_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserParams {
    pub j: f64,
    pub n: usize,
}

impl MoserParams {
    pub fn new(j: f64, n: usize) -> Result<Self> {
        DimensionConstants::new(n)?;
        if !(j > 1.0 && j.is_finite()) {
            return Err(Error::OutOfDomain {
                what: "j",
                value: j,
                domain: "(1, ∞)",
            });
        }
        Ok(Self { j, n })
    }

    /// The continuum profile.
    pub fn profile(&self) -> impl Fn(f64) -> f64 {
        let omega = DimensionConstants::new(self.n).unwrap().omega;
        let nf = self.n as f64;
        let l = self.j.ln();
        let pre = omega.powf(-1.0 / nf);
        let inner = pre * l.powf((nf - 1.0) / nf);
        let outer = pre / l.powf(1.0 / nf);
        let rj = 1.0 / self.j;
        move |r: f64| if r <= rj { inner } else { -outer * r.ln() }
    }
}

fn require_resolved(grid: &RadialGrid, radius: f64) -> Result<()> {
    let found = grid.nodes_below(radius);
    if found < MIN_INNER_NODES {
        return Err(Error::UnderResolved {
            radius,
            found,
            needed: MIN_INNER_NODES,
        });
    }
    Ok(())
}

/// Log-graded grid deep enough for a family member with inner scale `eps`.
pub fn family_grid(count: usize, eps: f64) -> Result<RadialGrid> {
    let strength = DEFAULT_STRENGTH.max(-eps.ln() + 10.0);
    RadialGrid::new(count, Grading::LogGradedOrigin { strength })
}

/// Moser's function `u_j` sampled on `grid` with `1/j` inserted as a node.
pub fn moser_function(p: MoserParams, grid: &RadialGrid) -> Result<RadialFunction> {
    let p = MoserParams::new(p.j, p.n)?;
    let rj = 1.0 / p.j;
    let grid = grid.with_breakpoints(&[rj])?;
    require_resolved(&grid, rj)?;
    RadialFunction::from_fn(Arc::new(grid), p.n, p.profile())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentratingParams {
    pub eps: f64,
    pub n: usize,
    /// `R = -log ε`.
    pub r_big: f64,
    /// Continuum normalization constant.
    pub c: f64,
    /// Continuity constant for the continuum normalization.
    pub a: f64,
    /// Normalization constant that makes the sampled function unit-energy on
    /// its grid.
    pub c_grid: f64,
}

/// Shape data of the unnormalized profile `G`, with `u_ε = c^{-1/(n-1)} G`.
#[derive(Debug, Clone, Copy)]
struct Shape {
    n: usize,
    eps: f64,
    r_big: f64,
    alpha_n: f64,
    k: f64,
    /// Value of `G` at the origin.
    x: f64,
}

impl Shape {
    fn new(eps: f64, n: usize) -> Result<Self> {
        let dc = DimensionConstants::new(n)?;
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::OutOfDomain {
                what: "eps",
                value: eps,
                domain: "(0, 1/2)",
            });
        }
        let nf = n as f64;
        let r_big = -eps.ln();
        let k = (dc.omega / nf).powf(1.0 / (nf - 1.0));
        let w = k * r_big.powf(nf / (nf - 1.0));
        let x = -(nf / dc.alpha_n) * (r_big * eps).ln() + ((nf - 1.0) / dc.alpha_n) * w.ln_1p();
        Ok(Self {
            n,
            eps,
            r_big,
            alpha_n: dc.alpha_n,
            k,
            x,
        })
    }

    fn eval(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        if r <= self.r_big * self.eps {
            let s = r / self.eps;
            self.x - ((nf - 1.0) / self.alpha_n) * (self.k * s.powf(nf / (nf - 1.0))).ln_1p()
        } else {
            -(nf / self.alpha_n) * r.ln()
        }
    }

    /// Exact n-energy of `G`, i.e. `c^{n/(n-1)}`.
    fn energy(&self) -> f64 {
        let nf = self.n as f64;
        let w = self.k * self.r_big.powf(nf / (nf - 1.0));
        let v = w / (1.0 + w);
        // -log(1 - v) - Σ_{i<n} v^i / i, summed as the tail Σ_{i≥n} v^i / i
        let tail = if v < 0.5 {
            let mut s = 0.0;
            let mut p = v.powi(self.n as i32);
            let mut i = nf;
            loop {
                let t = p / i;
                s += t;
                if t < 1e-18 * s {
                    break;
                }
                p *= v;
                i += 1.0;
            }
            s
        } else {
            -(-v).ln_1p() - (1..self.n).map(|i| v.powi(i as i32) / i as f64).sum::<f64>()
        };
        (nf / self.alpha_n) * (-self.r_big.ln() - self.eps.ln()) + ((nf - 1.0) / self.alpha_n) * tail
    }
}

/// `c^{n/(n-1)}` from its leading-order expansion in `ε`.
pub fn c_expansion(eps: f64, n: usize) -> Result<f64> {
    let dc = DimensionConstants::new(n)?;
    let nf = n as f64;
    Ok(-(nf / dc.alpha_n) * eps.ln() + (dc.omega / nf).ln() / dc.alpha_n
        - ((nf - 1.0) / dc.alpha_n) * dc.harmonic_partial)
}

/// The concentrating family member `u_ε`, sampled on `grid` with the
/// matching radius `Rε` inserted as a node and rescaled to unit energy.
pub fn concentrating_function(
    eps: f64,
    n: usize,
    grid: &RadialGrid,
) -> Result<(RadialFunction, ConcentratingParams)> {
    let shape = Shape::new(eps, n)?;
    let nf = n as f64;
    let rm = shape.r_big * eps;
    let grid = Arc::new(grid.with_breakpoints(&[rm])?);
    require_resolved(&grid, eps)?;
    let g = RadialFunction::from_fn(grid, n, |r| shape.eval(r))?;
    let cp = shape.energy();
    let c = cp.powf((nf - 1.0) / nf);
    let cp_grid = dirichlet_energy(&g);
    let c_grid = cp_grid.powf((nf - 1.0) / nf);
    let u = g.scaled(cp_grid.powf(-1.0 / nf));
    Ok((
        u,
        ConcentratingParams {
            eps,
            n,
            r_big: shape.r_big,
            c,
            a: shape.x - cp,
            c_grid,
        },
    ))
}

/// Continuum value of the unnormalized shape `G` (for oracles and plotting).
pub fn concentrating_shape(eps: f64, n: usize) -> Result<impl Fn(f64) -> f64> {
    let s = Shape::new(eps, n)?;
    Ok(move |r: f64| s.eval(r))
}

/// `M_j`, the concentrating function with `ε = 1/j`.
pub fn mountain_pass_function(j: usize, n: usize, grid: &RadialGrid) -> Result<RadialFunction> {
    if j < 8 {
        return Err(Error::OutOfDomain {
            what: "j",
            value: j as f64,
            domain: "[8, ∞)",
        });
    }
    Ok(concentrating_function(1.0 / j as f64, n, grid)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub j: f64,
    pub value: f64,
    pub lower_bound: f64,
    /// The functional hit the exponent cap.
    pub flag: bool,
}

/// Functional values along Moser's sequence with the analytic lower bound
/// `|B| j^{n(γ/α_n - 1)}`.
pub fn blowup_table(
    kind: FunctionalKind,
    gamma: f64,
    alpha: f64,
    n: usize,
    j_list: &[f64],
    grid: &RadialGrid,
) -> Result<Vec<BlowupRow>> {
    if !matches!(kind, FunctionalKind::Mt1 | FunctionalKind::Mt2) {
        return Err(Error::InvalidParameter(format!(
            "blow-up tables are defined for MT1 and MT2, got {kind:?}"
        )));
    }
    let dc = DimensionConstants::new(n)?;
    if gamma < dc.alpha_n * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} is below alpha_n = {}",
            dc.alpha_n
        )));
    }
    let spec = FunctionalSpec::of_kind(kind, n, alpha)?.with_gamma(gamma)?;
    let rate = n as f64 * (gamma / dc.alpha_n - 1.0);
    j_list
        .iter()
        .map(|&j| {
            let u = moser_function(MoserParams::new(j, n)?, grid)?;
            let res = DiscreteFunctional::new(&spec, u.grid())?.value(u.values());
            Ok(BlowupRow {
                j,
                value: res.value,
                lower_bound: dc.ball_volume * (rate * j.ln()).exp(),
                flag: res.divergent,
            })
        })
        .collect()
}
