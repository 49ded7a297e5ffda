//! Shooting for the radial problem `-(r^{n-1}|u'|^{n-2}u')' = r^{n-1} f(r, u₊)`,
//! `u'(0) = 0`, `u(1) = 0`.
//!
//! The state is `(u, w)` with flux `w = r^{n-1}|u'|^{n-2}u'`, so that
//! `w' = -r^{n-1} f(r, u₊)` and `u' = sign(w) (|w| / r^{n-1})^{1/(n-1)}`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, integrate_fixed, Control, OdeOptions};
use crate::pde::nonlinearity::Nonlinearity;
use crate::radial::{RadialFunction, RadialGrid};

/// Radius at which the series start hands over to the integrator.
pub const START_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    /// Initial value `u(0)`.
    pub s: f64,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub flux: Vec<f64>,
    /// `u(1)`.
    pub boundary_residual: f64,
    pub monotone: bool,
    /// `u > 0` on `[0, 1)`.
    pub positive: bool,
}

impl ShootingResult {
    /// The solution as a grid function, with the boundary value set to 0.
    pub fn profile(&self) -> Result<RadialFunction> {
        let grid = Arc::new(RadialGrid::from_nodes(self.nodes.clone())?);
        let mut v = self.u.clone();
        *v.last_mut().unwrap() = 0.0;
        RadialFunction::new(grid, v, self.n)
    }
}

pub(crate) fn derivative_from_flux(w: f64, r: f64, n: usize) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    let rn = r.powi(n as i32 - 1);
    w.signum() * (w.abs() / rn).powf(1.0 / (n as f64 - 1.0))
}

/// Series state near the origin for a forcing `g ≈ g0` that is locally constant:
/// `w = -g0 r^n / n`, `u = s - ((n-1)/n) (g0/n)^{1/(n-1)} r^{n/(n-1)}`.
pub(crate) fn series_state(s: f64, g0: f64, r: f64, n: usize) -> [f64; 2] {
    let nf = n as f64;
    let w = -g0 * r.powi(n as i32) / nf;
    let mag = (g0.abs() / nf).powf(1.0 / (nf - 1.0)) * r.powf(nf / (nf - 1.0)) * (nf - 1.0) / nf;
    [s - g0.signum() * mag, w]
}

/// Integrates the flux system with forcing `g(r, u)` over the given nodes
/// (which must start at 0 and end at 1). The forcing enters as
/// `w' = -r^{n-1} g(r, u)`.
pub(crate) fn shoot_with(
    g: &(dyn Fn(f64, f64) -> f64 + Sync),
    n: usize,
    s: f64,
    nodes: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rs = START_RADIUS.min(0.5 * nodes[1]).max(f64::MIN_POSITIVE);
    let g0 = g(0.5 * rs, s);
    if !g0.is_finite() {
        return Err(Error::BlowUp { r: 0.0 });
    }
    let mut u = Vec::with_capacity(nodes.len());
    let mut w = Vec::with_capacity(nodes.len());
    let mut state = series_state(s, g0, rs, n);
    let mut r = rs;
    let mut h = 0.0;
    let mut rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        [
            derivative_from_flux(y[1], r, n),
            -r.powi(n as i32 - 1) * g(r, y[0]),
        ]
    };
    for &node in nodes {
        if node <= rs {
            let st = series_state(s, g0, node, n);
            u.push(st[0]);
            w.push(st[1]);
            continue;
        }
        let (_, y) = integrate(&mut rhs, r, state, node, &mut h, opts, |_, _| Control::Continue)?;
        if !y[0].is_finite() || !y[1].is_finite() {
            return Err(Error::BlowUp { r: node });
        }
        state = y;
        r = node;
        u.push(y[0]);
        w.push(y[1]);
    }
    Ok((u, w))
}

/// `u(1)` from a shot with `steps` equal integrator steps on
/// `[START_RADIUS, 1]`, for convergence studies.
pub fn boundary_value_fixed(nl: &dyn Nonlinearity, s: f64, steps: usize) -> Result<f64> {
    let n = nl.dim();
    let rs = START_RADIUS;
    let y0 = series_state(s, nl.f(0.5 * rs, s), rs, n);
    let mut rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        [derivative_from_flux(y[1], r, n), -r.powi(n as i32 - 1) * nl.f(r, y[0])]
    };
    Ok(integrate_fixed(&mut rhs, rs, y0, 1.0, steps)?[0])
}

fn assemble(s: f64, n: usize, nodes: &[f64], u: Vec<f64>, flux: Vec<f64>) -> ShootingResult {
    let du: Vec<f64> = nodes
        .iter()
        .zip(&flux)
        .map(|(&r, &w)| if r == 0.0 { 0.0 } else { derivative_from_flux(w, r, n) })
        .collect();
    let monotone = u.windows(2).all(|p| p[1] <= p[0]);
    let positive = u[..u.len() - 1].iter().all(|&v| v > 0.0);
    ShootingResult {
        s,
        n,
        nodes: nodes.to_vec(),
        boundary_residual: *u.last().unwrap(),
        u,
        du,
        flux,
        monotone,
        positive,
    }
}

/// Shoots from `u(0) = s` and records `u`, `u'` and the flux at every node.
pub fn shoot(
    nl: &dyn Nonlinearity,
    s: f64,
    grid: &RadialGrid,
) -> Result<ShootingResult> {
    shoot_opts(nl, s, grid, &OdeOptions::default())
}

pub fn shoot_opts(
    nl: &dyn Nonlinearity,
    s: f64,
    grid: &RadialGrid,
    opts: &OdeOptions,
) -> Result<ShootingResult> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "s",
            value: s,
            domain: "(0, ∞)",
        });
    }
    let n = nl.dim();
    let g = |r: f64, u: f64| nl.f(r, u);
    let (u, w) = shoot_with(&g, n, s, grid.nodes(), opts)?;
    Ok(assemble(s, n, grid.nodes(), u, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvpOptions {
    /// Upper end of the geometric scan in `s`.
    pub s_max: f64,
    /// The scan starts at `s_max · s_min_ratio`.
    pub s_min_ratio: f64,
    pub scan_samples: usize,
    pub residual_tol: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self {
            s_max: 10.0,
            s_min_ratio: 1e-3,
            scan_samples: 64,
            residual_tol: 1e-8,
        }
    }
}

/// Residual used for bracketing: blow-up counts as overshooting (negative).
fn residual(nl: &dyn Nonlinearity, s: f64, grid: &RadialGrid) -> Result<f64> {
    match shoot(nl, s, grid) {
        Ok(r) => Ok(r.boundary_residual),
        Err(Error::BlowUp { .. }) | Err(Error::StepUnderflow { .. }) => Ok(-1.0),
        Err(e) => Err(e),
    }
}

/// Finds `s` with `|u(1)| ≤ tol`. With `bracket = None` the interval
/// `(s_max · s_min_ratio, s_max]` is scanned geometrically for a sign change.
pub fn solve_bvp(
    nl: &dyn Nonlinearity,
    bracket: Option<(f64, f64)>,
    grid: &RadialGrid,
    opts: &BvpOptions,
) -> Result<ShootingResult> {
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => scan_bracket(nl, grid, opts)?,
    };
    let mut flo = residual(nl, lo, grid)?;
    let fhi = residual(nl, hi, grid)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let res = match shoot(nl, mid, grid) {
            Ok(r) => r,
            Err(Error::BlowUp { .. }) | Err(Error::StepUnderflow { .. }) => {
                hi = mid;
                continue;
            }
            Err(e) => return Err(e),
        };
        let fm = res.boundary_residual;
        if fm.abs() <= opts.residual_tol {
            return Ok(res);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::RootFind {
        lo,
        hi,
        reason: format!("boundary residual did not reach {}", opts.residual_tol),
    })
}

fn scan_bracket(nl: &dyn Nonlinearity, grid: &RadialGrid, opts: &BvpOptions) -> Result<(f64, f64)> {
    let m = opts.scan_samples.max(2);
    let s_lo = opts.s_max * opts.s_min_ratio;
    let samples: Vec<f64> = (0..m)
        .map(|k| s_lo * (opts.s_max / s_lo).powf(k as f64 / (m - 1) as f64))
        .collect();
    let res: Vec<f64> = samples
        .par_iter()
        .map(|&s| residual(nl, s, grid))
        .collect::<Result<_>>()?;
    for k in 0..m - 1 {
        if res[k] > 0.0 && res[k + 1] <= 0.0 {
            return Ok((samples[k], samples[k + 1]));
        }
    }
    Err(Error::NoBracket {
        lo: s_lo,
        hi: opts.s_max,
    })
}

/// Largest violation of `-w(r) = ∫_0^r f(s, u₊(s)) s^{n-1} ds` over all nodes.
/// The right side is integrated independently of the shooting: cubic Hermite
/// interpolation of `u` from nodal values and slopes, with three-point Gauss
/// quadrature per cell.
pub fn flux_identity_residual(nl: &dyn Nonlinearity, sol: &ShootingResult) -> f64 {
    const GX: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const GW: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let n = sol.n as i32;
    let mut acc = 0.0;
    let mut worst = (sol.flux[0] + acc).abs();
    for i in 0..sol.nodes.len() - 1 {
        let (a, b) = (sol.nodes[i], sol.nodes[i + 1]);
        let h = b - a;
        let (ua, ub, da, db) = (sol.u[i], sol.u[i + 1], sol.du[i], sol.du[i + 1]);
        let mut cell = 0.0;
        for (x, wgt) in GX.iter().zip(GW) {
            let t = 0.5 * (x + 1.0);
            let t2 = t * t;
            let t3 = t2 * t;
            let uh = (2.0 * t3 - 3.0 * t2 + 1.0) * ua
                + (t3 - 2.0 * t2 + t) * h * da
                + (-2.0 * t3 + 3.0 * t2) * ub
                + (t3 - t2) * h * db;
            let r = a + t * h;
            cell += wgt * nl.f(r, uh) * r.powi(n - 1);
        }
        acc += 0.5 * h * cell;
        worst = worst.max((sol.flux[i + 1] + acc).abs());
    }
    worst
}
