//! The energy `I(u) = (1/n)∫|∇u|^n - ∫F(x, u₊)` and its mountain-pass level
//! along the family `M_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::mountain_pass_function;
use crate::numerics::golden_max;
use crate::pde::nonlinearity::{Nonlinearity, NonlinearitySpec};
use crate::radial::{energy_with, CellGeometry, DimensionConstants, RadialFunction, RadialGrid};

/// `I` bound to one grid.
pub struct EnergyFunctional<'a> {
    nl: &'a dyn Nonlinearity,
    geom: CellGeometry,
}

impl<'a> EnergyFunctional<'a> {
    pub fn new(nl: &'a dyn Nonlinearity, grid: &RadialGrid) -> Result<Self> {
        Ok(Self {
            nl,
            geom: CellGeometry::new(grid, nl.dim())?,
        })
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        let g = &self.geom;
        let potential: f64 = (0..g.cells())
            .map(|i| {
                let m = 0.5 * (values[i] + values[i + 1]);
                if m > 0.0 {
                    g.weight[i] * self.nl.primitive(g.mid[i], m)
                } else {
                    0.0
                }
            })
            .sum();
        energy_with(g, values) / g.n as f64 - g.omega * potential
    }
}

pub fn energy_i(u: &RadialFunction, nl: &dyn Nonlinearity) -> Result<f64> {
    if u.dim() != nl.dim() {
        return Err(Error::DimensionMismatch {
            function: u.dim(),
            functional: nl.dim(),
        });
    }
    Ok(EnergyFunctional::new(nl, u.grid())?.eval(u.values()))
}

/// `I(t u)` for each `t`.
pub fn ray_profile(u: &RadialFunction, nl: &dyn Nonlinearity, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    let e = EnergyFunctional::new(nl, u.grid())?;
    Ok(ts
        .iter()
        .map(|&t| {
            let v: Vec<f64> = u.values().iter().map(|x| t * x).collect();
            (t, e.eval(&v))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountainPassResult {
    pub j: usize,
    pub t_star: f64,
    pub level: f64,
    /// `(1/n)(α_n/α₀)^{n-1}`.
    pub bound: f64,
    pub below_bound: bool,
}

/// `(1/n)(α_n/α₀)^{n-1}`.
pub fn level_bound(spec: &NonlinearitySpec) -> Result<f64> {
    let dc = DimensionConstants::new(spec.n)?;
    let nf = spec.n as f64;
    Ok((dc.alpha_n / spec.alpha0).powf(nf - 1.0) / nf)
}

/// `max_{t ≥ 0} I(t M_j)` by a geometric scan followed by golden-section search.
pub fn mountain_pass_level(spec: &NonlinearitySpec, j: usize, grid: &RadialGrid) -> Result<MountainPassResult> {
    spec.validate()?;
    let mj = mountain_pass_function(j, spec.n, grid)?;
    let e = EnergyFunctional::new(spec, mj.grid())?;
    let g = |t: f64| {
        let v: Vec<f64> = mj.values().iter().map(|x| t * x).collect();
        let y = e.eval(&v);
        if y.is_nan() {
            f64::NEG_INFINITY
        } else {
            y
        }
    };
    let ts: Vec<f64> = (0..=200).map(|k| 1e-3 * 1.05f64.powi(k)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let k = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    if k == 0 || k == ts.len() - 1 || !(vals[k] > 0.0) {
        return Err(Error::NoInteriorMaximum(format!(
            "max of I(t M_j) over the scan sits at t = {} (j = {j})",
            ts[k]
        )));
    }
    let (t_star, level) = golden_max(g, ts[k - 1], ts[k + 1], 1e-10 * ts[k]);
    let bound = level_bound(spec)?;
    Ok(MountainPassResult {
        j,
        t_star,
        level,
        bound,
        below_bound: level < bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family_grid;
    use crate::radial::normalize;
    use std::sync::Arc;

    #[test]
    fn zero_function_has_zero_energy() {
        let spec = NonlinearitySpec::defaults(2).unwrap();
        let u = RadialFunction::zero(Arc::new(RadialGrid::log_graded(100).unwrap()), 2).unwrap();
        assert_eq!(energy_i(&u, &spec).unwrap(), 0.0);
    }

    #[test]
    fn ray_goes_to_minus_infinity() {
        let spec = NonlinearitySpec::defaults(2).unwrap();
        let g = Arc::new(RadialGrid::log_graded(300).unwrap());
        let u = normalize(&RadialFunction::from_fn(g, 2, |r| 1.0 - r).unwrap()).unwrap();
        let ray = ray_profile(&u, &spec, &[0.0, 0.5, 2.0, 4.0]).unwrap();
        assert_eq!(ray[0].1, 0.0);
        assert!(ray[1].1 > 0.0);
        assert!(ray[3].1 < ray[2].1 && ray[3].1 < 0.0);
    }

    #[test]
    fn level_bound_n2_defaults() {
        let spec = NonlinearitySpec::defaults(2).unwrap();
        assert!((level_bound(&spec).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mountain_pass_level_is_interior() {
        let spec = NonlinearitySpec::defaults(2).unwrap();
        let g = family_grid(1500, 1e-3).unwrap();
        let r = mountain_pass_level(&spec, 1000, &g).unwrap();
        assert!(r.t_star > 0.0 && r.level > 0.0);
    }
}
