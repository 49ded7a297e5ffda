//! First Dirichlet eigenvalue of the n-Laplacian on the unit ball, by shooting
//! with `u(0) = 1` and bisection on `λ`.

use crate::error::{Error, Result};
use crate::ode::{integrate, Control, OdeOptions};
use crate::pde::shooting::{derivative_from_flux, series_state, shoot_with, START_RADIUS};
use crate::radial::{DimensionConstants, RadialGrid};

/// Whether the shot for `λ` stays positive on `[0, 1]`.
fn stays_positive(lambda: f64, n: usize, opts: &OdeOptions) -> Result<bool> {
    let rs = START_RADIUS;
    let g = |u: f64| lambda * u.abs().powi(n as i32 - 2) * u;
    let y0 = series_state(1.0, g(1.0), rs, n);
    let mut rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] {
        [
            derivative_from_flux(y[1], r, n),
            -r.powi(n as i32 - 1) * g(y[0]),
        ]
    };
    let mut h = 0.0;
    let (_, y) = integrate(&mut rhs, rs, y0, 1.0, &mut h, opts, |_, y| {
        if y[0] <= 0.0 {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    Ok(y[0] > 0.0)
}

/// `λ₁(B)` for the n-Laplacian, to relative accuracy about 1e-10.
pub fn lambda1(n: usize) -> Result<f64> {
    DimensionConstants::new(n)?;
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        ..OdeOptions::default()
    };
    let mut lo = 1e-3;
    if !stays_positive(lo, n, &opts)? {
        return Err(Error::RootFind {
            lo,
            hi: lo,
            reason: "shot already changes sign at the lower end".into(),
        });
    }
    let mut hi = 1.0;
    while stays_positive(hi, n, &opts)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::RootFind {
                lo,
                hi,
                reason: "no sign change found".into(),
            });
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if stays_positive(mid, n, &opts)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenfunction for `λ` normalized by `u(0) = 1`, sampled at the grid nodes.
pub fn eigenfunction(n: usize, lambda: f64, grid: &RadialGrid) -> Result<Vec<f64>> {
    let g = move |_r: f64, u: f64| lambda * u.abs().powi(n as i32 - 2) * u;
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        ..OdeOptions::default()
    };
    Ok(shoot_with(&g, n, 1.0, grid.nodes(), &opts)?.0)
}
