//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-16,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], terms: &[(f64, &[f64; D])], h: f64) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `hs` from `(t, y)` with `k1 = rhs(t, y)`.
/// Returns the fifth-order solution, the derivative there and the embedded
/// error estimate.
fn dp_step<const D: usize>(
    rhs: &mut impl FnMut(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    k1: &[f64; D],
    hs: f64,
) -> ([f64; D], [f64; D], [f64; D]) {
    let k2 = rhs(t + C2 * hs, &axpy(y, &[(A21, k1)], hs));
    let k3 = rhs(t + C3 * hs, &axpy(y, &[(A31, k1), (A32, &k2)], hs));
    let k4 = rhs(t + C4 * hs, &axpy(y, &[(A41, k1), (A42, &k2), (A43, &k3)], hs));
    let k5 = rhs(
        t + C5 * hs,
        &axpy(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
    );
    let k6 = rhs(
        t + hs,
        &axpy(y, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs),
    );
    let y_new = axpy(y, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
    let k7 = rhs(t + hs, &y_new);
    let mut e = [0.0; D];
    for i in 0..D {
        e[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, k7, e)
}

/// Integrates with `steps` equal steps of the fifth-order formula and no
/// error control. Meant for convergence studies.
pub fn integrate_fixed<const D: usize>(
    rhs: &mut impl FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t1: f64,
    steps: usize,
) -> Result<[f64; D]> {
    let steps = steps.max(1);
    let hs = (t1 - t0) / steps as f64;
    let mut y = y0;
    let mut k1 = rhs(t0, &y);
    for k in 0..steps {
        let t = t0 + k as f64 * hs;
        let (y_new, k7, _) = dp_step(rhs, t, &y, &k1, hs);
        if y_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { r: t });
        }
        y = y_new;
        k1 = k7;
    }
    Ok(y)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1`, calling `observe` after
/// every accepted step. `h` carries the step size between calls.
/// Returns the state at the final time reached (`t1` unless stopped).
pub fn integrate<const D: usize>(
    rhs: &mut impl FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t1: f64,
    h: &mut f64,
    opts: &OdeOptions,
    mut observe: impl FnMut(f64, &[f64; D]) -> Control,
) -> Result<(f64, [f64; D])> {
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok((t, y));
    }
    if !(*h > 0.0) || !h.is_finite() {
        *h = span * 1e-3;
    }
    let mut k1 = rhs(t, &y);
    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::StepUnderflow { r: t });
        }
        let last = t + *h >= t1;
        let hs = if last { t1 - t } else { *h };
        let (y_new, k7, e) = dp_step(rhs, t, &y, &k1, hs);
        let mut err = 0.0f64;
        let mut finite = true;
        for i in 0..D {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let q = e[i] / sc;
            if !q.is_finite() || !y_new[i].is_finite() {
                finite = false;
            }
            err = err.max(q.abs());
        }
        if !finite {
            if hs <= opts.h_min.max(1e-14 * t.abs()) {
                return Err(Error::BlowUp { r: t });
            }
            *h = 0.25 * hs;
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !last {
                *h = hs * fac;
            } else {
                *h = (*h).max(hs * fac);
            }
            if observe(t, &y) == Control::Stop {
                return Ok((t, y));
            }
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            *h = hs * fac;
            if *h < opts.h_min.max(1e-15 * t.abs()) {
                return Err(Error::StepUnderflow { r: t });
            }
        }
    }
    Ok((t, y))
}
