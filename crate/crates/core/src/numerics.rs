//! Small scalar routines shared across modules.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`; stops when the bracket
/// width drops below `xtol` or `|f| <= ftol`.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::RootFind {
            lo,
            hi,
            reason: format!("no sign change (f(lo) = {flo}, f(hi) = {fhi})"),
        });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= ftol || (hi - lo).abs() <= xtol {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[i]`
/// couples row `i+1` to `i`, `upper[i]` couples row `i` to `i+1`.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..m {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i - 1] * c[i - 1];
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / beta;
    }
    for i in (0..m - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// `e^{-x} Σ_{k ≥ m} x^k / k!` for `x ≥ 0`, accurate for small and large `x`.
pub fn scaled_exp_tail(x: f64, m: usize) -> f64 {
    if x <= 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x < (m as f64) + 30.0 {
        // direct series from the first retained term
        let mut term = (m as f64 * x.ln() - ln_factorial(m) - x).exp();
        let mut sum = term;
        let mut k = m;
        loop {
            k += 1;
            term *= x / k as f64;
            sum += term;
            if term == 0.0 || (term < 1e-17 * sum && k as f64 > x) {
                break;
            }
        }
        sum
    } else {
        let head: f64 = (0..m)
            .map(|k| (k as f64 * x.ln() - ln_factorial(k) - x).exp())
            .sum();
        1.0 - head
    }
}

pub fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 0.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-14, 0.0, 200).is_err());
    }

    #[test]
    fn golden_finds_parabola_max() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_integrates_exp() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13, 40);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1, 0, 1] -> x = [1, 1, 1]
        let mut rhs = vec![1.0, 0.0, 1.0];
        solve_tridiagonal(&[-1.0, -1.0], &[2.0, 2.0, 2.0], &[-1.0, -1.0], &mut rhs);
        for v in rhs {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exp_tail_small_and_large() {
        // e^x - 1 - x for tiny x ~ x^2/2
        let x = 1e-6;
        let t = scaled_exp_tail(x, 2) * x.exp();
        assert!((t - (x * x / 2.0 + x * x * x / 6.0)).abs() < 1e-24);
        let x: f64 = 80.0;
        assert!((scaled_exp_tail(x, 3) - 1.0).abs() < 1e-15);
        let x: f64 = 5.0;
        let direct = 1.0 - (-x).exp() * (1.0 + x + x * x / 2.0);
        assert!((scaled_exp_tail(x, 3) - direct).abs() < 1e-14);
        assert_eq!(scaled_exp_tail(0.0, 0), 1.0);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (s, b) = linear_fit(&x, &y);
        assert!((s - 2.5).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
    }
}
