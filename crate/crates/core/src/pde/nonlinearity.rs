//! The critical-growth nonlinearity with subtracted Taylor terms and its
//! primitive, both in closed form.
//!
//! With `p = n/(n-1) + r^α` and `x = α₀ t^p`,
//!
//! ```text
//! f(r, t) = t^{p-1} e^x [S(x, n-1) + (1-c) x^{n-2} e^{-x} / (n-2)!]
//! F(r, t) = e^x [S(x, n) + (1-c) x^{n-1} e^{-x} / (n-1)!] / (p α₀)
//! ```
//!
//! where `S(x, m) = e^{-x} Σ_{k≥m} x^k/k!`. Both vanish for `t ≤ 0`, which
//! builds the `u₊` truncation into the nonlinearity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::DEFAULT_EXPONENT_CAP;
use crate::numerics::{ln_factorial, scaled_exp_tail};
use crate::radial::DimensionConstants;

/// A radial nonlinearity `f(r, t)` with primitive `F(r, t) = ∫_0^t f(r, s) ds`.
pub trait Nonlinearity: Send + Sync {
    fn dim(&self) -> usize;
    fn f(&self, r: f64, t: f64) -> f64;
    fn primitive(&self, r: f64, t: f64) -> f64;
}

/// `f ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroNonlinearity {
    pub n: usize,
}

impl Nonlinearity for ZeroNonlinearity {
    fn dim(&self) -> usize {
        self.n
    }
    fn f(&self, _r: f64, _t: f64) -> f64 {
        0.0
    }
    fn primitive(&self, _r: f64, _t: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub n: usize,
    pub alpha: f64,
    /// Critical growth rate `α₀`.
    pub alpha0: f64,
    /// Coefficient of the last subtracted Taylor term.
    pub c: f64,
    /// Constants of the superlinearity check `F ≤ M f` for `t ≥ R`.
    pub m: f64,
    pub r: f64,
}

impl NonlinearitySpec {
    /// `n`, `α = 1`, `α₀ = α_n`, `c = 1`, `M = R = 1`.
    pub fn defaults(n: usize) -> Result<Self> {
        let dc = DimensionConstants::new(n)?;
        Ok(Self {
            n,
            alpha: 1.0,
            alpha0: dc.alpha_n,
            c: 1.0,
            m: 1.0,
            r: 1.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        DimensionConstants::new(self.n)?;
        for (name, v) in [
            ("alpha", self.alpha),
            ("alpha0", self.alpha0),
            ("M", self.m),
            ("R", self.r),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!("c must be finite, got {}", self.c)));
        }
        Ok(())
    }

    /// `n^n / (α₀^{n-1} e^{1 + … + 1/(n-1)})`.
    pub fn beta0_floor(&self) -> f64 {
        let dc = DimensionConstants::new(self.n).expect("validated dimension");
        let nf = self.n as f64;
        nf.powf(nf) / (self.alpha0.powf(nf - 1.0) * dc.harmonic_partial.exp())
    }

    /// Exponent `p(r) = n/(n-1) + r^α`.
    pub fn power(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        nf / (nf - 1.0) + r.powf(self.alpha)
    }

    /// `S(x, n-1) + (1-c) x^{n-2} e^{-x}/(n-2)!`, so `f = t^{p-1} e^x · bracket`.
    fn f_bracket(&self, x: f64) -> f64 {
        let n = self.n;
        let corr = if self.c == 1.0 {
            0.0
        } else if n == 2 {
            (1.0 - self.c) * (-x).exp()
        } else if x == 0.0 {
            0.0
        } else {
            (1.0 - self.c) * ((n - 2) as f64 * x.ln() - x - ln_factorial(n - 2)).exp()
        };
        scaled_exp_tail(x, n - 1) + corr
    }

    /// `S(x, n) + (1-c) x^{n-1} e^{-x}/(n-1)!`, so `F = e^x · bracket / (p α₀)`.
    fn big_f_bracket(&self, x: f64) -> f64 {
        let n = self.n;
        let corr = if self.c == 1.0 || x == 0.0 {
            0.0
        } else {
            (1.0 - self.c) * ((n - 1) as f64 * x.ln() - x - ln_factorial(n - 1)).exp()
        };
        scaled_exp_tail(x, n) + corr
    }

    /// `ln f(r, t)` when `f(r, t) > 0`.
    pub fn ln_f(&self, r: f64, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return None;
        }
        let p = self.power(r);
        let x = self.alpha0 * t.powf(p);
        let b = self.f_bracket(x);
        (b > 0.0).then(|| (p - 1.0) * t.ln() + x + b.ln())
    }

    /// `ln F(r, t)` when `F(r, t) > 0`.
    pub fn ln_primitive(&self, r: f64, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return None;
        }
        let p = self.power(r);
        let x = self.alpha0 * t.powf(p);
        let b = self.big_f_bracket(x);
        (b > 0.0).then(|| x + b.ln() - (p * self.alpha0).ln())
    }

    /// `α₀ t^p`, the exponent that decides overflow.
    pub fn exponent(&self, r: f64, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.alpha0 * t.powf(self.power(r))
        }
    }
}

impl Nonlinearity for NonlinearitySpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn f(&self, r: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let p = self.power(r);
        let x = self.alpha0 * t.powf(p);
        let b = self.f_bracket(x);
        if x > 700.0 {
            if b > 0.0 {
                return ((p - 1.0) * t.ln() + x + b.ln()).exp();
            }
            return b * f64::INFINITY;
        }
        t.powf(p - 1.0) * x.exp() * b
    }

    fn primitive(&self, r: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let p = self.power(r);
        let x = self.alpha0 * t.powf(p);
        let b = self.big_f_bracket(x);
        if x > 700.0 {
            return (x + b.ln() - (p * self.alpha0).ln()).exp();
        }
        x.exp() * b / (p * self.alpha0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityValue {
    pub f: f64,
    pub primitive: f64,
    /// The exponent `α₀ t^p` exceeded the cap; values use the capped exponent.
    pub overflow: bool,
}

/// `f(r, t)` and `F(r, t)` with the exponent capped at 700.
pub fn eval_nonlinearity(spec: &NonlinearitySpec, r: f64, t: f64) -> Result<NonlinearityValue> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: "[0, 1]",
        });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t,
            domain: "[0, ∞)",
        });
    }
    let x = spec.exponent(r, t);
    if x <= DEFAULT_EXPONENT_CAP {
        return Ok(NonlinearityValue {
            f: spec.f(r, t),
            primitive: spec.primitive(r, t),
            overflow: false,
        });
    }
    // evaluate at the t where the exponent equals the cap
    let tc = (DEFAULT_EXPONENT_CAP / spec.alpha0).powf(1.0 / spec.power(r));
    Ok(NonlinearityValue {
        f: spec.f(r, tc),
        primitive: spec.primitive(r, tc),
        overflow: true,
    })
}
