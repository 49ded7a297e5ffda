//! Sampled checks of the structural conditions on the nonlinearity.
//!
//! A sampled check can only refute "there exist" statements in the sampled
//! range; a failed existence check is reported as "no witness found in range".

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pde::eigen::lambda1;
use crate::pde::nonlinearity::{eval_nonlinearity, Nonlinearity, NonlinearitySpec};

/// Upper end of the sampled `t` range.
pub const T_MAX: f64 = 50.0;
/// Radii sampled for every condition.
pub const R_SAMPLES: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
/// Small `t` used for the behaviour at zero.
pub const SMALL_T: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionWitness {
    pub r: f64,
    pub t: f64,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: String,
    pub passed: bool,
    pub witnesses: Vec<ConditionWitness>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub spec: NonlinearitySpec,
    pub lambda1: f64,
    pub beta0_floor: f64,
    pub f1: ConditionEntry,
    pub f2: ConditionEntry,
    pub f3: ConditionEntry,
    pub f4: ConditionEntry,
    pub f5: ConditionEntry,
    /// `θ F ≤ t f` for `t ≥ max(R, θ M)` with `θ = n + 1`.
    pub f1_prime: ConditionEntry,
}

impl ConditionReport {
    pub fn entries(&self) -> [&ConditionEntry; 6] {
        [&self.f1, &self.f2, &self.f3, &self.f4, &self.f5, &self.f1_prime]
    }
}

fn geometric(a: f64, b: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|k| a * (b / a).powf(k as f64 / (m - 1) as f64))
        .collect()
}

fn capped_exp(x: f64) -> f64 {
    x.min(700.0).exp()
}

pub fn check_conditions(spec: &NonlinearitySpec) -> Result<ConditionReport> {
    spec.validate()?;
    let n = spec.n;
    let nf = n as f64;
    let lam = lambda1(n)?;
    let floor = spec.beta0_floor();

    let f1 = ConditionEntry {
        name: "F1".into(),
        passed: true,
        witnesses: Vec::new(),
        note: Some("radial by construction: f depends on x only through |x|".into()),
    };

    // F2: 0 < F ≤ M f on [R, T_MAX]
    let mut f2w = Vec::new();
    let mut f2_ok = true;
    for &r in &R_SAMPLES {
        for t in geometric(spec.r, T_MAX.max(spec.r), 24) {
            let ratio = match (spec.ln_primitive(r, t), spec.ln_f(r, t)) {
                (Some(lf), Some(lff)) => (lf - lff).exp(),
                _ => f64::MAX,
            };
            let ok = ratio <= spec.m;
            if !ok || f2w.len() < R_SAMPLES.len() && t == spec.r {
                f2w.push(ConditionWitness {
                    r,
                    t,
                    value: ratio,
                    threshold: spec.m,
                });
            }
            f2_ok &= ok;
        }
    }
    let f2 = ConditionEntry {
        name: "F2".into(),
        passed: f2_ok,
        witnesses: f2w,
        note: (!f2_ok).then(|| format!("no witness found in range: F/f exceeds M on part of t in [{}, {T_MAX}]", spec.r)),
    };

    // F3: f(r, 0) = 0 and f ≥ 0
    let mut f3w = Vec::new();
    let mut f3_ok = true;
    for &r in &R_SAMPLES {
        let at0 = eval_nonlinearity(spec, r, 0.0)?.f;
        f3_ok &= at0 == 0.0;
        let mut worst = ConditionWitness {
            r,
            t: 0.0,
            value: at0,
            threshold: 0.0,
        };
        for t in geometric(1e-6, T_MAX, 48) {
            let v = eval_nonlinearity(spec, r, t)?.f;
            if v < worst.value {
                worst = ConditionWitness {
                    r,
                    t,
                    value: v,
                    threshold: 0.0,
                };
            }
        }
        f3_ok &= worst.value >= 0.0;
        f3w.push(worst);
    }
    let f3 = ConditionEntry {
        name: "F3".into(),
        passed: f3_ok,
        note: (!f3_ok).then(|| "negative value of f found".to_string()),
        witnesses: f3w,
    };

    // F4: n F(r, t) / t^n at small t against λ₁
    let mut f4w = Vec::new();
    let mut f4_ok = true;
    for &r in &R_SAMPLES {
        for &t in &SMALL_T {
            let v = nf * spec.primitive(r, t) / t.powi(n as i32);
            f4_ok &= v < lam;
            f4w.push(ConditionWitness {
                r,
                t,
                value: v,
                threshold: lam,
            });
        }
    }
    let f4 = ConditionEntry {
        name: "F4".into(),
        passed: f4_ok,
        witnesses: f4w,
        note: None,
    };

    // F5: t f / exp(α₀ t^{n/(n-1)}) at t = T_MAX against the β₀ floor
    let mut f5w = Vec::new();
    let mut f5_ok = true;
    for &r in &R_SAMPLES {
        let t = T_MAX;
        let ln_ratio = spec
            .ln_f(r, t)
            .map(|l| t.ln() + l - spec.alpha0 * t.powf(nf / (nf - 1.0)));
        let ok = ln_ratio.is_some_and(|l| l > floor.ln());
        f5_ok &= ok;
        f5w.push(ConditionWitness {
            r,
            t,
            value: ln_ratio.map_or(0.0, capped_exp),
            threshold: floor,
        });
    }
    let f5 = ConditionEntry {
        name: "F5".into(),
        passed: f5_ok,
        witnesses: f5w,
        note: None,
    };

    // F'1 with θ = n + 1 and R₀ = max(R, θ M)
    let theta = nf + 1.0;
    let r0 = spec.r.max(theta * spec.m);
    let mut ar_w = Vec::new();
    let mut ar_ok = true;
    for &r in &R_SAMPLES {
        let mut worst: Option<ConditionWitness> = None;
        for t in geometric(r0, T_MAX.max(r0), 24) {
            let q = match (spec.ln_f(r, t), spec.ln_primitive(r, t)) {
                (Some(lf), Some(lbig)) => capped_exp(t.ln() + lf - lbig),
                _ => 0.0,
            };
            if worst.is_none_or(|w| q < w.value) {
                worst = Some(ConditionWitness {
                    r,
                    t,
                    value: q,
                    threshold: theta,
                });
            }
        }
        let w = worst.unwrap();
        ar_ok &= w.value >= theta;
        ar_w.push(w);
    }
    let f1_prime = ConditionEntry {
        name: "F1'".into(),
        passed: ar_ok,
        witnesses: ar_w,
        note: Some(format!("theta = {theta}, R0 = {r0}")),
    };

    Ok(ConditionReport {
        spec: *spec,
        lambda1: lam,
        beta0_floor: floor,
        f1,
        f2,
        f3,
        f4,
        f5,
        f1_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let rep = check_conditions(&NonlinearitySpec::defaults(2).unwrap()).unwrap();
        for e in rep.entries() {
            assert!(e.passed, "{} failed: {:?}", e.name, e.note);
        }
        assert!(rep.f4.witnesses.len() == R_SAMPLES.len() * SMALL_T.len());
    }

    #[test]
    fn large_c_breaks_sign_condition() {
        let mut spec = NonlinearitySpec::defaults(2).unwrap();
        spec.c = 10.0;
        let rep = check_conditions(&spec).unwrap();
        assert!(!rep.f3.passed);
        assert!(rep.f3.witnesses.iter().any(|w| w.value < 0.0 && w.t > 0.0));
    }

    #[test]
    fn f5_ratio_exceeds_floor_n2() {
        let spec = NonlinearitySpec::defaults(2).unwrap();
        let rep = check_conditions(&spec).unwrap();
        let floor = 4.0 / (spec.alpha0 * 1f64.exp());
        assert!((rep.beta0_floor - floor).abs() < 1e-15);
        assert!(rep.f5.witnesses.iter().all(|w| w.value > floor));
    }
}
