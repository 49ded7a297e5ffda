//! Exponential functionals of Moser–Trudinger type and their discrete gradients.
//!
//! Every kind reduces to the per-cell form `exp(a_i |ū_i|^{q_i})`, where `ū_i`
//! is the mean of the two nodal values of cell `i`, and `a_i`, `q_i` depend on
//! the kind and on the cell's evaluation radius.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{CellGeometry, DimensionConstants, RadialFunction, RadialGrid};

/// Exponents above this are clamped and the result is flagged divergent.
pub const DEFAULT_EXPONENT_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    /// `exp(γ |u|^{n/(n-1)})`.
    Mt,
    /// `exp((γ + r^α) |u|^{n/(n-1)})`.
    Mt1,
    /// `exp(γ |u|^{n/(n-1) + r^α})`.
    Mt2,
    /// `exp((γ + f(r)) |u|^{n/(n-1)})`.
    GeneralAdditive,
    /// `exp(γ |u|^{n/(n-1) + f(r)})`.
    GeneralExponent,
}

impl FunctionalKind {
    pub fn needs_alpha(self) -> bool {
        matches!(self, FunctionalKind::Mt1 | FunctionalKind::Mt2)
    }

    pub fn needs_profile(self) -> bool {
        matches!(
            self,
            FunctionalKind::GeneralAdditive | FunctionalKind::GeneralExponent
        )
    }
}

/// A scalar profile `f` on `[0, 1)`.
#[derive(Clone)]
pub struct Profile {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Profile {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `r^α`.
    pub fn power(alpha: f64) -> Self {
        Self::new(format!("r^{alpha}"), move |r: f64| r.powf(alpha))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Profile").field(&self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub struct FunctionalSpec {
    pub kind: FunctionalKind,
    pub n: usize,
    pub gamma: f64,
    pub alpha: Option<f64>,
    pub profile: Option<Profile>,
    pub exponent_cap: f64,
}

impl FunctionalSpec {
    fn base(kind: FunctionalKind, n: usize) -> Result<Self> {
        let c = DimensionConstants::new(n)?;
        Ok(Self {
            kind,
            n,
            gamma: c.alpha_n,
            alpha: None,
            profile: None,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        })
    }

    pub fn mt(n: usize) -> Result<Self> {
        Self::base(FunctionalKind::Mt, n)
    }

    pub fn mt1(n: usize, alpha: f64) -> Result<Self> {
        let mut s = Self::base(FunctionalKind::Mt1, n)?;
        s.alpha = Some(alpha);
        s.validate()?;
        Ok(s)
    }

    pub fn mt2(n: usize, alpha: f64) -> Result<Self> {
        let mut s = Self::base(FunctionalKind::Mt2, n)?;
        s.alpha = Some(alpha);
        s.validate()?;
        Ok(s)
    }

    pub fn general_additive(n: usize, profile: Profile) -> Result<Self> {
        let mut s = Self::base(FunctionalKind::GeneralAdditive, n)?;
        s.profile = Some(profile);
        Ok(s)
    }

    pub fn general_exponent(n: usize, profile: Profile) -> Result<Self> {
        let mut s = Self::base(FunctionalKind::GeneralExponent, n)?;
        s.profile = Some(profile);
        Ok(s)
    }

    /// Builds a spec of the given kind; `alpha` is used for MT1/MT2 only.
    pub fn of_kind(kind: FunctionalKind, n: usize, alpha: f64) -> Result<Self> {
        match kind {
            FunctionalKind::Mt => Self::mt(n),
            FunctionalKind::Mt1 => Self::mt1(n, alpha),
            FunctionalKind::Mt2 => Self::mt2(n, alpha),
            _ => Err(Error::InvalidParameter(format!(
                "{kind:?} needs an explicit profile"
            ))),
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    /// Sets `γ = mult · α_n`.
    pub fn with_gamma_mult(self, mult: f64) -> Result<Self> {
        let a = DimensionConstants::new(self.n)?.alpha_n;
        self.with_gamma(mult * a)
    }

    pub fn with_cap(mut self, cap: f64) -> Result<Self> {
        self.exponent_cap = cap;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        DimensionConstants::new(self.n)?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.exponent_cap > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent cap must be positive, got {}",
                self.exponent_cap
            )));
        }
        if self.kind.needs_alpha() {
            match self.alpha {
                Some(a) if a > 0.0 && a.is_finite() => {}
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "{:?} needs alpha > 0, got {other:?}",
                        self.kind
                    )))
                }
            }
        }
        if self.kind.needs_profile() != self.profile.is_some() {
            return Err(Error::InvalidParameter(format!(
                "profile must be present exactly for the general kinds ({:?})",
                self.kind
            )));
        }
        Ok(())
    }

    /// `(a, q)` at radius `r`: the cell integrand is `exp(a |u|^q)`.
    fn coefficients(&self, r: f64) -> (f64, f64) {
        let nf = self.n as f64;
        let p = nf / (nf - 1.0);
        match self.kind {
            FunctionalKind::Mt => (self.gamma, p),
            FunctionalKind::Mt1 => (self.gamma + r.powf(self.alpha.unwrap()), p),
            FunctionalKind::Mt2 => (self.gamma, p + r.powf(self.alpha.unwrap())),
            FunctionalKind::GeneralAdditive => (self.gamma + self.profile_at(r), p),
            FunctionalKind::GeneralExponent => (self.gamma, p + self.profile_at(r)),
        }
    }

    fn profile_at(&self, r: f64) -> f64 {
        self.profile.as_ref().map_or(0.0, |f| f.eval(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    /// Some cell exponent exceeded the cap; `value` uses clamped exponents.
    pub divergent: bool,
    pub max_exponent: f64,
}

/// A functional bound to a grid, with all per-cell constants precomputed.
#[derive(Debug, Clone)]
pub struct DiscreteFunctional {
    spec: FunctionalSpec,
    geom: CellGeometry,
    a: Vec<f64>,
    q: Vec<f64>,
}

impl DiscreteFunctional {
    pub fn new(spec: &FunctionalSpec, grid: &RadialGrid) -> Result<Self> {
        spec.validate()?;
        let geom = CellGeometry::new(grid, spec.n)?;
        let (a, q) = geom.mid.iter().map(|&r| spec.coefficients(r)).unzip();
        Ok(Self {
            spec: spec.clone(),
            geom,
            a,
            q,
        })
    }

    pub fn spec(&self) -> &FunctionalSpec {
        &self.spec
    }

    pub fn geometry(&self) -> &CellGeometry {
        &self.geom
    }

    pub fn value(&self, values: &[f64]) -> EvalResult {
        self.accumulate(values, None)
    }

    /// Value and gradient with respect to every node except the last.
    pub fn value_and_gradient(&self, values: &[f64]) -> (EvalResult, Vec<f64>) {
        let mut grad = vec![0.0; values.len()];
        let res = self.accumulate(values, Some(&mut grad));
        grad.pop();
        (res, grad)
    }

    fn accumulate(&self, values: &[f64], mut grad: Option<&mut Vec<f64>>) -> EvalResult {
        let cap = self.spec.exponent_cap;
        let omega = self.geom.omega;
        let mut sum = 0.0;
        let mut divergent = false;
        let mut max_e = 0.0f64;
        for i in 0..self.geom.cells() {
            let m = 0.5 * (values[i] + values[i + 1]);
            let am = m.abs();
            let e = if am == 0.0 {
                0.0
            } else {
                self.a[i] * am.powf(self.q[i])
            };
            max_e = max_e.max(e);
            let term = if e > cap {
                divergent = true;
                self.geom.weight[i] * cap.exp()
            } else {
                self.geom.weight[i] * e.exp()
            };
            sum += term;
            if let Some(g) = grad.as_deref_mut() {
                if e <= cap && am > 0.0 {
                    // d/dm of exp(a |m|^q), split equally onto both nodes
                    let de = self.a[i] * self.q[i] * am.powf(self.q[i] - 1.0) * m.signum();
                    let d = 0.5 * omega * term * de;
                    g[i] += d;
                    g[i + 1] += d;
                }
            }
        }
        EvalResult {
            value: omega * sum,
            divergent,
            max_exponent: max_e,
        }
    }
}

fn check_dim(u: &RadialFunction, spec: &FunctionalSpec) -> Result<()> {
    if u.dim() != spec.n {
        return Err(Error::DimensionMismatch {
            function: u.dim(),
            functional: spec.n,
        });
    }
    Ok(())
}

/// `ω_{n-1} ∫_0^1 exp(…) r^{n-1} dr` for the interpolated profile.
pub fn eval_functional(u: &RadialFunction, spec: &FunctionalSpec) -> Result<EvalResult> {
    check_dim(u, spec)?;
    Ok(DiscreteFunctional::new(spec, u.grid())?.value(u.values()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    /// One entry per free node (all nodes but `r = 1`).
    pub values: Vec<f64>,
    pub divergent: bool,
}

pub fn objective_gradient(u: &RadialFunction, spec: &FunctionalSpec) -> Result<Gradient> {
    check_dim(u, spec)?;
    let (res, g) = DiscreteFunctional::new(spec, u.grid())?.value_and_gradient(u.values());
    Ok(Gradient {
        values: g,
        divergent: res.divergent,
    })
}

/// Certified lower bound for the sharp constant: the best family value, or
/// `|B|` (attained by `u ≡ 0`) when that is larger or the family is empty.
pub fn eval_mt_constant_lower_bound(spec: &FunctionalSpec, family_best: Option<f64>) -> Result<f64> {
    let ball = DimensionConstants::new(spec.n)?.ball_volume;
    Ok(family_best.map_or(ball, |b| b.max(ball)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileWhich {
    F2,
    F2Prime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub n: usize,
    /// Constant in the bounds near 0.
    pub c: f64,
    /// `γ ∈ (0, 1)` in the bound near 1.
    pub gamma_f3: f64,
    /// `γ > 2` in the power-log bound near 0.
    pub gamma_exponent: f64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self {
            n: 2,
            c: 1.0,
            gamma_f3: 0.5,
            gamma_exponent: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub r: f64,
    pub value: f64,
    pub bound: f64,
    /// `bound - value`; nonnegative when the condition holds at `r`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub f1_ok: bool,
    pub f2_ok: bool,
    pub f2prime_ok: bool,
    pub f3_ok: bool,
    pub which: ProfileWhich,
    /// f1, f3 and the selected one of f2 / f2′.
    pub admissible: bool,
    pub f1_witnesses: Vec<Witness>,
    pub f2_witnesses: Vec<Witness>,
    pub f2prime_witnesses: Vec<Witness>,
    pub f3_witnesses: Vec<Witness>,
}

/// Sample radii near 0: `10^{-2}, …, 10^{-9}`.
pub fn samples_near_zero() -> Vec<f64> {
    (2..10).map(|k| 10f64.powi(-k)).collect()
}

/// Sample radii near 1: `1 - 10^{-2}, …, 1 - 10^{-9}`.
pub fn samples_near_one() -> Vec<f64> {
    (2..10).map(|k| 1.0 - 10f64.powi(-k)).collect()
}

fn witness(r: f64, value: f64, bound: f64) -> Witness {
    let mut margin = bound - value;
    // equality cases computed by different formulas can differ in the last bit
    if margin < 0.0 && margin.abs() <= 1e-12 * bound.abs() {
        margin = 0.0;
    }
    Witness {
        r,
        value,
        bound,
        margin,
    }
}

/// Samples `profile` against the admissibility conditions for the general
/// functionals. Negative or non-finite profile values are errors.
pub fn check_profile_conditions(
    profile: &Profile,
    which: ProfileWhich,
    params: ProfileParams,
) -> Result<ProfileReport> {
    let alpha_n = DimensionConstants::new(params.n)?.alpha_n;
    if !(params.c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {}", params.c)));
    }
    if !(params.gamma_f3 > 0.0 && params.gamma_f3 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma_f3 must lie in (0, 1), got {}",
            params.gamma_f3
        )));
    }
    if !(params.gamma_exponent > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma_exponent must exceed 2, got {}",
            params.gamma_exponent
        )));
    }
    let eval = |r: f64| -> Result<f64> {
        let v = profile.eval(r);
        if !v.is_finite() || v < 0.0 {
            return Err(Error::OutOfDomain {
                what: "profile value",
                value: v,
                domain: "[0, ∞)",
            });
        }
        Ok(v)
    };
    let near0 = samples_near_zero();
    let near1 = samples_near_one();

    let f0 = eval(0.0)?;
    let mut f1_witnesses = vec![witness(0.0, f0, 0.0)];
    let mut f2_witnesses = Vec::new();
    let mut f2prime_witnesses = Vec::new();
    for &r in &near0 {
        let v = eval(r)?;
        let l = -r.ln();
        f1_witnesses.push(Witness {
            r,
            value: v,
            bound: 0.0,
            margin: v,
        });
        f2_witnesses.push(witness(r, v, params.c / l));
        f2prime_witnesses.push(witness(r, v, params.c / l.powf(params.gamma_exponent)));
    }
    let mut f3_witnesses = Vec::new();
    for &r in &near1 {
        let v = eval(r)?;
        f1_witnesses.push(Witness {
            r,
            value: v,
            bound: 0.0,
            margin: v,
        });
        let bound = params.gamma_f3 * alpha_n / params.n as f64 * (1.0 - r).ln() / r.ln();
        f3_witnesses.push(witness(r, v, bound));
    }
    let f1_ok = f0 == 0.0 && f1_witnesses[1..].iter().all(|w| w.value > 0.0);
    let all = |ws: &[Witness]| ws.iter().all(|w| w.margin >= 0.0);
    let f2_ok = all(&f2_witnesses);
    let f2prime_ok = all(&f2prime_witnesses);
    let f3_ok = all(&f3_witnesses);
    let chosen = match which {
        ProfileWhich::F2 => f2_ok,
        ProfileWhich::F2Prime => f2prime_ok,
    };
    Ok(ProfileReport {
        f1_ok,
        f2_ok,
        f2prime_ok,
        f3_ok,
        which,
        admissible: f1_ok && f3_ok && chosen,
        f1_witnesses,
        f2_witnesses,
        f2prime_witnesses,
        f3_witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{dirichlet_energy, RadialGrid};
    use std::f64::consts::PI;

    fn grid(count: usize) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::log_graded(count).unwrap())
    }

    #[test]
    fn zero_function_gives_ball_volume() {
        let g = grid(200);
        let u = RadialFunction::zero(g, 2).unwrap();
        for spec in [
            FunctionalSpec::mt(2).unwrap(),
            FunctionalSpec::mt1(2, 1.0).unwrap(),
            FunctionalSpec::mt2(2, 0.5).unwrap(),
        ] {
            let v = eval_functional(&u, &spec).unwrap();
            assert!((v.value - PI).abs() < 1e-10);
            assert!(!v.divergent);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(FunctionalSpec::mt1(2, 0.0).is_err());
        assert!(FunctionalSpec::mt(1).is_err());
        assert!(FunctionalSpec::mt(2).unwrap().with_gamma(-1.0).is_err());
        let mut s = FunctionalSpec::mt(2).unwrap();
        s.profile = Some(Profile::power(1.0));
        assert!(s.validate().is_err());
        assert!(FunctionalSpec::of_kind(FunctionalKind::GeneralAdditive, 2, 1.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let u = RadialFunction::zero(grid(100), 3).unwrap();
        assert!(matches!(
            eval_functional(&u, &FunctionalSpec::mt(2).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cap_flags_divergence() {
        let g = grid(200);
        let u = RadialFunction::from_fn(g, 2, |r| 30.0 * (1.0 - r)).unwrap();
        let v = eval_functional(&u, &FunctionalSpec::mt(2).unwrap()).unwrap();
        assert!(v.divergent && v.value.is_finite());
    }

    #[test]
    fn general_kinds_match_named_kinds() {
        let g = grid(300);
        let u = RadialFunction::from_fn(g, 2, |r| 0.3 * (1.0 - r * r)).unwrap();
        let a = eval_functional(&u, &FunctionalSpec::mt1(2, 1.5).unwrap()).unwrap();
        let b = eval_functional(
            &u,
            &FunctionalSpec::general_additive(2, Profile::power(1.5)).unwrap(),
        )
        .unwrap();
        assert!((a.value - b.value).abs() < 1e-14 * a.value);
        let a = eval_functional(&u, &FunctionalSpec::mt2(2, 1.5).unwrap()).unwrap();
        let b = eval_functional(
            &u,
            &FunctionalSpec::general_exponent(2, Profile::power(1.5)).unwrap(),
        )
        .unwrap();
        assert!((a.value - b.value).abs() < 1e-14 * a.value);
    }

    #[test]
    fn constant_integrand_is_exact() {
        // u = 0 except inside the origin cell does not matter; a smooth
        // profile converges to the quadrature of exp(γ u²) r
        let g = grid(4000);
        let u = RadialFunction::from_fn(g, 2, |r| 0.2 * (1.0 - r * r)).unwrap();
        let v = eval_functional(&u, &FunctionalSpec::mt(2).unwrap().with_gamma(1.0).unwrap())
            .unwrap()
            .value;
        let exact = crate::numerics::adaptive_simpson(
            &|r: f64| {
                let w = 0.2 * (1.0 - r * r);
                2.0 * PI * (w * w).exp() * r
            },
            0.0,
            1.0,
            1e-13,
            50,
        );
        assert!((v - exact).abs() < 1e-5 * exact, "{v} vs {exact}");
        assert!(dirichlet_energy(&u) > 0.0);
    }

    #[test]
    fn gradient_zero_at_origin_for_n2() {
        let u = RadialFunction::zero(grid(100), 2).unwrap();
        let g = objective_gradient(&u, &FunctionalSpec::mt(2).unwrap()).unwrap();
        assert_eq!(g.values.len(), 99);
        assert!(g.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_matches_differences() {
        let g = grid(120);
        let u = RadialFunction::from_fn(g.clone(), 3, |r| 0.4 * (1.0 - r).sqrt() - 0.05 * r)
            .unwrap();
        let spec = FunctionalSpec::mt2(3, 1.0).unwrap();
        let d = DiscreteFunctional::new(&spec, &g).unwrap();
        let (_, grad) = d.value_and_gradient(u.values());
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..grad.len() {
            let h = 1e-6;
            let mut p = u.values().to_vec();
            let mut m = u.values().to_vec();
            p[k] += h;
            m[k] -= h;
            let fd = (d.value(&p).value - d.value(&m).value) / (2.0 * h);
            err = err.max((grad[k] - fd).abs());
            scale = scale.max(fd.abs());
        }
        assert!(err <= 1e-6 * scale, "{err} vs {scale}");
    }

    #[test]
    fn lower_bound_is_max_with_ball() {
        let spec = FunctionalSpec::mt2(2, 1.0).unwrap();
        assert!((eval_mt_constant_lower_bound(&spec, None).unwrap() - PI).abs() < 1e-15);
        let j = crate::radial::constants_for(2).unwrap().concentration_level;
        assert_eq!(eval_mt_constant_lower_bound(&spec, Some(j + 0.3)).unwrap(), j + 0.3);
        assert!((eval_mt_constant_lower_bound(&spec, Some(1.0)).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn power_profile_is_admissible() {
        let rep = check_profile_conditions(
            &Profile::power(1.0),
            ProfileWhich::F2Prime,
            ProfileParams::default(),
        )
        .unwrap();
        assert!(rep.f1_ok && rep.f2_ok && rep.f2prime_ok && rep.f3_ok && rep.admissible);
        assert!(rep.f2_witnesses.len() >= 8 && rep.f3_witnesses.len() >= 8);
    }

    #[test]
    fn constant_profile_fails() {
        let rep = check_profile_conditions(
            &Profile::new("1", |_| 1.0),
            ProfileWhich::F2,
            ProfileParams::default(),
        )
        .unwrap();
        assert!(!rep.f1_ok && !rep.f2_ok && !rep.admissible);
    }

    #[test]
    fn equality_case_has_zero_margin() {
        let f = Profile::new("log^-3", |r: f64| {
            if r == 0.0 {
                0.0
            } else {
                1.0 / (-r.ln()).powi(3)
            }
        });
        let rep =
            check_profile_conditions(&f, ProfileWhich::F2Prime, ProfileParams::default()).unwrap();
        assert!(rep.f2prime_ok);
        assert!(rep.f2prime_witnesses.iter().all(|w| w.margin >= 0.0));
    }

    #[test]
    fn negative_profile_is_an_error() {
        let f = Profile::new("neg", |r| -r);
        assert!(check_profile_conditions(&f, ProfileWhich::F2, ProfileParams::default()).is_err());
    }
}
