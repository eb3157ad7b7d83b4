use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::interp::RadialInterpolant;
use crate::error::{Error, Result};
use crate::special::Growth;

/// Radii (0, 50] on which declared growth bounds are validated.
const GROWTH_CHECK_POINTS: usize = 500;
const GROWTH_CHECK_RADIUS: f64 = 50.0;

type Evaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Behaviour at 0 and ∞ in the sense `|u(1/x) x^{-ρ}| = O(1)` and
/// `|u(x) x^{-η}| = O(1)` for x ≥ 1. Carried as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassA {
    pub rho: f64,
    pub eta: f64,
}

#[derive(Clone)]
pub enum ProfileKind {
    Zero,
    /// coeff · r^power
    Monomial { coeff: Complex64, power: f64 },
    /// Σ coeffs[i] · r^i
    Polynomial { coeffs: Vec<Complex64> },
    /// An arbitrary evaluator with a declared growth bound.
    Callable { eval: Evaluator, label: String },
    /// Interpolated from samples, e.g. by [`super::decompose`].
    Interpolated(RadialInterpolant),
}

impl fmt::Debug for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Zero => write!(f, "Zero"),
            ProfileKind::Monomial { coeff, power } => write!(f, "Monomial({coeff} r^{power})"),
            ProfileKind::Polynomial { coeffs } => write!(f, "Polynomial({coeffs:?})"),
            ProfileKind::Callable { label, .. } => write!(f, "Callable({label})"),
            ProfileKind::Interpolated(i) => write!(f, "Interpolated({} nodes)", i.nodes().len()),
        }
    }
}

/// A radial function r ↦ v(r) on (0, ∞) with |v(r)| ≤ C (1+r)^m.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    kind: ProfileKind,
    growth: Growth,
    class_a: Option<ClassA>,
}

impl RadialProfile {
    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Zero,
            growth: Growth::BOUNDED,
            class_a: None,
        }
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::scaled_monomial(c.into(), 0.0)
    }

    /// r^p
    pub fn monomial(p: f64) -> Self {
        Self::scaled_monomial(Complex64::new(1.0, 0.0), p)
    }

    /// c · r^p, p ≥ 0.
    pub fn scaled_monomial(coeff: Complex64, power: f64) -> Self {
        assert!(power.is_finite() && power >= 0.0, "monomial power must be >= 0");
        if coeff == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self {
            kind: ProfileKind::Monomial { coeff, power },
            growth: Growth::new(power, coeff.norm()),
            class_a: Some(ClassA { rho: 0.0, eta: power }),
        }
    }

    /// Σ coeffs[i] r^i; trailing zeros are trimmed.
    pub fn polynomial(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Self::zero();
        }
        let degree = (coeffs.len() - 1) as f64;
        let constant = coeffs.iter().map(|c| c.norm()).sum();
        Self {
            kind: ProfileKind::Polynomial { coeffs },
            growth: Growth::new(degree, constant),
            class_a: Some(ClassA { rho: 0.0, eta: degree }),
        }
    }

    /// Wraps an evaluator after checking its declared growth on (0, 50].
    pub fn callable<F>(label: impl Into<String>, growth: Growth, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let profile = Self {
            kind: ProfileKind::Callable {
                eval: Arc::new(eval),
                label: label.into(),
            },
            growth,
            class_a: None,
        };
        profile.validate_growth()?;
        Ok(profile)
    }

    /// c · r^p · e^{-a r}, a > 0.
    pub fn exp_decay(coeff: Complex64, power: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && power >= 0.0) {
            return Err(Error::domain("exp profile needs rate > 0 and power >= 0"));
        }
        // max_r r^p e^{-a r} = (p/(a e))^p
        let peak = if power == 0.0 { 1.0 } else { (power / (rate * std::f64::consts::E)).powf(power) };
        let label = format!("{coeff}*r^{power}*exp(-{rate}r)");
        Self::callable(label, Growth::new(0.0, coeff.norm() * peak * 1.0001), move |r| {
            coeff * (r.powf(power) * (-rate * r).exp())
        })
    }

    /// c · r^p · e^{-a r²}, a > 0.
    pub fn gaussian(coeff: Complex64, power: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && power >= 0.0) {
            return Err(Error::domain("gaussian profile needs rate > 0 and power >= 0"));
        }
        let peak = if power == 0.0 {
            1.0
        } else {
            (power / (2.0 * rate * std::f64::consts::E)).powf(power / 2.0)
        };
        let label = format!("{coeff}*r^{power}*exp(-{rate}r^2)");
        Self::callable(label, Growth::new(0.0, coeff.norm() * peak * 1.0001), move |r| {
            coeff * (r.powf(power) * (-rate * r * r).exp())
        })
    }

    pub fn interpolated(interp: RadialInterpolant) -> Self {
        let last = *interp.nodes().last().expect("interpolant has nodes");
        let max_abs = (0..=400)
            .map(|i| interp.eval(last * i as f64 / 400.0).norm())
            .chain(interp.values().iter().map(|v| v.norm()))
            .fold(0.0, f64::max);
        Self {
            kind: ProfileKind::Interpolated(interp),
            growth: Growth::new(0.0, (1.1 * max_abs).max(f64::MIN_POSITIVE)),
            class_a: Some(ClassA { rho: 0.0, eta: 0.0 }),
        }
    }

    pub fn with_class_a(mut self, rho: f64, eta: f64) -> Self {
        self.class_a = Some(ClassA { rho, eta });
        self
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn class_a(&self) -> Option<ClassA> {
        self.class_a
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ProfileKind::Zero)
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        match &self.kind {
            ProfileKind::Zero => Complex64::new(0.0, 0.0),
            ProfileKind::Monomial { coeff, power } => {
                if *power == 0.0 {
                    *coeff
                } else {
                    coeff * r.powf(*power)
                }
            }
            ProfileKind::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * r + c)
            }
            ProfileKind::Callable { eval, .. } => eval(r),
            ProfileKind::Interpolated(i) => i.eval(r),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            ProfileKind::Zero => "0".into(),
            ProfileKind::Monomial { coeff, power } => format!("{coeff}*r^{power}"),
            ProfileKind::Polynomial { coeffs } => {
                let terms: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() != 0.0)
                    .map(|(i, c)| format!("{c}*r^{i}"))
                    .collect();
                terms.join(" + ")
            }
            ProfileKind::Callable { label, .. } => label.clone(),
            ProfileKind::Interpolated(i) => format!("interpolated({} radii)", i.nodes().len()),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        let kind = match &self.kind {
            ProfileKind::Zero => ProfileKind::Zero,
            ProfileKind::Monomial { coeff, power } => ProfileKind::Monomial {
                coeff: coeff.conj(),
                power: *power,
            },
            ProfileKind::Polynomial { coeffs } => ProfileKind::Polynomial {
                coeffs: coeffs.iter().map(|c| c.conj()).collect(),
            },
            ProfileKind::Callable { eval, label } => {
                let inner = Arc::clone(eval);
                ProfileKind::Callable {
                    eval: Arc::new(move |r| inner(r).conj()),
                    label: format!("conj({label})"),
                }
            }
            ProfileKind::Interpolated(i) => ProfileKind::Interpolated(i.map_values(|v| v.conj())),
        };
        Self {
            kind,
            growth: self.growth,
            class_a: self.class_a,
        }
    }

    /// Checks |v(r)| ≤ C (1+r)^m on the validation grid.
    pub fn validate_growth(&self) -> Result<()> {
        let Growth { exponent, constant } = self.growth;
        if !(exponent.is_finite() && exponent >= 0.0 && constant.is_finite() && constant > 0.0) {
            return Err(Error::domain("growth exponent must be >= 0 and constant > 0"));
        }
        for i in 1..=GROWTH_CHECK_POINTS {
            let r = GROWTH_CHECK_RADIUS * i as f64 / GROWTH_CHECK_POINTS as f64;
            let v = self.eval(r);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::domain(format!("profile {} is not finite at r = {r}", self.label())));
            }
            let bound = constant * (1.0 + r).powf(exponent);
            if v.norm() > bound * (1.0 + 1e-12) {
                return Err(Error::Classification(format!(
                    "profile {} violates its declared bound {constant}(1+r)^{exponent} at r = {r}",
                    self.label()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation() {
        assert_eq!(RadialProfile::monomial(2.0).eval(3.0), c(9.0, 0.0));
        assert_eq!(RadialProfile::constant(c(2.0, 1.0)).eval(0.0), c(2.0, 1.0));
        let p = RadialProfile::polynomial(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(p.eval(2.0), c(5.0, 0.0));
        assert_eq!(p.growth().exponent, 2.0);
        let e = RadialProfile::exp_decay(c(1.0, 0.0), 0.0, 1.0).unwrap();
        assert!((e.eval(1.0).re - (-1f64).exp()).abs() < 1e-16);
        assert!(RadialProfile::polynomial(vec![c(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn conj_matches_pointwise() {
        let profiles = vec![
            RadialProfile::scaled_monomial(c(1.0, 2.0), 1.5),
            RadialProfile::polynomial(vec![c(0.0, 1.0), c(2.0, -1.0)]),
            RadialProfile::gaussian(c(0.5, 0.5), 1.0, 0.3).unwrap(),
        ];
        for p in profiles {
            let q = p.conj();
            for i in 0..20 {
                let r = i as f64 * 0.4;
                assert_eq!(q.eval(r), p.eval(r).conj());
            }
        }
    }

    #[test]
    fn growth_validation() {
        assert!(RadialProfile::callable("bad", Growth::new(1.0, 1.0), |r| c(r * r, 0.0)).is_err());
        assert!(RadialProfile::callable("ok", Growth::new(2.0, 1.0), |r| c(r * r, 0.0)).is_ok());
        assert!(RadialProfile::gaussian(c(3.0, 0.0), 4.0, 0.5).unwrap().validate_growth().is_ok());
        assert!(RadialProfile::exp_decay(c(1.0, 0.0), 3.0, 2.0).unwrap().validate_growth().is_ok());
    }
}
