//! Symbols as finite Fourier-radial expansions `u(re^{iθ}) = Σ_j v_j(r) e^{ijθ}`.

mod decompose;
mod def;
mod interp;
mod profile;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

pub use decompose::{decompose, l2_distance, DecomposeOptions, PolarSamples};
pub use def::{ModeDef, ProfileDef, SymbolDef, PRESETS};
pub use interp::{chebyshev_radii, RadialInterpolant};
pub use profile::{ClassA, ProfileKind, RadialProfile};

use crate::error::{Error, Result};
use crate::fock::SobolevOrder;
use crate::special::Growth;

/// Angular resolution used by the grid-based norm and growth estimates.
pub const DEFAULT_ANGLES: usize = 64;

/// Values of `|v_j(0)|` below this are treated as vanishing at the origin.
const ORIGIN_TOL: f64 = 1e-12;

/// Highest exponent tried by [`fit_growth`].
pub const GROWTH_LADDER_MAX: u32 = 10;

/// A symbol given by finitely many angular modes.
#[derive(Debug, Clone)]
pub struct SymbolSpec {
    name: String,
    modes: BTreeMap<i32, RadialProfile>,
}

impl SymbolSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            modes: BTreeMap::new(),
        }
    }

    pub fn radial(name: impl Into<String>, profile: RadialProfile) -> Self {
        Self::new(name).with_mode(0, profile)
    }

    /// Adds (or replaces) mode `j`. Zero profiles are not stored.
    pub fn with_mode(mut self, j: i32, profile: RadialProfile) -> Self {
        if profile.is_zero() {
            self.modes.remove(&j);
        } else {
            self.modes.insert(j, profile);
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn modes(&self) -> &BTreeMap<i32, RadialProfile> {
        &self.modes
    }

    pub fn mode(&self, j: i32) -> Option<&RadialProfile> {
        self.modes.get(&j)
    }

    pub fn mode_indices(&self) -> Vec<i32> {
        self.modes.keys().copied().collect()
    }

    pub fn is_radial(&self) -> bool {
        self.modes.keys().all(|&j| j == 0)
    }

    /// Largest |j| among the stored modes; the band width of T_u.
    pub fn band(&self) -> usize {
        self.modes.keys().map(|j| j.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// The symbol ū: mode j of u becomes mode -j with conjugated profile.
    pub fn conjugate(&self) -> Self {
        Self {
            name: format!("conj({})", self.name),
            modes: self.modes.iter().map(|(&j, p)| (-j, p.conj())).collect(),
        }
    }

    /// Combined growth bound: exponents take the max, constants add.
    pub fn growth(&self) -> Growth {
        self.modes.values().fold(Growth::new(0.0, 0.0), |acc, p| {
            let g = p.growth();
            Growth::new(acc.exponent.max(g.exponent), acc.constant + g.constant)
        })
    }

    /// Σ_j v_j(r) e^{ijθ}. At r = 0 only the j = 0 mode contributes.
    pub fn evaluate_polar(&self, r: f64, theta: f64) -> Complex64 {
        self.modes
            .iter()
            .filter(|&(&j, _)| r > 0.0 || j == 0)
            .map(|(&j, p)| p.eval(r) * Complex64::from_polar(1.0, j as f64 * theta))
            .sum()
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            if let Some((j, p)) = self
                .modes
                .iter()
                .find(|&(&j, p)| j != 0 && p.eval(0.0).norm() > ORIGIN_TOL)
            {
                return Err(Error::domain(format!(
                    "symbol {} has angular mode {j} with v_j(0) = {} != 0; the value at z = 0 is undefined",
                    self.name,
                    p.eval(0.0)
                )));
            }
        }
        let (r, theta) = z.to_polar();
        Ok(self.evaluate_polar(r, theta))
    }
}

/// max over the polar grid of |u(z)| (1+|z|)^s e^{-ε|z|²}, a lower estimate
/// of the D^s_ε norm.
pub fn dpoly_norm_estimate(spec: &SymbolSpec, s: SobolevOrder, epsilon: f64, radii: &[f64]) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::domain("epsilon must be finite and >= 0"));
    }
    if radii.is_empty() {
        return Err(Error::precondition("radius grid is empty"));
    }
    let mut best: f64 = 0.0;
    for &r in radii {
        let weight = (1.0 + r).powf(s.value()) * (-epsilon * r * r).exp();
        for m in 0..DEFAULT_ANGLES {
            let theta = 2.0 * PI * m as f64 / DEFAULT_ANGLES as f64;
            best = best.max(spec.evaluate_polar(r, theta).norm() * weight);
        }
    }
    Ok(best)
}

/// Fits |u(z)| ≤ C (1+|z|)^m with the smallest m in {0, …, 10}.
///
/// C is the sup of |u|/(1+|z|)^m over the inner half of the grid (radii up
/// to the median); m is accepted when the outer half stays within 10% of
/// it. The returned constant carries the 10% headroom.
pub fn fit_growth(spec: &SymbolSpec, radii: &[f64]) -> Result<Growth> {
    if radii.is_empty() {
        return Err(Error::precondition("radius grid is empty"));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[(sorted.len() - 1) / 2];
    let peaks: Vec<(f64, f64)> = sorted
        .iter()
        .map(|&r| {
            let peak = (0..DEFAULT_ANGLES)
                .map(|m| spec.evaluate_polar(r, 2.0 * PI * m as f64 / DEFAULT_ANGLES as f64).norm())
                .fold(0.0, f64::max);
            (r, peak)
        })
        .collect();
    if peaks.iter().any(|(_, p)| !p.is_finite()) {
        return Err(Error::Classification(format!(
            "symbol {} overflows on the grid; not of polynomial growth",
            spec.name()
        )));
    }

    for m in 0..=GROWTH_LADDER_MAX {
        let ratio = |(r, p): &(f64, f64)| p / (1.0 + r).powi(m as i32);
        let inner = peaks.iter().filter(|(r, _)| *r <= median).map(ratio).fold(0.0, f64::max);
        let outer = peaks.iter().map(ratio).fold(0.0, f64::max);
        if outer <= 1.1 * inner || outer == 0.0 {
            let constant = (1.1 * outer).max(f64::MIN_POSITIVE);
            return Ok(Growth::new(m as f64, constant));
        }
    }
    Err(Error::Classification(format!(
        "symbol {} grows faster than (1+|z|)^{GROWTH_LADDER_MAX} on the grid",
        spec.name()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn re_z() -> SymbolSpec {
        SymbolSpec::new("Re z")
            .with_mode(1, RadialProfile::scaled_monomial(c(0.5, 0.0), 1.0))
            .with_mode(-1, RadialProfile::scaled_monomial(c(0.5, 0.0), 1.0))
    }

    #[test]
    fn evaluate_examples() {
        let r2 = SymbolSpec::radial("r^2", RadialProfile::monomial(2.0));
        assert!((r2.evaluate(c(0.0, 2.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-14);
        for &(r, th) in &[(1.0, 0.3), (2.5, -2.0), (0.1, 3.0)] {
            let z = Complex64::from_polar(r, th);
            assert!((re_z().evaluate(z).unwrap() - c(z.re, 0.0)).norm() < 1e-14);
        }
        let z2 = SymbolSpec::new("z^2").with_mode(2, RadialProfile::monomial(2.0));
        let got = z2.evaluate(Complex64::from_polar(1.0, PI / 4.0)).unwrap();
        assert!((got - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_at_origin() {
        assert_eq!(re_z().evaluate(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let bad = SymbolSpec::new("e^{iθ}").with_mode(1, RadialProfile::constant(1.0));
        assert!(matches!(bad.evaluate(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn radiality_and_zero_modes() {
        let s = SymbolSpec::new("x").with_mode(3, RadialProfile::zero());
        assert!(s.modes().is_empty() && s.is_radial());
        assert!(!re_z().is_radial());
        assert_eq!(re_z().band(), 1);
        let conj = SymbolSpec::new("z").with_mode(1, RadialProfile::monomial(1.0)).conjugate();
        assert_eq!(conj.mode_indices(), vec![-1]);
    }

    #[test]
    fn dpoly_examples() {
        let one = SymbolSpec::radial("1", RadialProfile::constant(1.0));
        let radii: Vec<f64> = (0..=90).map(|i| i as f64 * 0.1).collect();
        let s0 = SobolevOrder::new(0.0).unwrap();
        let s1 = SobolevOrder::new(1.0).unwrap();
        assert!((dpoly_norm_estimate(&one, s0, 0.0, &radii).unwrap() - 1.0).abs() < 1e-15);
        assert!((dpoly_norm_estimate(&one, s1, 0.0, &radii).unwrap() - 10.0).abs() < 1e-12);
        let r2 = SymbolSpec::radial("|z|^2", RadialProfile::monomial(2.0));
        let got = dpoly_norm_estimate(&r2, s0, 0.25, &radii).unwrap();
        // dense-grid maximum of r² e^{-r²/4}
        let dense = (0..=100_000)
            .map(|i| {
                let r = i as f64 * 1e-4;
                r * r * (-r * r / 4.0).exp()
            })
            .fold(0.0, f64::max);
        assert!((dense - 4.0 / std::f64::consts::E).abs() < 1e-8);
        assert!((got - 4.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(dpoly_norm_estimate(&r2, s0, -1.0, &radii).is_err());
        assert!(dpoly_norm_estimate(&r2, s0, 0.0, &[]).is_err());
    }

    #[test]
    fn growth_fit() {
        let radii: Vec<f64> = (1..=500).map(|i| i as f64 * 0.1).collect();
        let one = SymbolSpec::radial("1", RadialProfile::constant(1.0));
        assert_eq!(fit_growth(&one, &radii).unwrap().exponent, 0.0);
        let cube = SymbolSpec::radial("|z|^3", RadialProfile::monomial(3.0));
        let g = fit_growth(&cube, &radii).unwrap();
        assert_eq!(g.exponent, 3.0);
        assert!(radii.iter().all(|&r| r.powi(3) <= g.constant * (1.0 + r).powi(3)));
        let exp = SymbolSpec::radial(
            "e^{|z|}",
            RadialProfile::callable("e^r", Growth::new(0.0, f64::MAX), |r| c(r.exp(), 0.0)).unwrap(),
        );
        assert!(matches!(fit_growth(&exp, &radii), Err(Error::Classification(_))));
    }
}
