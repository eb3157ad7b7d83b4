//! Weighted Mellin transforms
//!
//! ```text
//! M[v G_s](ζ) = (1/π) ∫₀^∞ v(t) e^{-t²} t^{ζ+2s-1} dt,
//! ```
//!
//! evaluated at real ζ. The 1/π of the density is folded in here. Note the
//! shift relation M[v G_s](ζ) = M[v G_0](ζ + 2s).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::SobolevOrder;
use crate::special::{gaussian_weighted_integral_with, ln_gamma_pos, log_gamma, GaussianWeight, QuadratureSpec};
use crate::symbols::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinValue {
    pub argument: f64,
    pub value: Complex64,
    pub abs_error_estimate: f64,
}

fn check_half_plane(s: SobolevOrder, zeta: f64) -> Result<f64> {
    let alpha = zeta + 2.0 * s.value();
    if !(zeta.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!(
            "Mellin argument ζ = {zeta} with s = {s} lies outside the half-plane ζ + 2s > 0"
        )));
    }
    Ok(alpha)
}

/// Natural log-scale of M[G_s](ζ) = Γ((ζ+2s)/2)/(2π); used to keep large
/// moments inside f64 range.
pub fn natural_log_scale(s: SobolevOrder, zeta: f64) -> Result<f64> {
    let alpha = check_half_plane(s, zeta)?;
    Ok(ln_gamma_pos(alpha / 2.0) - (2.0 * PI).ln())
}

/// M[v G_s](ζ) computed by quadrature.
pub fn mellin_weighted(v: &RadialProfile, s: SobolevOrder, zeta: f64, quad: &QuadratureSpec) -> Result<MellinValue> {
    let ln_scale = natural_log_scale(s, zeta)?;
    let scaled = mellin_weighted_scaled(v, s, zeta, ln_scale, quad)?;
    let factor = ln_scale.exp();
    Ok(MellinValue {
        argument: zeta,
        value: scaled.value * factor,
        abs_error_estimate: scaled.abs_error_estimate * factor,
    })
}

/// e^{-L} · M[v G_s](ζ). Callers that divide by Gamma values anyway
/// (matrix entries, Φ) pass the matching L so nothing overflows.
pub fn mellin_weighted_scaled(
    v: &RadialProfile,
    s: SobolevOrder,
    zeta: f64,
    log_scale: f64,
    quad: &QuadratureSpec,
) -> Result<MellinValue> {
    let alpha = check_half_plane(s, zeta)?;
    if v.is_zero() {
        return Ok(MellinValue {
            argument: zeta,
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
        });
    }
    // fold the 1/π into the scale so the quadrature sees O(1) values
    let weight = GaussianWeight::new(alpha)
        .with_growth(v.growth())
        .with_log_scale(log_scale + PI.ln());
    let integral = gaussian_weighted_integral_with(|t| v.eval(t), &weight, quad)
        .map_err(|e| e.within(format_args!("M[{}·G_s]({zeta}) at s = {s}", v.label())))?;
    Ok(MellinValue {
        argument: zeta,
        value: integral.value,
        abs_error_estimate: integral.abs_error,
    })
}

/// Γ((ζ+p+2s)/2)/(2π), the transform of the monomial r^p.
pub fn mellin_monomial_closed_form(p: f64, s: SobolevOrder, zeta: f64) -> Result<Complex64> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::domain(format!("monomial power must be finite and >= 0, got {p}")));
    }
    let arg = (zeta + p + 2.0 * s.value()) / 2.0;
    if !(arg > 0.0) {
        return Err(Error::domain(format!(
            "closed form needs ζ + p + 2s > 0, got ζ = {zeta}, p = {p}, s = {s}"
        )));
    }
    Ok(Complex64::new(log_gamma(arg)?.exp() / (2.0 * PI), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(s: f64) -> SobolevOrder {
        SobolevOrder::new(s).unwrap()
    }

    #[test]
    fn examples() {
        let q = QuadratureSpec::default();
        let one = RadialProfile::constant(1.0);
        let m = mellin_weighted(&one, order(0.0), 2.0, &q).unwrap();
        assert!((m.value.re - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(m.abs_error_estimate >= 0.0 && m.abs_error_estimate < 1e-13);
        let m = mellin_weighted(&one, order(2.3), 2.0, &q).unwrap();
        let want = libm::tgamma(3.3) / (2.0 * PI);
        assert!((m.value.re - want).abs() < 1e-13 * want);

        let cf = |p, s, z| mellin_monomial_closed_form(p, order(s), z).unwrap().re;
        assert!((cf(2.0, 0.0, 2.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((cf(1.0, 0.0, 3.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((cf(0.0, 0.0, 7.0) - libm::tgamma(3.5) / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn outside_half_plane() {
        let q = QuadratureSpec::default();
        let one = RadialProfile::constant(1.0);
        assert!(matches!(mellin_weighted(&one, order(0.0), 0.0, &q), Err(Error::Domain(_))));
        assert!(matches!(mellin_weighted(&one, order(0.5), -1.0, &q), Err(Error::Domain(_))));
        assert!(mellin_weighted(&one, order(0.5), -0.5, &q).is_ok());
        assert!(mellin_monomial_closed_form(0.0, order(0.0), -1.0).is_err());
    }

    #[test]
    fn oracle_sweep() {
        let q = QuadratureSpec::default();
        for p in 0..=3 {
            let v = RadialProfile::monomial(p as f64);
            for &s in &[0.0, 0.5, 1.0, 2.3] {
                for zeta in 1..=60 {
                    let z = zeta as f64;
                    let got = mellin_weighted(&v, order(s), z, &q).unwrap();
                    let want = mellin_monomial_closed_form(p as f64, order(s), z).unwrap();
                    let rel = (got.value - want).norm() / want.norm();
                    assert!(rel <= 1e-10, "p={p} s={s} ζ={zeta}: rel {rel:e}");
                    assert!(got.abs_error_estimate.is_finite());
                }
            }
        }
    }

    #[test]
    fn shift_relation() {
        let q = QuadratureSpec::default();
        let profiles = [
            RadialProfile::constant(Complex64::new(0.3, -1.0)),
            RadialProfile::monomial(1.5),
            RadialProfile::exp_decay(Complex64::new(1.0, 0.0), 0.0, 1.0).unwrap(),
            RadialProfile::gaussian(Complex64::new(0.0, 2.0), 1.0, 0.5).unwrap(),
        ];
        for v in &profiles {
            for &s in &[0.5, 1.0, 2.3] {
                for &zeta in &[1.0, 4.0, 11.5] {
                    let a = mellin_weighted(v, order(s), zeta, &q).unwrap();
                    let b = mellin_weighted(v, order(0.0), zeta + 2.0 * s, &q).unwrap();
                    let bound = a.abs_error_estimate + b.abs_error_estimate;
                    assert!((a.value - b.value).norm() <= bound.max(1e-14 * a.value.norm()), "{}", v.label());
                }
            }
        }
    }

    #[test]
    fn exp_profile_against_independent_oracle() {
        // ∫₀^∞ e^{-t} e^{-t²} t dt = 1/2 - (√π/4) e^{1/4} erfc(1/2)
        let q = QuadratureSpec::default();
        let v = RadialProfile::exp_decay(Complex64::new(1.0, 0.0), 0.0, 1.0).unwrap();
        let got = mellin_weighted(&v, order(0.0), 2.0, &q).unwrap().value.re * PI;
        let want = 0.5 - PI.sqrt() / 4.0 * (0.25f64).exp() * libm::erfc(0.5);
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn scaled_variant_survives_huge_moments() {
        let q = QuadratureSpec::default();
        let s = order(1.0);
        let zeta = 600.0;
        let ln = natural_log_scale(s, zeta).unwrap();
        let got = mellin_weighted_scaled(&RadialProfile::monomial(2.0), s, zeta, ln, &q).unwrap();
        // Γ(302)/Γ(301) = 301
        assert!((got.value.re - 301.0).abs() < 1e-9 * 301.0, "{}", got.value);
    }
}
