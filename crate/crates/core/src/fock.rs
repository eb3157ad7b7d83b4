//! Fock-Sobolev primitives: the weighted Gaussian density `G_s`, monomial
//! norms and the reproducing kernel `K^s(z,w) = Σ (z w̄)^n / Γ(s+n+1)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma_pos;

/// Default cap on the number of kernel series terms; covers |z w̄| up to
/// roughly 100.
pub const DEFAULT_KERNEL_TERMS: usize = 512;

/// The order `s ≥ 0` of the space F^{2,s}.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SobolevOrder(f64);

impl SobolevOrder {
    pub const FOCK: SobolevOrder = SobolevOrder(0.0);

    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s >= 0.0 {
            Ok(Self(s))
        } else {
            Err(Error::domain(format!("Sobolev order must be finite and >= 0, got {s}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// ln Γ(s+n+1) = ln ‖z^n‖².
    pub fn ln_basis_norm_sq(self, n: usize) -> f64 {
        ln_gamma_pos(self.0 + n as f64 + 1.0)
    }
}

impl TryFrom<f64> for SobolevOrder {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        SobolevOrder::new(s)
    }
}

impl From<SobolevOrder> for f64 {
    fn from(s: SobolevOrder) -> f64 {
        s.0
    }
}

impl fmt::Display for SobolevOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// G_s(z) = |z|^{2s} e^{-|z|²} / π.
pub fn density(z: Complex64, s: SobolevOrder) -> f64 {
    let r2 = z.norm_sqr();
    let radial = if s.0 == 0.0 { 1.0 } else { r2.powf(s.0) };
    radial * (-r2).exp() / PI
}

/// ‖z^n‖²_{L²(G_s dA)} = Γ(s+n+1).
pub fn basis_norm_sq(n: usize, s: SobolevOrder) -> f64 {
    s.ln_basis_norm_sq(n).exp()
}

/// A truncated evaluation of the kernel series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    /// Number of series terms summed.
    pub truncation_order: usize,
    /// Upper bound on the absolute truncation error.
    pub tail_bound: f64,
}

/// K^s(z, w) with a tail bound at most `abs_tol`, using the default term cap.
pub fn kernel_eval(z: Complex64, w: Complex64, s: SobolevOrder, abs_tol: f64) -> Result<KernelValue> {
    kernel_eval_capped(z, w, s, abs_tol, DEFAULT_KERNEL_TERMS)
}

/// K^s(z, w) with an explicit cap on the number of series terms.
///
/// Once the term ratio `|z w̄| / (s+n+1)` drops below 1/2 it stays there, so
/// the remaining tail is bounded by twice the next term.
pub fn kernel_eval_capped(
    z: Complex64,
    w: Complex64,
    s: SobolevOrder,
    abs_tol: f64,
    max_terms: usize,
) -> Result<KernelValue> {
    if !(abs_tol.is_finite() && abs_tol > 0.0) {
        return Err(Error::domain("kernel abs_tol must be finite and positive"));
    }
    let x = z * w.conj();
    let ax = x.norm();
    let mut term = Complex64::new((-ln_gamma_pos(s.0 + 1.0)).exp(), 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..max_terms {
        sum += term;
        let ratio = ax / (s.0 + n as f64 + 1.0);
        term = term * x / (s.0 + n as f64 + 1.0);
        if ratio < 0.5 {
            let tail_bound = 2.0 * term.norm();
            if tail_bound <= abs_tol {
                return Ok(KernelValue {
                    value: sum,
                    truncation_order: n + 1,
                    tail_bound,
                });
            }
        }
    }
    Err(Error::Resource(format!(
        "kernel series at |z w̄| = {ax} needs more than {max_terms} terms for tolerance {abs_tol:e}"
    )))
}

/// ‖K^s_z‖ = √K^s(z, z).
pub fn kernel_norm(z: Complex64, s: SobolevOrder, abs_tol: f64) -> Result<f64> {
    Ok(kernel_eval(z, z, s, abs_tol)?.value.re.sqrt())
}
