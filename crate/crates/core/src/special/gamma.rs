//! Real-argument log-Gamma.
//!
//! Three regimes: a Taylor expansion of ln Γ(1+z) around the zeros at 1 and 2
//! (where only a series keeps the relative error small), the Stirling series
//! for x ≥ 10, and upward recurrence in between.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_617_6;

const STIRLING_THRESHOLD: f64 = 10.0;
const SERIES_RADIUS: f64 = 0.2;
const SERIES_TERMS: usize = 28;

/// Natural logarithm of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("log_gamma requires a finite x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

/// Γ(a)/Γ(b), evaluated in the log domain.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a == b && a.is_finite() && a > 0.0 {
        return Ok(1.0);
    }
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

/// Unchecked variant for internal callers that already validated `x > 0`.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if (x - 1.0).abs() < SERIES_RADIUS {
        return ln_gamma_1p(x - 1.0);
    }
    if (x - 2.0).abs() < SERIES_RADIUS {
        // ln Γ(2+z) = ln(1+z) + ln Γ(1+z)
        let z = x - 2.0;
        return z.ln_1p() + ln_gamma_1p(z);
    }
    if x >= STIRLING_THRESHOLD {
        return stirling(x);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < STIRLING_THRESHOLD {
        prod *= y;
        y += 1.0;
    }
    stirling(y) - prod.ln()
}

fn stirling(x: f64) -> f64 {
    // Bernoulli coefficients B_{2k} / (2k (2k-1))
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * inv
}

/// ln Γ(1+z) = -ln(1+z) + z(1-γ) + Σ_{k≥2} (-1)^k (ζ(k)-1) z^k / k, |z| small.
fn ln_gamma_1p(z: f64) -> f64 {
    let zeta = zeta_minus_one();
    let mut sum = 0.0;
    for k in (2..SERIES_TERMS).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum = sum * z + sign * zeta[k] / k as f64;
    }
    sum = sum * z * z;
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + sum
}

/// ζ(k) - 1 for k = 0..SERIES_TERMS (entries 0 and 1 unused), via direct
/// summation up to 31 and an Euler-Maclaurin tail.
fn zeta_minus_one() -> &'static [f64; SERIES_TERMS] {
    static TABLE: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        const N: f64 = 32.0;
        let mut out = [0.0; SERIES_TERMS];
        for (k, slot) in out.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            let head: f64 = (2..32).rev().map(|n| (n as f64).powf(-kf)).sum();
            let rising = |m: usize| (0..m).map(|i| kf + i as f64).product::<f64>();
            let tail = N.powf(1.0 - kf) / (kf - 1.0) + 0.5 * N.powf(-kf)
                + rising(1) * N.powf(-kf - 1.0) / 12.0
                - rising(3) * N.powf(-kf - 3.0) / 720.0
                + rising(5) * N.powf(-kf - 5.0) / 30_240.0
                - rising(7) * N.powf(-kf - 7.0) / 1_209_600.0;
            *slot = head + tail;
        }
        out
    })
}
