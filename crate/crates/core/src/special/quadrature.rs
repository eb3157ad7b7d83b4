//! Gaussian-weighted integrals on the half-line.
//!
//! Everything downstream reduces to
//!
//! ```text
//!     e^{-L} ∫₀^∞ f(t) e^{-t²} t^{α-1} dt
//! ```
//!
//! for a smooth `f` of polynomial growth, a real exponent `α > 0` and an
//! optional log-scale `L` that keeps large Mellin moments inside f64 range.
//! The half-line is truncated at a cutoff `R` chosen from the declared
//! growth of `f`, and `[0, R]` is integrated by globally adaptive 21-point
//! Gauss-Kronrod bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INITIAL_PANELS: usize = 8;

/// Controls for the adaptive half-line quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Panel budget: the maximum number of 21-node Gauss-Kronrod panels one
    /// integral may be split into before an accuracy error is raised.
    pub node_count: usize,
    /// Minimum truncation radius. The effective cutoff is raised whenever
    /// the integrand's declared growth needs more room.
    pub tail_cutoff: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: 2048,
            tail_cutoff: 6.0,
            abs_tol: 1e-15,
            rel_tol: 1e-13,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::precondition("quadrature node_count must be at least 2"));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.tail_cutoff) || !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(Error::precondition(
                "quadrature tail_cutoff, abs_tol and rel_tol must be finite and positive",
            ));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self {
            abs_tol: self.abs_tol * 0.5,
            rel_tol: self.rel_tol * 0.5,
            ..*self
        }
    }
}

/// Declared polynomial growth |f(t)| ≤ constant·(1+t)^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub exponent: f64,
    pub constant: f64,
}

impl Growth {
    pub const fn new(exponent: f64, constant: f64) -> Self {
        Self { exponent, constant }
    }

    /// Used when a caller does not declare growth; generous enough for the
    /// monomials up to degree ten that appear in the test sweeps.
    pub const CONSERVATIVE: Growth = Growth::new(10.0, 1.0);

    pub const BOUNDED: Growth = Growth::new(0.0, 1.0);
}

impl Default for Growth {
    fn default() -> Self {
        Growth::CONSERVATIVE
    }
}

/// The weight `e^{-t²} t^{α-1} e^{-L}` together with the growth of the
/// function it multiplies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWeight {
    pub alpha: f64,
    pub log_scale: f64,
    pub growth: Growth,
}

impl GaussianWeight {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            log_scale: 0.0,
            growth: Growth::default(),
        }
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_log_scale(mut self, log_scale: f64) -> Self {
        self.log_scale = log_scale;
        self
    }

    /// Upper bound for ∫_R^∞ C(1+t)^m t^{α-1} e^{-t²-L} dt, valid once
    /// 2R² exceeds the combined exponent.
    pub fn tail_bound(&self, r: f64) -> f64 {
        let c = (self.alpha - 1.0).max(0.0) + self.growth.exponent.max(0.0);
        let slope = 2.0 * r - c / r;
        if slope <= 0.0 {
            return f64::INFINITY;
        }
        let ln_peak = self.growth.constant.max(f64::MIN_POSITIVE).ln()
            + self.growth.exponent * (1.0 + r).ln()
            + (self.alpha - 1.0) * r.ln()
            - r * r
            - self.log_scale;
        (ln_peak - slope.ln()).exp()
    }

    /// Smallest cutoff (on a 0.25 ladder, at least `spec.tail_cutoff`) whose
    /// tail bound sits below a tenth of the absolute tolerance.
    pub fn cutoff(&self, spec: &QuadratureSpec) -> f64 {
        let target = 0.1 * spec.abs_tol;
        let mut r = spec.tail_cutoff;
        while self.tail_bound(r) > target && r < 1e4 {
            r += 0.25;
        }
        r
    }
}

/// Result of a quadrature: value, an error estimate that already includes
/// the truncated tail and a rounding floor, and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: Complex64,
    pub abs_error: f64,
    pub cutoff: f64,
    pub panels: usize,
}

/// ∫₀^∞ f(t) e^{-t²} t^{α-1} dt with conservative declared growth.
pub fn gaussian_weighted_integral<F>(f: F, alpha: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    gaussian_weighted_integral_with(f, &GaussianWeight::new(alpha), spec)
}

/// e^{-L} ∫₀^∞ f(t) e^{-t²} t^{α-1} dt for an explicit weight description.
pub fn gaussian_weighted_integral_with<F>(
    f: F,
    weight: &GaussianWeight,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    let alpha = weight.alpha;
    let log_scale = weight.log_scale;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!(
            "weighted integral needs a finite exponent alpha > 0, got {alpha}"
        )));
    }
    if !log_scale.is_finite() {
        return Err(Error::domain("log scale must be finite"));
    }

    let cutoff = weight.cutoff(spec);
    let tail = weight.tail_bound(cutoff);
    let am1 = alpha - 1.0;
    let kappa = move |a: f64, b: f64| {
        let lo = a + (b - a) * 2e-3;
        let ln_span = if am1 == 0.0 {
            0.0
        } else {
            am1.abs() * lo.ln().abs().max(b.ln().abs()).max(1.0)
        };
        ln_span + b * b + log_scale.abs()
    };
    let weighted = |t: f64| {
        let expo = if am1 == 0.0 {
            -t * t - log_scale
        } else {
            am1 * t.ln() - t * t - log_scale
        };
        f(t) * expo.exp()
    };

    let (value, err, panels) = if alpha >= 1.0 {
        adaptive(&weighted, 0.0, cutoff, INITIAL_PANELS, spec, &kappa)?
    } else {
        // t^{α-1} is singular at 0; on [0, t0] substitute t = t0·y^{1/α},
        // which turns t^{α-1} dt into (t0^α/α) dy.
        let t0 = cutoff.min(1.0);
        let inv_alpha = 1.0 / alpha;
        let prefactor = (alpha * t0.ln() - alpha.ln()).exp();
        let head_fn = |y: f64| {
            let t = t0 * y.powf(inv_alpha);
            f(t) * (prefactor * (-t * t - log_scale).exp())
        };
        let head_kappa = |_: f64, _: f64| alpha * t0.ln().abs() + 1.0 + log_scale.abs();
        let half = spec.halved();
        let (hv, he, hp) = adaptive(&head_fn, 0.0, 1.0, 2, &half, &head_kappa)?;
        let (bv, be, bp) = adaptive(&weighted, t0, cutoff, INITIAL_PANELS, &half, &kappa)?;
        (hv + bv, he + be, hp + bp)
    };

    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::domain(
            "weighted integral produced a non-finite value; check the integrand's growth",
        ));
    }
    Ok(Integral {
        value,
        abs_error: err + tail,
        cutoff,
        panels,
    })
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    floor: f64,
}

impl Panel {
    /// Error that further bisection can still remove.
    fn refinable(&self) -> f64 {
        let width_ok = (self.b - self.a) > 1e-13 * (1.0 + self.a.abs());
        if width_ok {
            (self.err - self.floor).max(0.0)
        } else {
            0.0
        }
    }

    fn reported(&self) -> f64 {
        self.err.max(self.floor)
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.refinable()
            .total_cmp(&other.refinable())
            // deterministic tie-break: leftmost panel first
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive GK21 on [a, b]. `kappa(a, b)` estimates how many ulps
/// of relative rounding the integrand evaluation itself carries on a panel.
fn adaptive<F, K>(
    f: &F,
    a: f64,
    b: f64,
    initial: usize,
    spec: &QuadratureSpec,
    kappa: &K,
) -> Result<(Complex64, f64, usize)>
where
    F: Fn(f64) -> Complex64,
    K: Fn(f64, f64) -> f64,
{
    let make = |lo: f64, hi: f64| {
        let (value, err, resabs) = gk21(f, lo, hi);
        let floor = f64::EPSILON * resabs * (50.0 + 2.0 * kappa(lo, hi));
        Panel {
            a: lo,
            b: hi,
            value,
            err,
            floor,
        }
    };

    let initial = initial.clamp(1, spec.node_count);
    let step = (b - a) / initial as f64;
    let mut heap: BinaryHeap<Panel> = (0..initial)
        .map(|i| {
            let lo = a + step * i as f64;
            let hi = if i + 1 == initial { b } else { lo + step };
            make(lo, hi)
        })
        .collect();

    loop {
        let total: Complex64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(Panel::reported).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        let top_refinable = heap.peek().map_or(0.0, Panel::refinable);
        if err <= tol || top_refinable == 0.0 {
            return Ok((sum_ordered(&heap), err, heap.len()));
        }
        if heap.len() >= spec.node_count {
            return Err(Error::Accuracy {
                context: format!("adaptive quadrature on [{a}, {b}] exhausted {} panels", spec.node_count),
                estimate: err,
                tolerance: tol,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(make(worst.a, mid));
        heap.push(make(mid, worst.b));
    }
}

/// Sum panel values left to right so the result does not depend on heap order.
fn sum_ordered(heap: &BinaryHeap<Panel>) -> Complex64 {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels.iter().map(|p| p.value).sum()
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Gauss-Kronrod panel: (integral, error estimate, ∫|f|).
fn gk21<F>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = Complex64::new(0.0, 0.0);
    let mut res_k = fc * WGK[10];
    let mut res_abs = WGK[10] * fc.norm();
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += (f1 + f2) * WG[j];
        res_k += (f1 + f2) * WGK[jtw];
        res_abs += WGK[jtw] * (f1.norm() + f2.norm());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += (f1 + f2) * WGK[jtwm1];
        res_abs += WGK[jtwm1] * (f1.norm() + f2.norm());
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let scale = half.abs();
    let result = res_k * half;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    (result, err, res_abs)
}

/// Plain adaptive GK21 on a finite interval, used for bounded-range
/// integrals that carry no Gaussian weight.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
    }
    let (value, abs_error, panels) = adaptive(&f, a, b, INITIAL_PANELS, spec, &|_, _| 1.0)?;
    Ok(Integral {
        value,
        abs_error,
        cutoff: b,
        panels,
    })
}
