//! Truncated Toeplitz operators in the normalized monomial basis.
//!
//! Mode j of a symbol moves e_m to e_{m+j} with weight
//!
//! ```text
//! ⟨T e_m, e_{m+j}⟩ = 2π · M[v_j G_s](2m+j+2) / √(Γ(s+m+1) Γ(s+m+j+1)),
//! ```
//!
//! so T_u is banded with half-width max|j| and diagonal for radial u.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::SobolevOrder;
use crate::mellin::mellin_weighted_scaled;
use crate::par;
use crate::special::QuadratureSpec;
use crate::symbols::{RadialProfile, SymbolSpec};

/// Default bound on |z|^{2N}/Γ(s+N+1) for Berezin evaluations.
pub const DEFAULT_BEREZIN_TAIL_TOL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    size: usize,
    s: SobolevOrder,
    /// (n, m) = ⟨T e_m, e_n⟩
    entries: DMatrix<Complex64>,
    exact_band: usize,
    label: String,
    /// Largest quadrature error estimate over the entries.
    entry_error: f64,
}

/// Metadata written next to a matrix CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub s: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub exact_band: usize,
    pub label: String,
}

impl TruncatedOperator {
    /// Wraps an explicit matrix; `exact_band` must describe its sparsity.
    pub fn from_matrix(
        entries: DMatrix<Complex64>,
        s: SobolevOrder,
        exact_band: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        let size = entries.nrows();
        if size == 0 || entries.ncols() != size {
            return Err(Error::precondition("operator matrix must be square and non-empty"));
        }
        for ((n, m), v) in entries.iter().enumerate().map(|(i, v)| ((i % size, i / size), v)) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::domain(format!("matrix entry ({n}, {m}) is not finite")));
            }
            if n.abs_diff(m) > exact_band && *v != Complex64::new(0.0, 0.0) {
                return Err(Error::precondition(format!(
                    "entry ({n}, {m}) lies outside the declared band {exact_band}"
                )));
            }
        }
        Ok(Self {
            size,
            s,
            entries,
            exact_band,
            label: label.into(),
            entry_error: 0.0,
        })
    }

    pub fn identity(size: usize, s: SobolevOrder) -> Self {
        Self {
            size,
            s,
            entries: DMatrix::identity(size, size),
            exact_band: 0,
            label: "I".into(),
            entry_error: 0.0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> SobolevOrder {
        self.s
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    pub fn exact_band(&self) -> usize {
        self.exact_band
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn entry_error(&self) -> f64 {
        self.entry_error
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.size != other.size || self.s != other.s {
            return Err(Error::precondition(format!(
                "operators {} (N = {}, s = {}) and {} (N = {}, s = {}) live on different truncations",
                self.label, self.size, self.s, other.label, other.size, other.s
            )));
        }
        Ok(())
    }

    /// Matrix product on the common truncation; the band widths add.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let band = (self.exact_band + other.exact_band).min(self.size - 1);
        let mut entries = &self.entries * &other.entries;
        zero_outside_band(&mut entries, band);
        Ok(Self {
            size: self.size,
            s: self.s,
            entries,
            exact_band: band,
            label: format!("{}·{}", self.label, other.label),
            entry_error: propagate(self, other),
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            size: self.size,
            s: self.s,
            entries: self.entries.adjoint(),
            exact_band: self.exact_band,
            label: format!("{}*", self.label),
            entry_error: self.entry_error,
        }
    }

    pub fn envelope(&self) -> MatrixEnvelope {
        MatrixEnvelope {
            s: self.s.value(),
            n: self.size,
            exact_band: self.exact_band,
            label: self.label.clone(),
        }
    }

    /// `row,col,re,im` lines for every entry, row-major, shortest
    /// round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for n in 0..self.size {
            for m in 0..self.size {
                let v = self.entries[(n, m)];
                let _ = writeln!(out, "{n},{m},{},{}", fmt_f64(v.re), fmt_f64(v.im));
            }
        }
        out
    }
}

/// Shortest representation that parses back to the same f64, with `-0`
/// normalized to `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

fn zero_outside_band(m: &mut DMatrix<Complex64>, band: usize) {
    let size = m.nrows();
    for col in 0..size {
        for row in 0..size {
            if row.abs_diff(col) > band {
                m[(row, col)] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// First-order error bound for a product of two banded truncations.
fn propagate(a: &TruncatedOperator, b: &TruncatedOperator) -> f64 {
    let width = (2 * a.exact_band.min(b.exact_band) + 1) as f64;
    let max_a = a.entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_b = b.entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
    width * (a.entry_error * max_b + b.entry_error * max_a + a.entry_error * b.entry_error)
}

/// Matrix of T_u on span{e_0, …, e_{N-1}}.
pub fn toeplitz_matrix(spec: &SymbolSpec, s: SobolevOrder, size: usize, quad: &QuadratureSpec) -> Result<TruncatedOperator> {
    if size == 0 {
        return Err(Error::precondition("truncation size N must be positive"));
    }
    quad.validate()?;
    let mut tasks: Vec<(i32, usize)> = Vec::new();
    for &j in spec.modes().keys() {
        let lo = (-j).max(0) as usize;
        let hi = (size as i64 - j.max(0) as i64).max(0) as usize;
        tasks.extend((lo..hi).map(|m| (j, m)));
    }
    let results = par::map_collect(tasks, |(j, m)| {
        let profile = spec.mode(j).expect("task built from existing modes");
        mode_entry(profile, j, m, s, quad).map(|v| (j, m, v))
    });

    let mut entries = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    let mut entry_error: f64 = 0.0;
    for r in results {
        let (j, m, (value, err)) = r?;
        let n = (m as i64 + j as i64) as usize;
        entries[(n, m)] += value;
        entry_error = entry_error.max(err);
    }
    Ok(TruncatedOperator {
        size,
        s,
        entries,
        exact_band: spec.band().min(size - 1),
        label: format!("T[{}]", spec.name()),
        entry_error,
    })
}

/// ⟨T_{v e^{ijθ}} e_m, e_{m+j}⟩ with its error estimate.
pub(crate) fn mode_entry(
    profile: &RadialProfile,
    j: i32,
    m: usize,
    s: SobolevOrder,
    quad: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let n = m as i64 + j as i64;
    if n < 0 {
        return Err(Error::domain(format!("mode j = {j} maps e_{m} below e_0")));
    }
    let log_scale = 0.5 * (s.ln_basis_norm_sq(m) + s.ln_basis_norm_sq(n as usize));
    let zeta = (2 * m) as f64 + j as f64 + 2.0;
    let v = mellin_weighted_scaled(profile, s, zeta, log_scale, quad)
        .map_err(|e| e.within(format_args!("entry (j = {j}, m = {m})")))?;
    Ok((v.value * (2.0 * PI), v.abs_error_estimate * 2.0 * PI))
}

/// λ(k) = M[v0 G_s](2k+2) / M[G_s](2k+2), k = 0..N-1: the spectrum of the
/// radial operator T_{v0}.
pub fn radial_eigenvalues(v0: &RadialProfile, s: SobolevOrder, size: usize, quad: &QuadratureSpec) -> Result<Vec<Complex64>> {
    if size == 0 {
        return Err(Error::precondition("truncation size N must be positive"));
    }
    quad.validate()?;
    let results = par::map_collect((0..size).collect(), |k| mode_entry(v0, 0, k, s, quad).map(|(v, _)| v));
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commutator {
    pub op: TruncatedOperator,
    /// Largest index W such that entries (n, m) with n, m ≤ W are free of
    /// truncation leakage; `None` when the bands are too wide for N.
    pub window: Option<usize>,
}

/// AB − BA on the common truncation.
pub fn commutator(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<Commutator> {
    a.check_compatible(b)?;
    let band = a.exact_band + b.exact_band;
    let mut entries = &a.entries * &b.entries - &b.entries * &a.entries;
    let clipped = band.min(a.size - 1);
    zero_outside_band(&mut entries, clipped);
    let window = (a.size - 1).checked_sub(band);
    Ok(Commutator {
        op: TruncatedOperator {
            size: a.size,
            s: a.s,
            entries,
            exact_band: clipped,
            label: format!("[{}, {}]", a.label, b.label),
            entry_error: 2.0 * propagate(a, b),
        },
        window,
    })
}

/// Max |A_{nm}| over n, m ≤ window (clamped to the matrix).
pub fn window_max_abs(a: &TruncatedOperator, window: usize) -> f64 {
    let w = window.min(a.size - 1);
    a.entries.view((0, 0), (w + 1, w + 1)).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// ln(|z|^{2N}/Γ(s+N+1)), the size of the first kernel coefficient the
/// truncation drops.
fn ln_kernel_tail(z: Complex64, s: SobolevOrder, size: usize) -> f64 {
    let r = z.norm();
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    2.0 * size as f64 * r.ln() - s.ln_basis_norm_sq(size)
}

/// Smallest N with |z|^{2N}/Γ(s+N+1) < tol.
pub fn berezin_min_size(z: Complex64, s: SobolevOrder, tol: f64) -> Result<usize> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::domain("Berezin tail tolerance must be finite and positive"));
    }
    let target = tol.ln();
    (1..=100_000)
        .find(|&n| ln_kernel_tail(z, s, n) < target)
        .ok_or_else(|| Error::domain(format!("|z| = {} is too large for a Berezin truncation", z.norm())))
}

/// ⟨A K_z, K_z⟩ / ‖K_z‖² with K_z truncated to the first N coefficients
/// c_n = z̄^n / √Γ(s+n+1).
pub fn berezin(a: &TruncatedOperator, z: Complex64, tail_tol: f64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("Berezin point must be finite"));
    }
    if !(tail_tol.is_finite() && tail_tol > 0.0) {
        return Err(Error::domain("Berezin tail tolerance must be finite and positive"));
    }
    let ln_tail = ln_kernel_tail(z, a.s, a.size);
    if ln_tail >= tail_tol.ln() {
        let need = berezin_min_size(z, a.s, tail_tol)?;
        return Err(Error::domain(format!(
            "N = {} truncates the kernel at |z| = {} with tail {:e} >= {tail_tol:e}; use N >= {need}",
            a.size,
            z.norm(),
            ln_tail.exp()
        )));
    }
    let (r, theta) = z.to_polar();
    let c: Vec<Complex64> = (0..a.size)
        .map(|n| {
            if r == 0.0 {
                let v = if n == 0 { (-0.5 * a.s.ln_basis_norm_sq(0)).exp() } else { 0.0 };
                return Complex64::new(v, 0.0);
            }
            let modulus = (n as f64 * r.ln() - 0.5 * a.s.ln_basis_norm_sq(n)).exp();
            Complex64::from_polar(modulus, -(n as f64) * theta)
        })
        .collect();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for n in 0..a.size {
        let row: Complex64 = (0..a.size).map(|m| a.entries[(n, m)] * c[m]).sum();
        num += c[n].conj() * row;
        den += c[n].norm_sqr();
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::SymbolDef;

    fn order(s: f64) -> SobolevOrder {
        SobolevOrder::new(s).unwrap()
    }

    fn preset(name: &str) -> SymbolSpec {
        SymbolDef::preset(name).build().unwrap()
    }

    /// ⟨u e_m, e_n⟩_s by Simpson in r on [0, 12] and the trapezoid rule in θ,
    /// with Gamma values from libm.
    fn brute_entry(u: &SymbolSpec, s: f64, n: usize, m: usize) -> Complex64 {
        const R: f64 = 12.0;
        const NR: usize = 6000;
        const NT: usize = 64;
        let h = R / NR as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..=NR {
            let r = i as f64 * h;
            let w = if i == 0 || i == NR { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let radial = r.powf((m + n) as f64 + 2.0 * s + 1.0) * (-r * r).exp() / PI;
            let mut ang = Complex64::new(0.0, 0.0);
            for t in 0..NT {
                let th = 2.0 * PI * t as f64 / NT as f64;
                ang += u.evaluate_polar(r, th) * Complex64::from_polar(1.0, (m as f64 - n as f64) * th);
            }
            total += ang * (2.0 * PI / NT as f64) * radial * (w * h / 3.0);
        }
        let g = |k: usize| libm::tgamma(s + k as f64 + 1.0);
        total / (g(m) * g(n)).sqrt()
    }

    #[test]
    fn matrix_examples() {
        let q = QuadratureSpec::default();
        for &s in &[0.0, 0.5, 2.3] {
            let id = toeplitz_matrix(&preset("1"), order(s), 5, &q).unwrap();
            assert_eq!(id.exact_band(), 0);
            for n in 0..5 {
                for m in 0..5 {
                    let want = if n == m { 1.0 } else { 0.0 };
                    assert!((id.entry(n, m) - want).norm() < 1e-13);
                }
            }
            let r2 = toeplitz_matrix(&preset("|z|^2"), order(s), 8, &q).unwrap();
            for k in 0..8 {
                let want = s + k as f64 + 1.0;
                assert!((r2.entry(k, k).re - want).abs() < 1e-12 * want);
            }
            let z = toeplitz_matrix(&preset("z"), order(s), 8, &q).unwrap();
            assert_eq!(z.exact_band(), 1);
            for m in 0..7 {
                let want = (s + m as f64 + 1.0).sqrt();
                assert!((z.entry(m + 1, m).re - want).abs() < 1e-12 * want);
                assert_eq!(z.entry(m, m + 1), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn entries_match_brute_force_area_integrals() {
        let q = QuadratureSpec::default();
        for &s in &[0.0, 1.0] {
            for name in ["1", "|z|^2", "z", "re_z", "zbar^2"] {
                let u = preset(name);
                let t = toeplitz_matrix(&u, order(s), 5, &q).unwrap();
                for n in 0..5 {
                    for m in 0..5 {
                        let brute = brute_entry(&u, s, n, m);
                        let got = t.entry(n, m);
                        let scale = brute.norm().max(1e-300);
                        if brute.norm() < 1e-12 {
                            assert!(got.norm() < 1e-12, "{name} s={s} ({n},{m}): {got}");
                        } else {
                            assert!((got - brute).norm() / scale < 1e-8, "{name} s={s} ({n},{m}): {got} vs {brute}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn radial_eigenvalue_closed_forms() {
        let q = QuadratureSpec::default();
        for &s in &[0.0, 0.5, 1.0, 2.3] {
            let ones = radial_eigenvalues(&RadialProfile::constant(1.0), order(s), 10, &q).unwrap();
            assert!(ones.iter().all(|l| (l - 1.0).norm() < 1e-13));
            for p in 1..=3 {
                let lam = radial_eigenvalues(&RadialProfile::monomial(2.0 * p as f64), order(s), 30, &q).unwrap();
                for (k, l) in lam.iter().enumerate() {
                    let want = crate::special::gamma_ratio(s + k as f64 + p as f64 + 1.0, s + k as f64 + 1.0).unwrap();
                    assert!((l.re - want).abs() < 1e-11 * want, "p={p} k={k}");
                }
            }
            let r2 = toeplitz_matrix(&preset("|z|^2"), order(s), 12, &q).unwrap();
            let lam = radial_eigenvalues(&RadialProfile::monomial(2.0), order(s), 12, &q).unwrap();
            for k in 0..12 {
                assert_eq!(r2.entry(k, k), lam[k]);
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let q = QuadratureSpec::default();
        let s = order(0.7);
        let a = toeplitz_matrix(&preset("|z|^2"), s, 10, &q).unwrap();
        let b = toeplitz_matrix(&preset("z"), s, 10, &q).unwrap();
        let self_comm = commutator(&a, &a).unwrap();
        assert_eq!(window_max_abs(&self_comm.op, 9), 0.0);

        let c = commutator(&a, &b).unwrap();
        assert_eq!(c.window, Some(8));
        assert_eq!(c.op.exact_band(), 1);
        assert!((c.op.entry(1, 0).re - 1.7f64.sqrt()).abs() < 1e-12);

        // explicit 3x3 product
        let s0 = order(0.0);
        let a3 = toeplitz_matrix(&preset("|z|^2"), s0, 3, &q).unwrap();
        let b3 = toeplitz_matrix(&preset("z"), s0, 3, &q).unwrap();
        let c3 = commutator(&a3, &b3).unwrap();
        assert_eq!(c3.window, Some(1));
        assert!((window_max_abs(&c3.op, 1) - 1.0).abs() < 1e-12);

        let e = toeplitz_matrix(&preset("exp(-|z|)"), s, 10, &q).unwrap();
        let rr = commutator(&a, &e).unwrap();
        assert!(window_max_abs(&rr.op, rr.window.unwrap()) <= 1e-10);

        let other = toeplitz_matrix(&preset("z"), order(0.0), 10, &q).unwrap();
        assert!(matches!(commutator(&a, &other), Err(Error::Precondition(_))));
        let small = toeplitz_matrix(&preset("z"), s, 4, &q).unwrap();
        assert!(commutator(&a, &small).is_err());
    }

    #[test]
    fn window_has_no_truncation_leakage() {
        let q = QuadratureSpec::default();
        let s = order(1.0);
        let (u, v) = (preset("re_z"), preset("z^2"));
        let small = commutator(
            &toeplitz_matrix(&u, s, 8, &q).unwrap(),
            &toeplitz_matrix(&v, s, 8, &q).unwrap(),
        )
        .unwrap();
        let big = commutator(
            &toeplitz_matrix(&u, s, 20, &q).unwrap(),
            &toeplitz_matrix(&v, s, 20, &q).unwrap(),
        )
        .unwrap();
        let w = small.window.unwrap();
        assert_eq!(w, 4);
        for n in 0..=w {
            for m in 0..=w {
                assert!((small.op.entry(n, m) - big.op.entry(n, m)).norm() < 1e-12);
            }
        }
        // and just outside it the truncation shows
        let edge = (small.op.entry(7, 6) - big.op.entry(7, 6)).norm();
        assert!(edge > 1e-3);
    }

    #[test]
    fn berezin_examples() {
        let q = QuadratureSpec::default();
        let s = order(0.0);
        let id = TruncatedOperator::identity(40, s);
        for &z in &[Complex64::new(0.0, 0.0), Complex64::new(1.2, -0.7), Complex64::new(-2.0, 0.1)] {
            assert_eq!(berezin(&id, z, DEFAULT_BEREZIN_TAIL_TOL).unwrap(), Complex64::new(1.0, 0.0));
        }
        let zero = TruncatedOperator::from_matrix(DMatrix::zeros(40, 40), s, 0, "0").unwrap();
        assert_eq!(berezin(&zero, Complex64::new(1.0, 1.0), 1e-16).unwrap(), Complex64::new(0.0, 0.0));

        let r2 = toeplitz_matrix(&preset("|z|^2"), s, 40, &q).unwrap();
        assert!((berezin(&r2, Complex64::new(0.0, 0.0), 1e-16).unwrap() - 1.0).norm() < 1e-13);
        // Berezin transform of |z|² on the Fock space is |z|² + 1
        let z = Complex64::new(0.8, 0.6);
        assert!((berezin(&r2, z, 1e-16).unwrap() - 2.0).norm() < 1e-12);
        // T_z has Berezin transform z
        let tz = toeplitz_matrix(&preset("z"), s, 40, &q).unwrap();
        assert!((berezin(&tz, z, 1e-16).unwrap() - z).norm() < 1e-12);

        let small = TruncatedOperator::identity(5, s);
        match berezin(&small, Complex64::new(2.0, 0.0), 1e-16) {
            Err(Error::Domain(msg)) => assert!(msg.contains("use N >=")),
            other => panic!("{other:?}"),
        }
        let need = berezin_min_size(Complex64::new(2.0, 0.0), s, 1e-16).unwrap();
        assert!(berezin(&TruncatedOperator::identity(need, s), Complex64::new(2.0, 0.0), 1e-16).is_ok());
        assert!(berezin(&TruncatedOperator::identity(need - 1, s), Complex64::new(2.0, 0.0), 1e-16).is_err());
    }

    #[test]
    fn adjoint_symbol_gives_adjoint_matrix() {
        let q = QuadratureSpec::default();
        let s = order(0.5);
        for name in ["z/(1+|z|)", "zbar*exp(-|z|^2)", "im_z"] {
            let u = preset(name);
            let t = toeplitz_matrix(&u, s, 12, &q).unwrap();
            let tc = toeplitz_matrix(&u.conjugate(), s, 12, &q).unwrap();
            assert_eq!(tc.entries(), t.adjoint().entries(), "{name}");
        }
    }

    #[test]
    fn csv_and_envelope() {
        let id = TruncatedOperator::identity(2, order(1.5)).with_label("I2");
        assert_eq!(id.to_csv(), "row,col,re,im\n0,0,1.0,0\n0,1,0,0\n1,0,0,0\n1,1,1.0,0\n");
        let json = serde_json::to_string(&id.envelope()).unwrap();
        assert_eq!(json, r#"{"s":1.5,"N":2,"exact_band":0,"label":"I2"}"#);
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(1e-300), "1e-300");
    }

    #[test]
    fn from_matrix_checks_band() {
        let mut m = DMatrix::from_element(3, 3, Complex64::new(0.0, 0.0));
        m[(2, 0)] = Complex64::new(1.0, 0.0);
        assert!(TruncatedOperator::from_matrix(m.clone(), order(0.0), 1, "x").is_err());
        assert!(TruncatedOperator::from_matrix(m, order(0.0), 2, "x").is_ok());
    }
}
