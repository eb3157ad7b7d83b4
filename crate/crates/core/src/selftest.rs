//! The acceptance suite as library code, shared by the `acceptance`
//! integration test and the CLI `selftest` command.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criterion::{commutator_cross_check, functional_equation_residuals, periodicity_probe, phi, required_size, CriterionOptions, Verdict};
use crate::error::Result;
use crate::fock::{kernel_eval, SobolevOrder};
use crate::mellin::{mellin_monomial_closed_form, mellin_weighted};
use crate::operators::{berezin, berezin_min_size, commutator, toeplitz_matrix, window_max_abs};
use crate::special::QuadratureSpec;
use crate::symbols::{chebyshev_radii, decompose, l2_distance, DecomposeOptions, PolarSamples, RadialProfile, SymbolDef, SymbolSpec};

pub const S_VALUES: [f64; 4] = [0.0, 0.5, 1.0, 2.3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

type Check = fn(&QuadratureSpec) -> Result<(f64, bool, String)>;

/// (id, title, threshold, check). A check returns the measured value, an
/// extra pass condition beyond `measured <= threshold`, and a detail line.
pub const CRITERIA: [(u32, &str, f64, Check); 10] = [
    (1, "Mellin quadrature vs Gamma closed form", 1e-10, mellin_oracle),
    (2, "kernel at s = 0 reduces to exp(z w̄)", 1e-12, kernel_reduction),
    (3, "T_{|z|²} diagonal with entries s+k+1", 1e-10, radial_diagonal),
    (4, "radial-radial commutation", 1e-10, radial_commutation),
    (5, "criterion <-> matrix commutator equivalence", 1e-8, cross_check),
    (6, "nonradial mode detected for u = r², v = z", 1e-9, nonradial_detection),
    (7, "constant-symbol degeneracy (ratio to 3x error)", 1.0, constant_degeneracy),
    (8, "Berezin adjoint-symmetry identity", 1e-8, adjoint_symmetry),
    (9, "decomposition round trip (L² residual)", 1e-8, decomposition_round_trip),
    (10, "Mellin entries vs brute-force area integrals", 1e-6, brute_force_entries),
];

pub fn run(id: u32, quad: &QuadratureSpec) -> Option<Outcome> {
    let &(id, title, threshold, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    Some(match check(quad) {
        Ok((measured, extra, detail)) => Outcome {
            id,
            title: title.into(),
            passed: extra && measured <= threshold,
            measured,
            threshold,
            detail,
        },
        Err(e) => Outcome {
            id,
            title: title.into(),
            passed: false,
            measured: f64::NAN,
            threshold,
            detail: e.to_string(),
        },
    })
}

pub fn run_all(quad: &QuadratureSpec) -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0, quad)).collect()
}

pub fn format_line(o: &Outcome) -> String {
    format!(
        "[{}] {:>2}  {:<46} measured {:<12.3e} threshold {:.0e}  {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.id,
        o.title,
        o.measured,
        o.threshold,
        o.detail
    )
}

fn order(s: f64) -> SobolevOrder {
    SobolevOrder::new(s).expect("suite orders are valid")
}

fn preset(name: &str) -> Result<SymbolSpec> {
    SymbolDef::preset(name).build()
}

fn mellin_oracle(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    let mut worst = (0.0, String::new());
    for p in 0..=3 {
        let v = RadialProfile::monomial(p as f64);
        for s in S_VALUES {
            for zeta in 1..=60 {
                let got = mellin_weighted(&v, order(s), zeta as f64, quad)?.value;
                let want = mellin_monomial_closed_form(p as f64, order(s), zeta as f64)?;
                let rel = (got - want).norm() / want.norm();
                if rel > worst.0 {
                    worst = (rel, format!("worst at p={p}, s={s}, ζ={zeta}"));
                }
            }
        }
    }
    Ok((worst.0, true, worst.1))
}

fn kernel_reduction(_: &QuadratureSpec) -> Result<(f64, bool, String)> {
    // 9 x 9 points on the square inscribed in |z| <= 2; every (z, w) pair
    let axis: Vec<f64> = (0..9).map(|i| SQRT_2 * (i as f64 / 4.0 - 1.0)).collect();
    let grid: Vec<Complex64> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| Complex64::new(x, y)))
        .collect();
    let mut worst: f64 = 0.0;
    for &z in &grid {
        for &w in &grid {
            let k = kernel_eval(z, w, SobolevOrder::FOCK, 1e-16)?;
            worst = worst.max((k.value - (z * w.conj()).exp()).norm());
        }
    }
    Ok((worst, true, format!("{} pairs from a 9x9 grid, |z|, |w| <= 2", grid.len() * grid.len())))
}

fn radial_diagonal(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    let spec = preset("|z|^2")?;
    let mut worst: f64 = 0.0;
    let mut off_diagonal_zero = true;
    for s in S_VALUES {
        let t = toeplitz_matrix(&spec, order(s), 32, quad)?;
        for n in 0..32 {
            for m in 0..32 {
                let v = t.entry(n, m);
                if n == m {
                    let want = s + n as f64 + 1.0;
                    worst = worst.max((v - want).norm() / want);
                } else {
                    off_diagonal_zero &= v == Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    Ok((worst, off_diagonal_zero, format!("N = 32, off-diagonal exactly zero: {off_diagonal_zero}")))
}

fn radial_commutation(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    let u = preset("|z|^2")?;
    let v = preset("exp(-|z|)")?;
    let mut worst: f64 = 0.0;
    for s in S_VALUES {
        let c = commutator(&toeplitz_matrix(&u, order(s), 32, quad)?, &toeplitz_matrix(&v, order(s), 32, quad)?)?;
        worst = worst.max(window_max_abs(&c.op, c.window.unwrap_or(0)));
    }
    Ok((worst, true, "u = r², v = e^{-r}, N = 32".into()))
}

fn cross_check(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    const K_MAX: usize = 20;
    let mut worst = (0.0, String::new());
    let mut cells = 0;
    for u_name in ["|z|^2", "|z|^4"] {
        let u = preset(u_name)?;
        for v_name in ["z", "z^2", "re_z"] {
            let v = preset(v_name)?;
            for s in S_VALUES {
                let map = commutator_cross_check(&u, &v, order(s), required_size(&v, K_MAX), quad)?;
                for (&(j, k), &d) in map.iter().filter(|(&(j, k), _)| j != 0 && k <= K_MAX) {
                    cells += 1;
                    if d > worst.0 {
                        worst = (d, format!("worst at u={u_name}, v={v_name}, s={s}, (j,k)=({j},{k})"));
                    }
                }
            }
        }
    }
    let detail = if worst.1.is_empty() { format!("{cells} cells") } else { format!("{cells} cells, {}", worst.1) };
    Ok((worst.0, cells > 0, detail))
}

fn nonradial_detection(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    let u = preset("|z|^2")?;
    let v = preset("z")?;
    let mut worst: f64 = 0.0;
    let mut verdicts_ok = true;
    for s in S_VALUES {
        let rep = functional_equation_residuals(&u, &v, order(s), &CriterionOptions::new(8), quad)?;
        verdicts_ok &= rep.verdict == Verdict::NonradialModeDetected { modes: vec![1] };
        let c = commutator(&toeplitz_matrix(&u, order(s), 8, quad)?, &toeplitz_matrix(&v, order(s), 8, quad)?)?;
        worst = worst.max((c.op.entry(1, 0) - (s + 1.0).sqrt()).norm());
    }
    Ok((worst, verdicts_ok, format!("verdict nonradial_mode_detected([1]) for every s: {verdicts_ok}")))
}

/// Largest |x| / (3·err) over Φ_j(k+s) and the periodicity probe for u ≡ 1.
fn constant_degeneracy(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    let one = RadialProfile::constant(1.0);
    let ratio = |value: f64, err: f64| if value == 0.0 { 0.0 } else { value / (3.0 * err) };
    let mut worst: f64 = 0.0;
    let mut max_phi: f64 = 0.0;
    for s in S_VALUES {
        for j in -4i32..=4 {
            for k in (-j).max(0) as usize..=20 {
                let c = phi(j, k, order(s), &one, quad)?;
                max_phi = max_phi.max(c.value.norm());
                worst = worst.max(ratio(c.value.norm(), c.error));
            }
        }
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        for j in 1..=4 {
            let p = periodicity_probe(&one, order(s), j, &grid, quad)?;
            worst = worst.max(ratio(p.max_abs_difference, p.error_bound));
        }
    }
    Ok((worst, true, format!("max |Φ| = {max_phi:.2e}")))
}

fn adjoint_symmetry(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    const TAIL: f64 = 1e-16;
    let names = ["z/(1+|z|)", "zbar*exp(-|z|^2)", "exp(-|z|)"];
    let points: Vec<Complex64> = std::iter::once(Complex64::new(0.0, 0.0))
        .chain((1..=4).flat_map(|i| (0..8).map(move |a| Complex64::from_polar(0.5 * i as f64, PI * a as f64 / 4.0 + 0.1))))
        .collect();
    let mut worst: f64 = 0.0;
    for s in S_VALUES {
        let s = order(s);
        let size = berezin_min_size(Complex64::new(2.0, 0.0), s, TAIL)?;
        for u_name in names {
            for v_name in names {
                let (u, v) = (preset(u_name)?, preset(v_name)?);
                let tu = toeplitz_matrix(&u, s, size, quad)?;
                let tv = toeplitz_matrix(&v, s, size, quad)?;
                let tub = toeplitz_matrix(&u.conjugate(), s, size, quad)?;
                let tvb = toeplitz_matrix(&v.conjugate(), s, size, quad)?;
                let left = tu.compose(&tv)?;
                let right = tvb.compose(&tub)?;
                for &z in &points {
                    let d = berezin(&left, z, TAIL)? - berezin(&right, z, TAIL)?.conj();
                    worst = worst.max(d.norm());
                }
            }
        }
    }
    Ok((worst, true, format!("{} points with |z| <= 2, 9 symbol pairs", points.len())))
}

fn trig_polynomial_symbols() -> Result<Vec<SymbolSpec>> {
    let c = Complex64::new;
    Ok(vec![
        SymbolDef::preset("re_z").build()?,
        SymbolSpec::new("mixed")
            .with_mode(-4, RadialProfile::scaled_monomial(c(0.5, 0.0), 4.0))
            .with_mode(-1, RadialProfile::scaled_monomial(c(0.0, 1.0), 1.0))
            .with_mode(0, RadialProfile::polynomial(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]))
            .with_mode(2, RadialProfile::scaled_monomial(c(0.3, -0.2), 2.0))
            .with_mode(4, RadialProfile::exp_decay(c(1.0, 0.0), 4.0, 1.0)?),
        SymbolSpec::new("decaying")
            .with_mode(3, RadialProfile::gaussian(c(2.0, 1.0), 3.0, 0.5)?)
            .with_mode(-3, RadialProfile::gaussian(c(2.0, -1.0), 3.0, 0.5)?)
            .with_mode(1, RadialProfile::exp_decay(c(-1.0, 0.0), 1.0, 2.0)?),
    ])
}

fn decomposition_round_trip(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    const J_MAX: usize = 4;
    let radii = chebyshev_radii(48, 9.0);
    let mut worst_l2: f64 = 0.0;
    let mut worst_sample: f64 = 0.0;
    let mut modes_ok = true;
    for u in trig_polynomial_symbols()? {
        let samples = PolarSamples::from_fn(radii.clone(), 2 * J_MAX + 2, |z| {
            let (r, t) = z.to_polar();
            u.evaluate_polar(r, t)
        })?;
        let rec = decompose(&samples, J_MAX, DecomposeOptions::default())?;
        modes_ok &= rec.mode_indices() == u.mode_indices();
        for (r, theta, v) in samples.rows() {
            worst_sample = worst_sample.max((rec.evaluate_polar(r, theta) - v).norm());
        }
        for s in S_VALUES {
            let d = l2_distance(
                |r, t| u.evaluate_polar(r, t),
                |r, t| rec.evaluate_polar(r, t),
                u.growth(),
                order(s),
                quad,
            )?;
            worst_l2 = worst_l2.max(d.value.re);
        }
    }
    let passed = modes_ok && worst_sample <= 1e-10;
    Ok((
        worst_l2,
        passed,
        format!("per-sample max {worst_sample:.2e} (<= 1e-10), mode sets recovered: {modes_ok}"),
    ))
}

/// ⟨u e_m, e_n⟩ by Simpson in r on [0, 12] and the trapezoid rule in θ,
/// normalized by monomial norms integrated the same way (no Gamma values).
fn brute_force_matrix(u: &SymbolSpec, s: f64, size: usize) -> Vec<Vec<Complex64>> {
    const R: f64 = 12.0;
    const NR: usize = 4000;
    const NT: usize = 64;
    let h = R / NR as f64;
    let max_d = size as i64 - 1;
    // angular Fourier sums (1/π)∫ u e^{idθ} dθ per radius, d = m - n
    let mut ang = vec![vec![Complex64::new(0.0, 0.0); (2 * max_d + 1) as usize]; NR + 1];
    for (i, row) in ang.iter_mut().enumerate() {
        let r = i as f64 * h;
        for t in 0..NT {
            let th = 2.0 * PI * t as f64 / NT as f64;
            let val = u.evaluate_polar(r, th);
            for (slot, d) in row.iter_mut().zip(-max_d..=max_d) {
                *slot += val * Complex64::from_polar(2.0 / NT as f64, d as f64 * th);
            }
        }
    }
    let simpson = |i: usize| if i == 0 || i == NR { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 } * h / 3.0;
    let radial = |i: usize, p: usize| {
        let r = i as f64 * h;
        r.powf(p as f64 + 2.0 * s + 1.0) * (-r * r).exp()
    };
    let norms: Vec<f64> = (0..size)
        .map(|n| (0..=NR).map(|i| 2.0 * radial(i, 2 * n) * simpson(i)).sum())
        .collect();
    (0..size)
        .map(|n| {
            (0..size)
                .map(|m| {
                    let d = (m as i64 - n as i64 + max_d) as usize;
                    let raw: Complex64 = (0..=NR).map(|i| ang[i][d] * radial(i, m + n) * simpson(i)).sum();
                    raw / (norms[m] * norms[n]).sqrt()
                })
                .collect()
        })
        .collect()
}

fn brute_force_entries(quad: &QuadratureSpec) -> Result<(f64, bool, String)> {
    const N: usize = 6;
    let mut worst = (0.0, String::new());
    let mut zeros_ok = true;
    for s in [0.0, 1.0] {
        for name in ["1", "|z|^2", "z", "re_z"] {
            let u = preset(name)?;
            let t = toeplitz_matrix(&u, order(s), N, quad)?;
            let brute = brute_force_matrix(&u, s, N);
            for n in 0..N {
                for m in 0..N {
                    let (got, b) = (t.entry(n, m), brute[n][m]);
                    if got == Complex64::new(0.0, 0.0) {
                        zeros_ok &= b.norm() <= 1e-12;
                        continue;
                    }
                    let rel = (got - b).norm() / b.norm();
                    if rel > worst.0 {
                        worst = (rel, format!("worst at {name}, s={s}, ({n},{m})"));
                    }
                }
            }
        }
    }
    Ok((worst.0, zeros_ok, format!("{}; structural zeros confirmed: {zeros_ok}", worst.1)))
}
