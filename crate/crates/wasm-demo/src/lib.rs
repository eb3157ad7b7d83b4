//! wasm-bindgen bindings for the static page in `www/`.
//!
//! Each export builds its operators from a preset name and returns a flat
//! `Float64Array`; errors come back as JS exceptions carrying the message.
//! The plain-Rust functions underneath are what the host tests exercise.

use fock_toeplitz::fock::SobolevOrder;
use fock_toeplitz::operators::{berezin, berezin_min_size, commutator, radial_eigenvalues, toeplitz_matrix};
use fock_toeplitz::special::QuadratureSpec;
use fock_toeplitz::symbols::{SymbolDef, SymbolSpec, PRESETS};
use fock_toeplitz::Complex64;
use wasm_bindgen::prelude::*;

const TAIL_TOL: f64 = 1e-14;
const MAX_SIZE: usize = 96;

fn order(s: f64) -> Result<SobolevOrder, String> {
    SobolevOrder::new(s).map_err(|e| e.to_string())
}

fn symbol(preset: &str) -> Result<SymbolSpec, String> {
    SymbolDef::preset(preset).build().map_err(|e| e.to_string())
}

fn check_size(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_SIZE {
        return Err(format!("N must be in 1..={MAX_SIZE}"));
    }
    Ok(())
}

/// Real parts of λ(0..n) for a radial preset.
pub fn eigenvalue_curve(preset: &str, s: f64, n: usize) -> Result<Vec<f64>, String> {
    check_size(n)?;
    let u = symbol(preset)?;
    if !u.is_radial() {
        return Err(format!("{preset} is not radial"));
    }
    let v0 = u.mode(0).ok_or("symbol is zero")?;
    let lambda = radial_eigenvalues(v0, order(s)?, n, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    Ok(lambda.into_iter().map(|l| l.re).collect())
}

/// Row-major `res × res` grid of B[T_u](z) over the square |Re z|, |Im z| ≤
/// extent, as interleaved (re, im) pairs.
pub fn berezin_grid(preset: &str, s: f64, extent: f64, res: usize) -> Result<Vec<f64>, String> {
    if !(extent.is_finite() && extent > 0.0 && extent <= 4.0) {
        return Err("extent must be in (0, 4]".into());
    }
    if !(2..=128).contains(&res) {
        return Err("resolution must be in 2..=128".into());
    }
    let s = order(s)?;
    let corner = Complex64::new(extent, extent);
    let n = berezin_min_size(corner, s, TAIL_TOL).map_err(|e| e.to_string())?;
    let t = toeplitz_matrix(&symbol(preset)?, s, n, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    let step = 2.0 * extent / (res - 1) as f64;
    let mut out = Vec::with_capacity(2 * res * res);
    for row in 0..res {
        for col in 0..res {
            let z = Complex64::new(-extent + col as f64 * step, extent - row as f64 * step);
            let b = berezin(&t, z, TAIL_TOL).map_err(|e| e.to_string())?;
            out.extend([b.re, b.im]);
        }
    }
    Ok(out)
}

/// |[T_u, T_v]| entries (row-major, n × n) followed by the exactness window
/// (or -1 when there is none).
pub fn commutator_grid(u: &str, v: &str, s: f64, n: usize) -> Result<Vec<f64>, String> {
    check_size(n)?;
    let (s, q) = (order(s)?, QuadratureSpec::default());
    let a = toeplitz_matrix(&symbol(u)?, s, n, &q).map_err(|e| e.to_string())?;
    let b = toeplitz_matrix(&symbol(v)?, s, n, &q).map_err(|e| e.to_string())?;
    let c = commutator(&a, &b).map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = (0..n)
        .flat_map(|row| (0..n).map(move |col| (row, col)))
        .map(|(row, col)| c.op.entry(row, col).norm())
        .collect();
    out.push(c.window.map_or(-1.0, |w| w as f64));
    Ok(out)
}

#[wasm_bindgen]
pub fn presets() -> Vec<String> {
    PRESETS.iter().map(|p| p.to_string()).collect()
}

#[wasm_bindgen]
pub fn eigenvalues(preset: &str, s: f64, n: usize) -> Result<Vec<f64>, JsError> {
    eigenvalue_curve(preset, s, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = berezinField)]
pub fn berezin_field(preset: &str, s: f64, extent: f64, res: usize) -> Result<Vec<f64>, JsError> {
    berezin_grid(preset, s, extent, res).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = commutatorField)]
pub fn commutator_field(u: &str, v: &str, s: f64, n: usize) -> Result<Vec<f64>, JsError> {
    commutator_grid(u, v, s, n).map_err(|e| JsError::new(&e))
}
