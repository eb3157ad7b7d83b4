//! Recovering angular modes from samples on a polar grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::interp::RadialInterpolant;
use super::profile::RadialProfile;
use super::SymbolSpec;
use crate::error::{Error, Result};
use crate::fock::SobolevOrder;
use crate::special::{gaussian_weighted_integral_with, GaussianWeight, Growth, Integral, QuadratureSpec};

/// Samples u(r_i e^{iθ_m}) with θ_m = θ_0 + 2πm/M on every ring.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSamples {
    radii: Vec<f64>,
    angle_count: usize,
    theta0: f64,
    /// Row-major: ring i, angle m.
    values: Vec<Complex64>,
}

impl PolarSamples {
    pub fn from_fn<F>(radii: Vec<f64>, angle_count: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        check_radii(&radii)?;
        if angle_count == 0 {
            return Err(Error::precondition("angular grid needs at least one sample"));
        }
        let values = radii
            .iter()
            .flat_map(|&r| {
                (0..angle_count)
                    .map(move |m| Complex64::from_polar(r, 2.0 * PI * m as f64 / angle_count as f64))
            })
            .map(f)
            .collect();
        Ok(Self {
            radii,
            angle_count,
            theta0: 0.0,
            values,
        })
    }

    /// Builds a grid from unordered (r, θ, value) rows, as read from a
    /// polar-sample CSV. Every ring must carry the same uniform angle set.
    pub fn from_rows(rows: &[(f64, f64, Complex64)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::precondition("polar sample set is empty"));
        }
        let mut rows = rows.to_vec();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

        let mut rings: Vec<(f64, Vec<(f64, Complex64)>)> = Vec::new();
        for (r, theta, v) in rows {
            match rings.last_mut() {
                Some((r0, ring)) if (r - *r0).abs() <= 1e-12 * r0.abs().max(1.0) => ring.push((theta, v)),
                _ => rings.push((r, vec![(theta, v)])),
            }
        }

        let angle_count = rings[0].1.len();
        let theta0 = rings[0].1[0].0;
        let step = 2.0 * PI / angle_count as f64;
        for (r, ring) in &rings {
            if ring.len() != angle_count {
                return Err(Error::precondition(format!(
                    "ring r = {r} has {} angles but the first ring has {angle_count}",
                    ring.len()
                )));
            }
            for (m, (theta, _)) in ring.iter().enumerate() {
                let expected = theta0 + step * m as f64;
                if (theta - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
                    return Err(Error::precondition(format!(
                        "ring r = {r}: angle {theta} is not on the uniform grid θ0 + 2πm/{angle_count}"
                    )));
                }
            }
        }

        let radii: Vec<f64> = rings.iter().map(|(r, _)| *r).collect();
        check_radii(&radii)?;
        let values = rings.into_iter().flat_map(|(_, ring)| ring.into_iter().map(|(_, v)| v)).collect();
        Ok(Self {
            radii,
            angle_count,
            theta0,
            values,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angle_count(&self) -> usize {
        self.angle_count
    }

    pub fn theta(&self, m: usize) -> f64 {
        self.theta0 + 2.0 * PI * m as f64 / self.angle_count as f64
    }

    pub fn value(&self, ring: usize, m: usize) -> Complex64 {
        self.values[ring * self.angle_count + m]
    }

    /// (r, θ, value) rows in ring-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.radii.iter().enumerate().flat_map(move |(i, &r)| {
            (0..self.angle_count).map(move |m| (r, self.theta(m), self.value(i, m)))
        })
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::precondition("polar grid needs at least one radius"));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::precondition(
            "polar grid radii must be positive, finite and strictly increasing",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    /// Modes whose samples stay below `drop_floor · max(1, max|u|)` on
    /// every ring are discarded.
    pub drop_floor: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { drop_floor: 1e-12 }
    }
}

/// Splits sampled u into modes j ∈ [-j_max, j_max] with interpolated
/// radial profiles v_j(r) = (1/2π) ∫ u(re^{iθ}) e^{-ijθ} dθ.
pub fn decompose(samples: &PolarSamples, j_max: usize, opts: DecomposeOptions) -> Result<SymbolSpec> {
    let m = samples.angle_count;
    let required = 2 * j_max + 2;
    if m < required {
        return Err(Error::precondition(format!(
            "angular grid too coarse: {m} samples per ring, j_max = {j_max} needs at least {required}"
        )));
    }

    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let rings = samples.radii.len();
    let width = 2 * j_max + 1;
    // coeffs[(j + j_max)][ring]
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); rings]; width];
    let mut buffer = vec![Complex64::new(0.0, 0.0); m];
    for ring in 0..rings {
        buffer.copy_from_slice(&samples.values[ring * m..(ring + 1) * m]);
        fft.process(&mut buffer);
        for (slot, jj) in coeffs.iter_mut().zip(-(j_max as i64)..=j_max as i64) {
            let bin = jj.rem_euclid(m as i64) as usize;
            let phase = Complex64::from_polar(1.0, -(jj as f64) * samples.theta0);
            slot[ring] = buffer[bin] / m as f64 * phase;
        }
    }

    let scale = samples.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let floor = opts.drop_floor * scale;
    let mut spec = SymbolSpec::new("decomposed");
    for (values, j) in coeffs.into_iter().zip(-(j_max as i32)..=j_max as i32) {
        if values.iter().all(|v| v.norm() <= floor) {
            continue;
        }
        let interp = RadialInterpolant::new(samples.radii.clone(), values)?;
        spec = spec.with_mode(j, RadialProfile::interpolated(interp));
    }
    Ok(spec)
}

/// ‖a - b‖_{L²(G_s dA)} for two functions given in polar form, using a
/// 128-point angular trapezoid and the Gaussian-weighted radial quadrature.
pub fn l2_distance<A, B>(a: A, b: B, growth: Growth, s: SobolevOrder, quad: &QuadratureSpec) -> Result<Integral>
where
    A: Fn(f64, f64) -> Complex64,
    B: Fn(f64, f64) -> Complex64,
{
    const ANGLES: usize = 128;
    let radial = |r: f64| {
        let sum: f64 = (0..ANGLES)
            .map(|m| {
                let theta = 2.0 * PI * m as f64 / ANGLES as f64;
                (a(r, theta) - b(r, theta)).norm_sqr()
            })
            .sum();
        // (1/π) · (2π/M) Σ_m
        Complex64::new(2.0 * sum / ANGLES as f64, 0.0)
    };
    let weight = GaussianWeight::new(2.0 * s.value() + 2.0)
        .with_growth(Growth::new(2.0 * growth.exponent, (growth.constant * growth.constant).max(1.0)));
    let sq = gaussian_weighted_integral_with(radial, &weight, quad)?;
    let value = sq.value.re.max(0.0).sqrt();
    Ok(Integral {
        value: Complex64::new(value, 0.0),
        // |√(x+δ) − √x| ≤ min(δ / 2√x, √δ); the first blows up near zero
        abs_error: if value > 0.0 {
            (sq.abs_error / (2.0 * value)).min(sq.abs_error.sqrt())
        } else {
            sq.abs_error.sqrt()
        },
        ..sq
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::chebyshev_radii;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uniform_radii(n: usize, r_max: f64) -> Vec<f64> {
        (1..=n).map(|i| r_max * i as f64 / n as f64).collect()
    }

    #[test]
    fn real_part_splits_into_two_modes() {
        let samples = PolarSamples::from_fn(uniform_radii(40, 8.0), 8, |z| c(z.re, 0.0)).unwrap();
        let spec = decompose(&samples, 2, DecomposeOptions::default()).unwrap();
        assert_eq!(spec.mode_indices(), vec![-1, 1]);
        for &j in &[-1, 1] {
            for i in 1..50 {
                let r = i as f64 * 0.15;
                assert!((spec.mode(j).unwrap().eval(r) - c(r / 2.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn radial_input_gives_single_mode() {
        let samples = PolarSamples::from_fn(chebyshev_radii(48, 10.0), 16, |z| c((-z.norm()).exp(), 0.0)).unwrap();
        let spec = decompose(&samples, 3, DecomposeOptions::default()).unwrap();
        assert!(spec.is_radial());
        let v0 = spec.mode(0).unwrap();
        for i in 1..60 {
            let r = i as f64 * 0.15;
            assert!((v0.eval(r).re - (-r).exp()).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn z_squared_is_mode_two() {
        let samples = PolarSamples::from_fn(uniform_radii(30, 6.0), 12, |z| z * z).unwrap();
        let spec = decompose(&samples, 4, DecomposeOptions::default()).unwrap();
        assert_eq!(spec.mode_indices(), vec![2]);
        assert!((spec.mode(2).unwrap().eval(1.7) - c(1.7 * 1.7, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn coarse_grid_is_rejected_with_required_count() {
        let samples = PolarSamples::from_fn(uniform_radii(5, 1.0), 3, |z| z).unwrap();
        let err = decompose(&samples, 2, DecomposeOptions::default()).unwrap_err();
        assert!(matches!(&err, Error::Precondition(m) if m.contains("at least 6")), "{err}");
    }

    #[test]
    fn rows_round_trip_with_offset_angles() {
        let radii = uniform_radii(6, 3.0);
        let theta0 = 0.3;
        let mut rows = Vec::new();
        for &r in radii.iter().rev() {
            for m in (0..10).rev() {
                let th = theta0 + 2.0 * PI * m as f64 / 10.0;
                let z = Complex64::from_polar(r, th);
                rows.push((r, th, z * z.conj() + z));
            }
        }
        let samples = PolarSamples::from_rows(&rows).unwrap();
        assert_eq!(samples.angle_count(), 10);
        assert_eq!(samples.radii(), radii.as_slice());
        let spec = decompose(&samples, 3, DecomposeOptions::default()).unwrap();
        assert_eq!(spec.mode_indices(), vec![0, 1]);
        assert!((spec.mode(1).unwrap().eval(2.0) - c(2.0, 0.0)).norm() < 1e-10);
        assert!((spec.mode(0).unwrap().eval(2.0) - c(4.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![(1.0, 0.0, c(1.0, 0.0)), (1.0, PI, c(1.0, 0.0)), (2.0, 0.0, c(1.0, 0.0))];
        assert!(PolarSamples::from_rows(&rows).is_err());
        let rows = vec![(1.0, 0.0, c(1.0, 0.0)), (1.0, 1.0, c(1.0, 0.0))];
        assert!(PolarSamples::from_rows(&rows).is_err());
    }

    #[test]
    fn l2_distance_of_known_functions() {
        // ‖z‖² = ∫|z|² G_s dA = Γ(s+2)
        let quad = QuadratureSpec::default();
        for &s in &[0.0, 1.0, 2.5] {
            let order = SobolevOrder::new(s).unwrap();
            let got = l2_distance(
                Complex64::from_polar,
                |_, _| c(0.0, 0.0),
                Growth::new(1.0, 1.0),
                order,
                &quad,
            )
            .unwrap();
            let want = crate::fock::basis_norm_sq(1, order).sqrt();
            assert!((got.value.re - want).abs() < 1e-12, "s={s}");
        }
    }
}
