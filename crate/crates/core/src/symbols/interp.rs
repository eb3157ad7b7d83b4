//! Interpolation of radial profiles sampled at finitely many radii.
//!
//! Radii that form a Chebyshev grid on `(0, R)` get global barycentric
//! interpolation (spectrally accurate, exact for polynomials of degree below
//! the node count); any other grid gets a not-a-knot cubic spline, which is
//! exact for cubics. Beyond the outermost node the profile is held constant.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Chebyshev points of the first kind mapped to `(0, r_max)`, ascending.
pub fn chebyshev_radii(n: usize, r_max: f64) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * r_max * (1.0 - ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Scheme {
    /// Barycentric weights over all nodes; `hold_from` is where the
    /// constant continuation starts.
    Barycentric { weights: Vec<f64>, hold_from: f64 },
    /// Second derivatives at the nodes.
    Spline { moments: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialInterpolant {
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    scheme: Scheme,
}

impl RadialInterpolant {
    pub fn new(nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::precondition(
                "interpolation needs equally many (>= 1) radii and values",
            ));
        }
        if nodes.iter().any(|r| !(r.is_finite() && *r >= 0.0))
            || nodes.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::precondition(
                "interpolation radii must be finite, non-negative and strictly increasing",
            ));
        }
        let n = nodes.len();
        let scheme = if let Some(r_max) = detect_chebyshev(&nodes) {
            let weights = (0..n)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * ((2 * k + 1) as f64 * PI / (2 * n) as f64).sin()
                })
                .collect();
            Scheme::Barycentric {
                weights,
                hold_from: r_max,
            }
        } else if n <= 4 {
            Scheme::Barycentric {
                weights: lagrange_weights(&nodes),
                hold_from: nodes[n - 1],
            }
        } else {
            Scheme::Spline {
                moments: not_a_knot_moments(&nodes, &values)?,
            }
        };
        Ok(Self {
            nodes,
            values,
            scheme,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_chebyshev(&self) -> bool {
        matches!(&self.scheme, Scheme::Barycentric { hold_from, .. } if *hold_from > *self.nodes.last().unwrap())
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values: Vec<Complex64> = self.values.iter().map(|&v| f(v)).collect();
        let scheme = match &self.scheme {
            Scheme::Spline { moments } => Scheme::Spline {
                moments: moments.iter().map(|&m| f(m) - f(Complex64::new(0.0, 0.0))).collect(),
            },
            other => other.clone(),
        };
        Self {
            nodes: self.nodes.clone(),
            values,
            scheme,
        }
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        match &self.scheme {
            Scheme::Barycentric { weights, hold_from } => {
                let x = r.min(*hold_from);
                barycentric(&self.nodes, &self.values, weights, x)
            }
            Scheme::Spline { moments } => {
                let last = self.nodes.len() - 1;
                if r >= self.nodes[last] {
                    return self.values[last];
                }
                let i = self.nodes.partition_point(|&x| x <= r).saturating_sub(1).min(last - 1);
                let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
                let h = x1 - x0;
                let (a, b) = (x1 - r, r - x0);
                let (y0, y1) = (self.values[i], self.values[i + 1]);
                let (m0, m1) = (moments[i], moments[i + 1]);
                m0 * (a * a * a / (6.0 * h))
                    + m1 * (b * b * b / (6.0 * h))
                    + (y0 / h - m0 * (h / 6.0)) * a
                    + (y1 / h - m1 * (h / 6.0)) * b
            }
        }
    }
}

fn barycentric(nodes: &[f64], values: &[Complex64], weights: &[f64], x: f64) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for ((&xk, &yk), &wk) in nodes.iter().zip(values).zip(weights) {
        let d = x - xk;
        if d == 0.0 {
            return yk;
        }
        let t = wk / d;
        num += yk * t;
        den += t;
    }
    num / den
}

fn lagrange_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &xj)| xk - xj)
                .product();
            1.0 / prod
        })
        .collect()
}

/// Returns the interval end `R` if `nodes` are the first-kind Chebyshev
/// points of `(0, R)`.
fn detect_chebyshev(nodes: &[f64]) -> Option<f64> {
    let n = nodes.len();
    if n < 5 {
        return None;
    }
    let last = nodes[n - 1];
    let r_max = 2.0 * last / (1.0 + (PI / (2 * n) as f64).cos());
    chebyshev_radii(n, r_max)
        .iter()
        .zip(nodes)
        .all(|(a, b)| (a - b).abs() <= 1e-9 * r_max)
        .then_some(r_max)
}

fn not_a_knot_moments(x: &[f64], y: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DMatrix::<f64>::zeros(n, 2);

    a[(0, 0)] = h[1];
    a[(0, 1)] = -(h[0] + h[1]);
    a[(0, 2)] = h[0];
    for i in 1..n - 1 {
        a[(i, i - 1)] = h[i - 1];
        a[(i, i)] = 2.0 * (h[i - 1] + h[i]);
        a[(i, i + 1)] = h[i];
        let d = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        rhs[(i, 0)] = 6.0 * d.re;
        rhs[(i, 1)] = 6.0 * d.im;
    }
    a[(n - 1, n - 3)] = h[n - 2];
    a[(n - 1, n - 2)] = -(h[n - 3] + h[n - 2]);
    a[(n - 1, n - 1)] = h[n - 3];

    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::precondition("spline system is singular; check the radii"))?;
    let re = DVector::from(sol.column(0));
    let im = DVector::from(sol.column(1));
    Ok(re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn spline_reproduces_cubics_and_nodes() {
        let nodes: Vec<f64> = (1..=12).map(|i| 0.37 * i as f64 + 0.01 * (i * i) as f64).collect();
        let f = |r: f64| Complex64::new(1.0 - 2.0 * r + 0.5 * r * r * r, r * r);
        let interp = RadialInterpolant::new(nodes.clone(), nodes.iter().map(|&r| f(r)).collect()).unwrap();
        assert!(!interp.is_chebyshev());
        for i in 0..200 {
            let r = 0.2 + i as f64 * 0.024;
            assert!((interp.eval(r) - f(r)).norm() < 1e-10, "r={r}");
        }
        // held beyond the last node
        let last = *nodes.last().unwrap();
        assert_eq!(interp.eval(last + 3.0), f(last));
    }

    #[test]
    fn chebyshev_grid_is_detected_and_spectral() {
        let nodes = chebyshev_radii(40, 10.0);
        let f = |r: f64| real((-r).exp() * r.powi(4));
        let interp = RadialInterpolant::new(nodes.clone(), nodes.iter().map(|&r| f(r)).collect()).unwrap();
        assert!(interp.is_chebyshev());
        for i in 0..=500 {
            let r = i as f64 * 0.02;
            assert!((interp.eval(r) - f(r)).norm() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn small_grids_use_polynomial_interpolation() {
        let nodes = vec![1.0, 2.0, 4.0];
        let interp = RadialInterpolant::new(nodes, vec![real(1.0), real(4.0), real(16.0)]).unwrap();
        assert!((interp.eval(3.0).re - 9.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_radii() {
        assert!(RadialInterpolant::new(vec![1.0, 0.5], vec![real(0.0); 2]).is_err());
        assert!(RadialInterpolant::new(vec![], vec![]).is_err());
    }
}
