//! Gamma functions and Gaussian-weighted half-line quadrature.

mod gamma;
mod quadrature;

pub use gamma::{gamma_ratio, log_gamma};
pub(crate) use gamma::ln_gamma_pos;
pub use quadrature::{
    gaussian_weighted_integral, gaussian_weighted_integral_with, integrate_interval,
    GaussianWeight, Growth, Integral, QuadratureSpec,
};
