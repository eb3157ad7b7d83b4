//! Toeplitz operators on the Fock-Sobolev spaces F^{2,s}.
//!
//! The crate realizes `T_u f = P(u f)` for symbols of polynomial growth as
//! banded matrices in the normalized monomial basis
//! `e_n(z) = z^n / √Γ(s+n+1)`, evaluates the weighted Mellin transforms that
//! populate those matrices, and checks the Mellin functional equations that
//! decide whether a Toeplitz operator can commute with a radial one.
//!
//! Layers, bottom up:
//!
//! * [`special`]: log-Gamma, Gamma ratios, Gaussian-weighted quadrature.
//! * [`fock`]: densities, monomial norms, reproducing kernels.
//! * [`symbols`]: radial profiles, Fourier-radial symbols, decomposition
//!   of sampled symbols, growth classification.
//! * [`mellin`]: weighted Mellin transforms and monomial closed forms.
//! * [`operators`]: Toeplitz truncations, commutators, Berezin transforms.
//! * [`criterion`]: the Φ/Ψ functional equations, cross-checks, probes and
//!   the radiality verdict.
//! * [`selftest`]: the executable acceptance suite.

pub mod criterion;
pub mod error;
pub mod fock;
pub mod mellin;
pub mod operators;
pub mod selftest;
pub mod special;
pub mod symbols;

mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
