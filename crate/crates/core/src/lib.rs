//! Numerical laboratory for Eisenstein series twisted by modular symbols on the
//! Fricke extension `Γ* = ⟨Γ₀(N), W_N⟩` and for the double Dirichlet series
//! obtained as the Mellin transform of the completed twisted series.
//!
//! The modules build on one another bottom-up:
//!
//! * [`special`] complex Gamma, zeta, K-Bessel, Whittaker and double-exponential quadrature;
//! * [`group`] exact arithmetic in `Γ*`, cusps and coset enumeration;
//! * [`newform`] the weight-2 newform, its periods and modular symbols `ψ(γ) = ⟨f, γ⟩`;
//! * [`eisenstein`] classical and twisted Eisenstein series, Fourier coefficients,
//!   twisted Kloosterman sums and scattering data;
//! * [`dds`] the double Dirichlet series `Λ̃(s, w)`, its continuation in `s`,
//!   poles and the functional equation in `s`.

pub mod dds;
pub mod eisenstein;
pub mod error;
pub mod group;
pub mod newform;
pub mod par;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use par::Exec;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
