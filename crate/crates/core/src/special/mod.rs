//! Complex special functions and the double-exponential quadrature used by every
//! other module.

mod bessel;
mod gamma;
mod quad;
mod zeta;

pub use bessel::{bessel_k, whittaker_w};
pub use gamma::{complex_gamma, gamma_ratio, BERNOULLI_2K};
pub use quad::{integrate_de, QuadOptions, QuadratureResult};
pub use zeta::{completed_zeta, zeta};

use num_complex::Complex64;

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> crate::Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(crate::Error::Domain(format!(
                "point {x} + {y}i is not in the upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> crate::Result<Self> {
        Self::new(z.re, z.im)
    }
}
