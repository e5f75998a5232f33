use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{complex_gamma, BERNOULLI_2K};
use crate::error::{finite, Error, Result};

/// Riemann zeta by Euler–Maclaurin summation, continued to `Re s < 1/2` through
/// the completed function.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "zeta",
            at: s,
        });
    }
    if s.re >= 0.5 {
        return finite(zeta_em(s), "zeta");
    }
    if s == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(-0.5, 0.0));
    }
    // ζ(s) = ξ(1−s) / (π^{−s/2} Γ(s/2))
    if s.im == 0.0 && s.re < 0.0 && (s.re / 2.0).fract() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let xi = completed_zeta(1.0 - s)?;
    let pre = Complex64::new(PI, 0.0).powc(-s / 2.0) * complex_gamma(s / 2.0)?;
    finite(xi / pre, "zeta")
}

fn zeta_em(s: Complex64) -> Complex64 {
    let m = 24 + s.im.abs().ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..m {
        acc += Complex64::new(n as f64, 0.0).powc(-s);
    }
    let mf = m as f64;
    let m_s = Complex64::new(mf, 0.0).powc(-s);
    acc += m_s * mf / (s - 1.0) + m_s * 0.5;
    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · m^{−s−2k+1}
    let mut rising = s;
    let mut pow = m_s / mf;
    let mut fact = 2.0;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let term = rising * pow * (*b / fact);
        acc += term;
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + (k2 - 1.0)) * (s + k2);
        pow /= mf * mf;
        fact *= (k2 + 1.0) * (k2 + 2.0);
    }
    acc
}

/// `ξ(s) = π^{−s/2} Γ(s/2) ζ(s)`, symmetric under `s ↦ 1 − s`.
pub fn completed_zeta(s: Complex64) -> Result<Complex64> {
    let s = if s.re < 0.5 { 1.0 - s } else { s };
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "completed_zeta",
            at: s,
        });
    }
    let v = Complex64::new(PI, 0.0).powc(-s / 2.0) * complex_gamma(s / 2.0)? * zeta_em(s);
    finite(v, "completed_zeta")
}
