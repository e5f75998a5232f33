//! The one-dimensional lattice kernel `F_s(x, y) = Σ_k ((x+k)² + y²)^{−s}` and
//! its Fourier expansion.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::special::{bessel_k, complex_gamma, gamma_ratio, BERNOULLI_2K};

/// `((t)² + y²)^{−s}` through one real logarithm.
#[inline]
fn inv_pow(u: f64, s: Complex64) -> Complex64 {
    let l = u.ln();
    let m = (-s.re * l).exp();
    if s.im == 0.0 {
        Complex64::new(m, 0.0)
    } else {
        Complex64::from_polar(m, -s.im * l)
    }
}

/// Window half-width of the explicit sum; the rest is interpolated.
const WINDOW: i64 = 3;
/// Chebyshev nodes for the tail interpolant on `x ∈ [−½, ½]`.
const CHEB: usize = 18;

/// Direct summation of the lattice kernel for fixed `(s, y)`.
///
/// The terms with `|k| ≤ 3` are summed explicitly; the two one-sided tails are
/// smooth in `x` and are replaced by Chebyshev interpolants built once.
#[derive(Debug, Clone)]
pub struct LatticeKernel {
    s: Complex64,
    y: f64,
    /// Chebyshev coefficients of `x ↦ tail(K + 1 + x)` on `[−½, ½]`.
    cheb: Vec<Complex64>,
    f0: Complex64,
}

impl LatticeKernel {
    pub fn new(s: Complex64, y: f64) -> Result<Self> {
        let raw = RawTail::new(s, y);
        let t0 = (WINDOW + 1) as f64;
        let n = CHEB;
        let vals: Vec<Complex64> = (0..n)
            .map(|j| {
                let u = (PI * (j as f64 + 0.5) / n as f64).cos();
                raw.eval(t0 + 0.5 * u)
            })
            .collect();
        let cheb = (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, v) in vals.iter().enumerate() {
                    acc += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
                }
                acc * (2.0 / n as f64)
            })
            .collect();
        Ok(Self {
            s,
            y,
            cheb,
            f0: constant_term(s, y)?,
        })
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// The `k`-independent constant term `√π Γ(s−½)/Γ(s) · y^{1−2s}`.
    pub fn constant(&self) -> Complex64 {
        self.f0
    }

    #[inline]
    fn tail(&self, x: f64) -> Complex64 {
        // Clenshaw at u = 2x
        let u = 2.0 * x;
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in self.cheb.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * u) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.cheb[0] * 0.5 + b1 * u - b2
    }

    /// `F_s(x, y)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let x = x - x.round();
        let y2 = self.y * self.y;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -WINDOW..=WINDOW {
            let t = x + k as f64;
            acc += inv_pow(t * t + y2, self.s);
        }
        acc + self.tail(x) + self.tail(-x)
    }

    /// `F_s(x, y) − F0`, the non-constant part.
    pub fn eval_oscillatory(&self, x: f64) -> Complex64 {
        self.eval(x) - self.f0
    }
}

/// `Σ_{k≥0} ((T+k)² + y²)^{−s}`: a short explicit run, then an expansion in
/// `(y/t)²` with each Hurwitz sum done by Euler–Maclaurin.
struct RawTail {
    s: Complex64,
    y: f64,
    shift: i64,
    binom: Vec<Complex64>,
}

impl RawTail {
    fn new(s: Complex64, y: f64) -> Self {
        let shift = 30 + (4.0 * y).ceil() as i64;
        let t_min = (shift + WINDOW) as f64;
        let mut binom = Vec::new();
        let mut b = Complex64::new(1.0, 0.0);
        let mut j = 0i32;
        loop {
            binom.push(b);
            let next = b * (-s - j as f64) / (j as f64 + 1.0) * (y * y);
            j += 1;
            if next.norm() / t_min.powi(2 * j) < 1e-18 || j > 80 {
                break;
            }
            b = next;
        }
        Self { s, y, shift, binom }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let y2 = self.y * self.y;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.shift {
            let u = t + k as f64;
            acc += inv_pow(u * u + y2, self.s);
        }
        acc + self.far(t + self.shift as f64)
    }

    fn far(&self, t: f64) -> Complex64 {
        let s = self.s;
        let base = inv_pow(t * t, s);
        let inv_t2 = 1.0 / (t * t);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut tpow = 1.0;
        for (j, bj) in self.binom.iter().enumerate() {
            let a = 2.0 * s + 2.0 * j as f64;
            // T/(a−1) + 1/2 + Σ_i B_{2i}/(2i)! (a)_{2i−1} T^{1−2i}
            let mut h = t / (a - 1.0) + 0.5;
            let mut rising = a;
            let mut tp = 1.0 / t;
            let mut fact = 2.0;
            for (i, b) in BERNOULLI_2K.iter().take(8).enumerate() {
                h += rising * tp * (*b / fact);
                let i2 = 2.0 * (i as f64 + 1.0);
                rising *= (a + i2 - 1.0) * (a + i2);
                tp *= inv_t2;
                fact *= (i2 + 1.0) * (i2 + 2.0);
            }
            acc += bj * tpow * h;
            tpow *= inv_t2;
        }
        base * acc
    }
}

/// `∫ (t² + y²)^{−s} dt = √π Γ(s−½)/Γ(s) · y^{1−2s}`.
pub fn constant_term(s: Complex64, y: f64) -> Result<Complex64> {
    Ok(PI.sqrt() * gamma_ratio(s)? * Complex64::new(y, 0.0).powc(1.0 - 2.0 * s))
}

/// `B_n = (2π^s/Γ(s)) |n|^{s−½} y^{½−s} K_{s−½}(2π|n|y)`, the `n`-th Fourier
/// coefficient of `F_s(·, y)`.
pub fn spectral_coefficient(s: Complex64, n: i64, y: f64) -> Result<Complex64> {
    let an = n.unsigned_abs() as f64;
    let pre = 2.0 * Complex64::new(PI, 0.0).powc(s) / complex_gamma(s)?;
    let k = bessel_k(s - 0.5, 2.0 * PI * an * y)?;
    Ok(pre * Complex64::new(an, 0.0).powc(s - 0.5) * Complex64::new(y, 0.0).powc(0.5 - s) * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute(s: Complex64, x: f64, y: f64) -> Complex64 {
        // pairwise summation outward, tail by the leading integral
        let k = 200_000i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (-k..=k).rev() {
            let t = x + j as f64;
            acc += Complex64::new(t * t + y * y, 0.0).powc(-s);
        }
        let kf = k as f64 + 0.5;
        let tail = |t: f64| Complex64::new(t, 0.0).powc(1.0 - 2.0 * s) / (2.0 * s - 1.0);
        acc + tail(kf + x) + tail(kf - x)
    }

    #[test]
    fn matches_brute_force() {
        for (s, x, y) in [
            (c(2.0, 0.0), 0.0, 1.0),
            (c(2.5, 0.0), 0.31, 0.7),
            (c(3.2, 1.1), -0.2, 2.3),
            (c(1.6, -0.4), 0.45, 0.2),
        ] {
            let k = LatticeKernel::new(s, y).unwrap();
            let a = k.eval(x);
            let b = brute(s, x, y);
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{s} {x} {y}: {a} vs {b}");
        }
    }

    #[test]
    fn periodic_and_even() {
        let k = LatticeKernel::new(c(2.7, 0.3), 0.9).unwrap();
        assert!((k.eval(0.2) - k.eval(1.2)).norm() < 1e-14);
        assert!((k.eval(0.2) - k.eval(-0.2)).norm() < 1e-14);
    }

    #[test]
    fn spectral_expansion_agrees() {
        for (s, x, y) in [(c(2.5, 0.0), 0.13, 0.6), (c(3.0, 0.7), 0.4, 1.1), (c(2.6, 0.0), 0.0, 0.25)] {
            let k = LatticeKernel::new(s, y).unwrap();
            let mut acc = k.constant();
            for n in 1..=60i64 {
                let b = spectral_coefficient(s, n, y).unwrap();
                acc += b * 2.0 * (2.0 * PI * n as f64 * x).cos();
            }
            let direct = k.eval(x);
            assert!((acc - direct).norm() < 1e-11 * direct.norm(), "{s} {x} {y}");
        }
    }
}
