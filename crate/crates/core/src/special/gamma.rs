use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{finite, Error, Result};

/// Bernoulli numbers `B_2, B_4, …, B_24`.
pub const BERNOULLI_2K: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

const STIRLING_MIN_RE: f64 = 15.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0
}

/// Stirling series for `ln Γ(w)`, valid for `Re w ≥ 15`.
fn ln_gamma_stirling(w: Complex64) -> Complex64 {
    let mut acc = (w - 0.5) * w.ln() - w + HALF_LN_2PI;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, b) in BERNOULLI_2K.iter().take(10).enumerate() {
        let k = (k + 1) as f64;
        acc += pow * (*b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= inv2;
    }
    acc
}

fn gamma_right(s: Complex64) -> Complex64 {
    let shift = (STIRLING_MIN_RE - s.re).ceil().max(0.0) as usize;
    let mut denom = Complex64::new(1.0, 0.0);
    for j in 0..shift {
        denom *= s + j as f64;
    }
    ln_gamma_stirling(s + shift as f64).exp() / denom
}

/// Complex Gamma function.
///
/// Upward recurrence into the Stirling region, reflection for `Re s < 1/2`.
pub fn complex_gamma(s: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole {
            function: "gamma",
            at: s,
        });
    }
    let value = if s.re >= 0.5 {
        gamma_right(s)
    } else {
        let sin = (s * PI).sin();
        Complex64::new(PI, 0.0) / (sin * gamma_right(1.0 - s))
    };
    finite(value, "gamma")
}

/// `Γ(s - 1/2) / Γ(s)`, the archimedean factor of every constant term.
pub fn gamma_ratio(s: Complex64) -> Result<Complex64> {
    Ok(complex_gamma(s - 0.5)? / complex_gamma(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_forms() {
        let half = complex_gamma(c(0.5, 0.0)).unwrap();
        assert_relative_eq!(half.re, PI.sqrt(), max_relative = 1e-14);
        assert!(half.im.abs() < 1e-15);
        let five = complex_gamma(c(5.0, 0.0)).unwrap();
        assert_relative_eq!(five.re, 24.0, max_relative = 1e-14);
        let r = complex_gamma(c(2.0, 1.0)).unwrap() / complex_gamma(c(1.0, 1.0)).unwrap();
        assert!((r - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        for n in 0..5 {
            assert!(matches!(
                complex_gamma(c(-(n as f64), 0.0)),
                Err(Error::Pole { .. })
            ));
        }
        assert!(complex_gamma(c(-1.0, 1e-9)).is_ok());
    }

    #[test]
    fn recurrence_on_random_grid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut count = 0;
        while count < 100 {
            let s = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            if s.norm() < 0.1 || s.norm() > 50.0 {
                continue;
            }
            count += 1;
            let lhs = complex_gamma(s + 1.0).unwrap();
            let rhs = s * complex_gamma(s).unwrap();
            assert!((lhs - rhs).norm() / lhs.norm() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn reflection_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            let lhs = complex_gamma(s).unwrap() * complex_gamma(1.0 - s).unwrap();
            let rhs = Complex64::new(PI, 0.0) / (s * PI).sin();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn stirling_matches_factorials_far_out() {
        let g = complex_gamma(c(21.0, 0.0)).unwrap();
        assert_relative_eq!(g.re, 2_432_902_008_176_640_000.0, max_relative = 1e-13);
    }
}
