//! Double-exponential quadrature: tanh-sinh on finite intervals and exp-sinh on
//! `[a, ∞)`, refined by step halving under a hard evaluation budget.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub target_abs_err: f64,
    pub max_evaluations: usize,
    /// Levels below this are always computed before the error test applies.
    pub min_level: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            target_abs_err: 1e-12,
            max_evaluations: 1 << 20,
            min_level: 3,
        }
    }
}

impl QuadOptions {
    pub fn with_target(target_abs_err: f64) -> Self {
        Self {
            target_abs_err,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy)]
enum Rule {
    Finite { a: f64, b: f64, half: f64 },
    HalfInfinite { a: f64 },
}

impl Rule {
    /// Abscissa and weight for parameter `t`; `None` once the weight underflows.
    fn node(self, t: f64) -> Option<(f64, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        match self {
            Rule::Finite { a, b, half } => {
                if u.abs() > 350.0 {
                    return None;
                }
                let e = (-2.0 * u.abs()).exp();
                // distance from the nearer endpoint: half·(1 − tanh|u|)
                let dist = half * 2.0 * e / (1.0 + e);
                let x = if u >= 0.0 { b - dist } else { a + dist };
                let sech = 2.0 * (-u.abs()).exp() / (1.0 + e);
                let w = half * FRAC_PI_2 * t.cosh() * sech * sech;
                if w == 0.0 || (u > 0.0 && x >= b) || (u < 0.0 && x <= a) {
                    return None;
                }
                Some((x, w))
            }
            Rule::HalfInfinite { a } => {
                if !(-700.0..=700.0).contains(&u) {
                    return None;
                }
                let e = u.exp();
                let x = a + e;
                if x == a {
                    return None;
                }
                Some((x, FRAC_PI_2 * t.cosh() * e))
            }
        }
    }
}

struct Driver<'f, F> {
    f: &'f mut F,
    rule: Rule,
    evaluations: usize,
    budget: usize,
}

impl<'f, F: FnMut(f64) -> Complex64> Driver<'f, F> {
    /// Sum of `w·f` over `t = (k + offset)·h` walking outward from zero on
    /// one side until the terms become negligible.
    fn side(&mut self, h: f64, offset: f64, sign: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut largest = 0.0f64;
        let mut quiet = 0;
        let mut k = 0usize;
        loop {
            let t = sign * (k as f64 + offset) * h;
            if t.abs() > 7.0 {
                break;
            }
            let Some((x, w)) = self.rule.node(t) else {
                break;
            };
            if self.evaluations >= self.budget {
                return Err(Error::MaxEvaluations {
                    best: acc,
                    abs_error: f64::INFINITY,
                    evaluations: self.evaluations,
                });
            }
            let fx = (self.f)(x);
            self.evaluations += 1;
            if !(fx.re.is_finite() && fx.im.is_finite()) {
                return Err(Error::NonFinite(format!("integrand at x = {x:e}")));
            }
            let term = fx * w;
            acc += term;
            let mag = term.norm();
            largest = largest.max(mag);
            if mag <= 1e-20 * largest || (largest == 0.0 && t.abs() > 4.0) {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
        }
        Ok(acc)
    }

    fn level_sum(&mut self, h: f64, odd_only: bool) -> Result<Complex64> {
        if odd_only {
            Ok(self.side(h, 0.5, 1.0)? + self.side(h, 0.5, -1.0)?)
        } else {
            // t = 0 is shared by both sides
            let pos = self.side(h, 0.0, 1.0)?;
            let neg = self.side(h, 1.0, -1.0)?;
            Ok(pos + neg)
        }
    }
}

/// Integrate `f` over `(a, b)`; `b = +∞` selects the exp-sinh rule.
///
/// The error estimate is the difference of the last two levels, floored at the
/// rounding level of the result.
pub fn integrate_de<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a.is_finite()) || b.is_nan() || b <= a {
        return Err(Error::Domain(format!("invalid interval ({a}, {b})")));
    }
    let rule = if b.is_infinite() {
        Rule::HalfInfinite { a }
    } else {
        Rule::Finite {
            a,
            b,
            half: 0.5 * (b - a),
        }
    };
    let mut driver = Driver {
        f: &mut f,
        rule,
        evaluations: 0,
        budget: opts.max_evaluations,
    };
    let mut h = 0.5;
    let mut raw = driver.level_sum(h, false)?;
    let mut estimate = raw * h;
    let mut level = 0;
    loop {
        let step = driver.level_sum(h, true);
        let odd = match step {
            Ok(v) => v,
            Err(Error::MaxEvaluations { evaluations, .. }) => {
                return Err(Error::MaxEvaluations {
                    best: estimate,
                    abs_error: f64::INFINITY,
                    evaluations,
                })
            }
            Err(e) => return Err(e),
        };
        raw += odd;
        h *= 0.5;
        level += 1;
        let refined = raw * h;
        let err = (refined - estimate).norm();
        estimate = refined;
        let floor = 64.0 * f64::EPSILON * estimate.norm();
        if level >= opts.min_level && (err <= opts.target_abs_err || err <= floor) {
            return Ok(QuadratureResult {
                value: estimate,
                abs_error_estimate: err,
                evaluations: driver.evaluations,
            });
        }
        if level >= 20 {
            return Err(Error::MaxEvaluations {
                best: estimate,
                abs_error: err,
                evaluations: driver.evaluations,
            });
        }
    }
}
