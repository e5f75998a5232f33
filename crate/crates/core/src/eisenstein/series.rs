use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::kernel::{constant_term, LatticeKernel};
use crate::error::{Error, Result};
use crate::group::{c_values, class_reps, CValue, CosetRep, CuspData};
use crate::newform::SymbolSource;
use crate::par::{self, Exec};
use crate::special::{bessel_k, complex_gamma, UpperHalfPoint};

/// Inputs shared by every coset-sum evaluation.
#[derive(Debug, Clone)]
pub struct EisensteinParams {
    pub cusp: CuspData,
    pub s: Complex64,
    /// Absolute bound the certified tail must reach.
    pub tolerance: f64,
    /// Largest `c_max` the doubling may reach before giving up.
    pub c_max_ceiling: f64,
    pub exec: Exec,
}

impl EisensteinParams {
    pub fn new(cusp: CuspData, s: Complex64) -> Self {
        Self {
            cusp,
            s,
            tolerance: 1e-10,
            c_max_ceiling: 16384.0,
            exec: Exec::default(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_ceiling(mut self, c: f64) -> Self {
        self.c_max_ceiling = c;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_s(mut self, s: Complex64) -> Self {
        self.s = s;
        self
    }

    pub fn level(&self) -> u64 {
        self.cusp.level
    }
}

/// A truncated sum with its certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub c_max: f64,
    pub classes: usize,
}

/// `|weight(γ)| ≤ a + b·ln(2c)` over double cosets with lower-left entry `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub a: f64,
    pub b: f64,
}

impl Envelope {
    pub const UNIT: Envelope = Envelope { a: 1.0, b: 0.0 };

    pub fn at(&self, c: f64) -> f64 {
        self.a + self.b * (2.0 * c).ln()
    }

    /// Least-squares slope through the per-`c` maxima, then lifted so that every
    /// sample lies under the curve; `a ≥ b` keeps the tail integrands monotone.
    pub fn fit(samples: &[(f64, f64)]) -> Envelope {
        if samples.is_empty() {
            return Envelope { a: 0.0, b: 0.0 };
        }
        let n = samples.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(c, m) in samples {
            let x = (2.0 * c).ln();
            sx += x;
            sy += m;
            sxx += x * x;
            sxy += x * m;
        }
        let den = n * sxx - sx * sx;
        let b = if den > 1e-12 { ((n * sxy - sx * sy) / den).max(0.0) } else { 0.0 };
        let a = samples
            .iter()
            .map(|&(c, m)| m - b * (2.0 * c).ln())
            .fold(0.0, f64::max);
        Envelope { a: a.max(b), b }
    }
}

/// `∫_M^∞ m^{−p−1}(α + β ln m) dm`, plus the `m = 1` term when `M = 0`.
fn power_log_tail(m: f64, p: f64, alpha: f64, beta: f64) -> f64 {
    if m < 1.0 {
        return alpha + power_log_tail(1.0, p, alpha, beta);
    }
    let mp = m.powf(-p);
    (alpha + beta * m.ln()) * mp / p + beta * mp / (p * p)
}

/// `Σ_{c > C} #classes(c)·env(c)·c^{−2σ}`, bounding `#classes(c)` by `c` on the
/// `N·m` lattice and by `u` on the `√N·u` lattice.
pub fn coset_tail(level: u64, c_max: f64, sigma: f64, env: Envelope) -> f64 {
    lattice_tail(level, c_max, sigma, env, true)
}

/// As [`coset_tail`] with `count` false: `Σ_{c > C} env(c)·c^{−2σ}`.
fn lattice_tail(level: u64, c_max: f64, sigma: f64, env: Envelope, count: bool) -> f64 {
    if env.a == 0.0 && env.b == 0.0 {
        return 0.0;
    }
    let n = level as f64;
    let (p, extra) = if count { (2.0 * sigma - 2.0, 1.0) } else { (2.0 * sigma - 1.0, 0.0) };
    let plain = n.powf(extra - 2.0 * sigma)
        * power_log_tail((c_max / n).floor(), p, env.a + env.b * (2.0 * n).ln(), env.b);
    let fricke = if level > 1 {
        let r = n.sqrt();
        r.powf(-2.0 * sigma) * power_log_tail((c_max / r).floor(), p, env.a + env.b * (2.0 * r).ln(), env.b)
    } else {
        0.0
    };
    plain + fricke
}

/// Per-`c` bound on `Σ_classes |F_s(x + d/c, y)|`: the shifts lie on a grid of
/// spacing `1/q` with `q ≤ c`, so the sum is at most `q·F0_σ(y) + y^{−2σ}`.
/// Returned as the pair `(F0_σ, y^{−2σ})`.
///
/// For the non-constant part the grid bound uses `2F0_σ`, and the sup bound
/// `|F − F0| ≤ 2Σ_{n≥1}|B_n|` (with `|K_ν| ≤ K_{Re ν}`) replaces it when smaller.
fn kernel_grid_bound(s: Complex64, y: f64, oscillatory: bool) -> Result<(f64, f64)> {
    let sigma = s.re;
    let f0 = constant_term(Complex64::new(sigma, 0.0), y)?.re;
    if !oscillatory {
        return Ok((f0, y.powf(-2.0 * sigma)));
    }
    let pre = 2.0 * (Complex64::new(PI, 0.0).powc(s) / complex_gamma(s)?).norm() * y.powf(0.5 - sigma);
    let nu = Complex64::new(sigma - 0.5, 0.0);
    let mut sup = 0.0;
    for n in 1..=200i64 {
        let x = 2.0 * PI * n as f64 * y;
        let term = pre * (n as f64).powf(sigma - 0.5) * bessel_k(nu, x)?.re;
        sup += term;
        if term < 1e-18 * sup || x > 700.0 {
            break;
        }
    }
    let sup = 2.0 * sup;
    if sup <= 2.0 * f0 {
        Ok((sup, 0.0))
    } else {
        Ok((2.0 * f0, y.powf(-2.0 * sigma)))
    }
}

pub(crate) enum Weights<'a> {
    Unit,
    Symbols(&'a dyn SymbolSource),
    /// `ψ(γ) + shift`, used by the completed series.
    Shifted(&'a dyn SymbolSource, Complex64),
}

impl Weights<'_> {
    fn get(&self, rep: &CosetRep) -> Result<Complex64> {
        match self {
            Weights::Unit => Ok(Complex64::new(1.0, 0.0)),
            Weights::Symbols(src) => src.psi(&rep.element),
            Weights::Shifted(src, k) => Ok(src.psi(&rep.element)? + k),
        }
    }

    fn fitted(&self) -> bool {
        !matches!(self, Weights::Unit)
    }
}

/// Output of [`class_series`].
pub(crate) struct ClassSeries {
    pub values: Vec<Complex64>,
    pub tails: Vec<f64>,
    pub c_max: f64,
    pub classes: usize,
}

/// Per-class contribution: receives the representative and `w(γ)·c^{−2s}` and
/// adds into the output slots.
pub(crate) type Term<'a> = dyn Fn(&CosetRep, Complex64, &mut [Complex64]) + Sync + 'a;

/// `Σ_{0 < c ≤ C} c^{−2s} Σ_{classes} w(γ)·term(γ)` into `outputs` slots; `C` doubles
/// until `Σ_{c>C} env(c)·c^{−2σ}·(A_i·#classes + B_i)` is below `tolerance` for
/// every slot, where `scale[i] = (A_i, B_i)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn class_series(
    level: u64,
    s: Complex64,
    scale: &[(f64, f64)],
    weights: &Weights<'_>,
    term: &Term<'_>,
    tolerance: f64,
    ceiling: f64,
    exec: Exec,
) -> Result<ClassSeries> {
    let sigma = s.re;
    if sigma <= 1.0 {
        return Err(Error::ConvergenceRegion {
            s,
            requirement: "Re(s) > 1",
        });
    }
    let outputs = scale.len();
    let mut acc = vec![Complex64::new(0.0, 0.0); outputs];
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut envelope = if weights.fitted() { None } else { Some(Envelope::UNIT) };
    let mut done = 0usize;
    let mut classes = 0usize;
    let mut c_max = (2.0 * level as f64).max(64.0).min(ceiling);
    loop {
        let cs: Vec<CValue> = c_values(level, c_max).into_iter().skip(done).collect();
        done += cs.len();
        let parts = par::try_map(exec, &cs, |c| -> Result<(Vec<Complex64>, f64, usize)> {
            let reps = class_reps(level, *c);
            let c_pow = Complex64::new(c.real(level), 0.0).powc(-2.0 * s);
            let mut local = vec![Complex64::new(0.0, 0.0); outputs];
            let mut max_w = 0.0f64;
            for rep in &reps {
                let w = weights.get(rep)?;
                max_w = max_w.max(w.norm());
                if w != Complex64::new(0.0, 0.0) {
                    term(rep, w * c_pow, &mut local);
                }
            }
            Ok((local, max_w, reps.len()))
        })?;
        let previous = envelope;
        for (c, (local, max_w, count)) in cs.iter().zip(parts) {
            for (a, l) in acc.iter_mut().zip(local) {
                *a += l;
            }
            classes += count;
            let c_real = c.real(level);
            if weights.fitted() && count > 0 {
                if let Some(env) = previous {
                    if max_w > 10.0 * env.at(c_real) && max_w > 1e-12 {
                        return Err(Error::EnvelopeViolation {
                            value: max_w,
                            envelope: env.at(c_real),
                            c: c_real,
                        });
                    }
                }
                samples.push((c_real, max_w));
            }
        }
        if weights.fitted() {
            envelope = Some(Envelope::fit(&samples));
        }
        let env = envelope.expect("set above");
        let t1 = lattice_tail(level, c_max, sigma, env, true);
        let t0 = lattice_tail(level, c_max, sigma, env, false);
        let tails: Vec<f64> = scale.iter().map(|(a, b)| a * t1 + b * t0).collect();
        let worst = tails.iter().cloned().fold(0.0, f64::max);
        if worst <= tolerance {
            return Ok(ClassSeries {
                values: acc,
                tails,
                c_max,
                classes,
            });
        }
        if c_max >= ceiling {
            return Err(Error::TailTooLarge {
                tail: worst,
                tolerance,
            });
        }
        c_max = (2.0 * c_max).min(ceiling);
    }
}

/// `Σ_{0 < c ≤ C} Σ_{d mod c} w(γ)·c^{−2s}·y^s·F_s(x + d/c, y)` at every point, or
/// with `F_s` replaced by its non-constant part when `oscillatory`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn coset_sum(
    level: u64,
    s: Complex64,
    points: &[UpperHalfPoint],
    weights: &Weights<'_>,
    oscillatory: bool,
    tolerance: f64,
    ceiling: f64,
    exec: Exec,
) -> Result<ClassSeries> {
    let sigma = s.re;
    let mut kernels: Vec<LatticeKernel> = Vec::new();
    let mut which = Vec::with_capacity(points.len());
    for p in points {
        match kernels.iter().position(|k| k.y() == p.y) {
            Some(i) => which.push(i),
            None => {
                kernels.push(LatticeKernel::new(s, p.y)?);
                which.push(kernels.len() - 1);
            }
        }
    }
    let scale: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let (a, b) = kernel_grid_bound(s, p.y, oscillatory)?;
            let ys = p.y.powf(sigma);
            Ok((ys * a, ys * b))
        })
        .collect::<Result<_>>()?;
    let term = |rep: &CosetRep, wc: Complex64, out: &mut [Complex64]| {
        let shift = rep.lower_phase();
        for (i, p) in points.iter().enumerate() {
            let k = &kernels[which[i]];
            let f = if oscillatory {
                k.eval_oscillatory(p.x + shift)
            } else {
                k.eval(p.x + shift)
            };
            out[i] += wc * f;
        }
    };
    let mut r = class_series(level, s, &scale, weights, &term, tolerance, ceiling, exec)?;
    for (v, p) in r.values.iter_mut().zip(points) {
        *v *= Complex64::new(p.y, 0.0).powc(s);
    }
    Ok(r)
}

fn require_infinity(cusp: &CuspData) -> Result<()> {
    if cusp.is_infinity() {
        Ok(())
    } else {
        Err(Error::UnsupportedCusp(format!("{:?}", cusp.representative)))
    }
}

/// `E(z, s) = Σ_{Γ_∞\Γ*} Im(γz)^s` at several points.
pub fn eval_classical_many(params: &EisensteinParams, zs: &[UpperHalfPoint]) -> Result<Vec<SeriesValue>> {
    require_infinity(&params.cusp)?;
    let r = coset_sum(
        params.level(),
        params.s,
        zs,
        &Weights::Unit,
        false,
        params.tolerance,
        params.c_max_ceiling,
        params.exec,
    )?;
    Ok(zs
        .iter()
        .zip(r.values.iter().zip(&r.tails))
        .map(|(z, (v, t))| SeriesValue {
            value: v + Complex64::new(z.y, 0.0).powc(params.s),
            tail_bound: *t,
            c_max: r.c_max,
            classes: r.classes + 1,
        })
        .collect())
}

pub fn eval_classical(params: &EisensteinParams, z: UpperHalfPoint) -> Result<SeriesValue> {
    Ok(eval_classical_many(params, &[z])?[0])
}

fn twisted_region(s: Complex64) -> Result<()> {
    if s.re <= 2.0 {
        return Err(Error::ConvergenceRegion {
            s,
            requirement: "Re(s) > 2",
        });
    }
    Ok(())
}

/// `E(z, s; f) = Σ_{Γ_∞\Γ*} ψ(γ) Im(γz)^s` at several points.
pub fn eval_twisted_many(
    params: &EisensteinParams,
    zs: &[UpperHalfPoint],
    symbols: &dyn SymbolSource,
) -> Result<Vec<SeriesValue>> {
    require_infinity(&params.cusp)?;
    twisted_region(params.s)?;
    check_level(params.level(), symbols)?;
    if symbols.is_trivial() {
        return Ok(zs
            .iter()
            .map(|_| SeriesValue {
                value: Complex64::new(0.0, 0.0),
                tail_bound: 0.0,
                c_max: 0.0,
                classes: 0,
            })
            .collect());
    }
    let r = coset_sum(
        params.level(),
        params.s,
        zs,
        &Weights::Symbols(symbols),
        false,
        params.tolerance,
        params.c_max_ceiling,
        params.exec,
    )?;
    Ok(r.values
        .iter()
        .zip(&r.tails)
        .map(|(v, t)| SeriesValue {
            value: *v,
            tail_bound: *t,
            c_max: r.c_max,
            classes: r.classes,
        })
        .collect())
}

pub fn eval_twisted(
    params: &EisensteinParams,
    z: UpperHalfPoint,
    symbols: &dyn SymbolSource,
) -> Result<SeriesValue> {
    Ok(eval_twisted_many(params, &[z], symbols)?[0])
}

pub(crate) fn check_level(level: u64, symbols: &dyn SymbolSource) -> Result<()> {
    if symbols.level() != level {
        return Err(Error::Domain(format!(
            "symbols of level {} used at level {level}",
            symbols.level()
        )));
    }
    Ok(())
}
