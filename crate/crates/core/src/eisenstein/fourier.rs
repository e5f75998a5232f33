use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::series::{
    check_level, class_series, eval_classical_many, eval_twisted_many, EisensteinParams, Weights,
};
use crate::error::{Error, Result};
use crate::group::{class_reps, CValue, CuspData, CosetRep};
use crate::newform::SymbolSource;
use crate::special::{complex_gamma, gamma_ratio, whittaker_w, UpperHalfPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMethod {
    Quadrature,
    KloostermanSeries,
}

impl CoefficientMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoefficientMethod::Quadrature => "quadrature",
            CoefficientMethod::KloostermanSeries => "kloosterman-series",
        }
    }
}

/// A Fourier coefficient of `E_𝔞(σ_𝔟 z, s; ·)`: for `n ≠ 0` the coefficient of
/// `W_s(nz) = 2√(|n|y) K_{s−½}(2π|n|y) e(nx)`, for `n = 0` the coefficient of
/// `y^{1−s}` with the `y^s` coefficient alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierCoefficient {
    pub a_index: usize,
    pub b_index: usize,
    pub n: i64,
    pub s: Complex64,
    pub value: Complex64,
    pub y_s_coefficient: Option<Complex64>,
    pub method: CoefficientMethod,
    pub error_estimate: f64,
}

/// One CSV row of an exported coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub kind: String,
    pub a: usize,
    pub b: usize,
    pub n: i64,
    pub re_s: f64,
    pub im_s: f64,
    pub re_value: f64,
    pub im_value: f64,
    pub method: String,
    pub error_estimate: f64,
}

impl FourierCoefficient {
    pub fn row(&self, kind: &str) -> TableRow {
        TableRow {
            kind: kind.to_string(),
            a: self.a_index,
            b: self.b_index,
            n: self.n,
            re_s: self.s.re,
            im_s: self.s.im,
            re_value: self.value.re,
            im_value: self.value.im,
            method: self.method.as_str().to_string(),
            error_estimate: self.error_estimate,
        }
    }
}

fn require_pair(a: &CuspData, b: &CuspData) -> Result<()> {
    for c in [a, b] {
        if !c.is_infinity() {
            return Err(Error::UnsupportedCusp(format!("{:?}", c.representative)));
        }
    }
    Ok(())
}

#[inline]
fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x.rem_euclid(1.0))
}

fn phase(rep: &CosetRep, m: i64, n: i64) -> Complex64 {
    // reduce the numerators exactly before going to floating point
    let (ua, uq) = rep.upper;
    let (la, lq) = rep.lower;
    let x = (n as i128 * ua as i128).rem_euclid(uq as i128) as f64 / uq as f64
        + (m as i128 * la as i128).rem_euclid(lq as i128) as f64 / lq as f64;
    e(x)
}

/// `S(m, n, f; c) = Σ ψ(γ) e(n·a/c + m·d/c)` over double cosets with lower-left `c`.
pub fn kloosterman_twisted(
    a: &CuspData,
    b: &CuspData,
    m: i64,
    n: i64,
    c: CValue,
    symbols: &dyn SymbolSource,
) -> Result<Complex64> {
    require_pair(a, b)?;
    check_level(a.level, symbols)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for rep in class_reps(a.level, c) {
        acc += symbols.psi(&rep.element)? * phase(&rep, m, n);
    }
    Ok(acc)
}

/// The unweighted sum `S(m, n; c)`.
pub fn kloosterman_classical(a: &CuspData, b: &CuspData, m: i64, n: i64, c: CValue) -> Result<Complex64> {
    require_pair(a, b)?;
    Ok(class_reps(a.level, c).iter().map(|r| phase(r, m, n)).sum())
}

/// Prefactor of the `c`-series: `π^s/Γ(s)·|n|^{s−1}` for `n ≠ 0`,
/// `√π Γ(s−½)/Γ(s)` for `n = 0`.
pub fn series_prefactor(n: i64, s: Complex64) -> Result<Complex64> {
    if n == 0 {
        Ok(PI.sqrt() * gamma_ratio(s)?)
    } else {
        let an = n.unsigned_abs() as f64;
        Ok(Complex64::new(PI, 0.0).powc(s) / complex_gamma(s)? * Complex64::new(an, 0.0).powc(s - 1.0))
    }
}

/// Several coefficients at once from one pass over the classes:
/// `prefactor(n)·Σ_c S(n, 0; c)/c^{2s}` with weights `ψ` (or 1 when `symbols` is `None`).
pub fn fourier_series_many(
    params: &EisensteinParams,
    b: &CuspData,
    ns: &[i64],
    symbols: Option<&dyn SymbolSource>,
) -> Result<Vec<FourierCoefficient>> {
    require_pair(&params.cusp, b)?;
    let s = params.s;
    let level = params.level();
    if let Some(src) = symbols {
        check_level(level, src)?;
        if s.re <= 2.0 {
            return Err(Error::ConvergenceRegion {
                s,
                requirement: "Re(s) > 2",
            });
        }
    }
    let pre: Vec<Complex64> = ns.iter().map(|&n| series_prefactor(n, s)).collect::<Result<_>>()?;
    let make = |value: Complex64, n: i64, err: f64| FourierCoefficient {
        a_index: params.cusp.label,
        b_index: b.label,
        n,
        s,
        value,
        y_s_coefficient: if n == 0 {
            Some(Complex64::new(if symbols.is_none() { 1.0 } else { 0.0 }, 0.0))
        } else {
            None
        },
        method: CoefficientMethod::KloostermanSeries,
        error_estimate: err,
    };
    if symbols.is_some_and(|s| s.is_trivial()) {
        return Ok(ns.iter().map(|&n| make(Complex64::new(0.0, 0.0), n, 0.0)).collect());
    }
    let weights = match symbols {
        Some(src) => Weights::Symbols(src),
        None => Weights::Unit,
    };
    let scale: Vec<(f64, f64)> = pre.iter().map(|p| (p.norm(), 0.0)).collect();
    let term = |rep: &CosetRep, wc: Complex64, out: &mut [Complex64]| {
        for (slot, &n) in out.iter_mut().zip(ns) {
            *slot += wc * phase(rep, n, 0);
        }
    };
    let r = class_series(level, s, &scale, &weights, &term, params.tolerance, params.c_max_ceiling, params.exec)?;
    Ok(ns
        .iter()
        .zip(r.values.iter().zip(&r.tails))
        .zip(&pre)
        .map(|((&n, (v, t)), p)| make(p * v, n, *t))
        .collect())
}

pub fn fourier_series(
    params: &EisensteinParams,
    b: &CuspData,
    n: i64,
    symbols: Option<&dyn SymbolSource>,
) -> Result<FourierCoefficient> {
    Ok(fourier_series_many(params, b, &[n], symbols)?[0])
}

/// Number of trapezoid nodes on `[0, 1)` for the quadrature extraction.
pub const QUADRATURE_POINTS: usize = 64;

/// Values of the series at the nodes `x_j = j/P`, height `y`.
fn row_values(
    params: &EisensteinParams,
    y: f64,
    symbols: Option<&dyn SymbolSource>,
) -> Result<(Vec<Complex64>, f64)> {
    let zs: Vec<UpperHalfPoint> = (0..QUADRATURE_POINTS)
        .map(|j| UpperHalfPoint::new(j as f64 / QUADRATURE_POINTS as f64, y))
        .collect::<Result<_>>()?;
    let vals = match symbols {
        Some(src) => eval_twisted_many(params, &zs, src)?,
        None => eval_classical_many(params, &zs)?,
    };
    let tail = vals.iter().map(|v| v.tail_bound).fold(0.0, f64::max);
    Ok((vals.into_iter().map(|v| v.value).collect(), tail))
}

/// `∫₀¹ g(x) e(−nx) dx` by the trapezoid rule, with the half-grid difference as
/// the aliasing estimate.
fn trapezoid_mode(vals: &[Complex64], n: i64) -> (Complex64, f64) {
    let p = vals.len();
    let mut full = Complex64::new(0.0, 0.0);
    let mut half = Complex64::new(0.0, 0.0);
    for (j, v) in vals.iter().enumerate() {
        let t = v * e(-(n as f64) * j as f64 / p as f64);
        full += t;
        if j % 2 == 0 {
            half += t;
        }
    }
    let full = full / p as f64;
    let half = half / (p / 2) as f64;
    (full, (full - half).norm())
}

/// 2×2 condition number from the Frobenius norm and determinant.
fn condition_2x2(m: [[Complex64; 2]; 2]) -> f64 {
    let fro2: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    if det == 0.0 {
        return f64::INFINITY;
    }
    // σ₁² + σ₂² = fro2, σ₁σ₂ = det
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((fro2 + disc) / 2.0).sqrt();
    let s2 = det / s1;
    s1 / s2
}

/// Solve `c(y) = α y^s + β y^{1−s}` from heights `y` and `2y`.
pub(crate) fn two_height_solve(
    s: Complex64,
    y: f64,
    c1: Complex64,
    c2: Complex64,
) -> Result<(Complex64, Complex64)> {
    let pw = |h: f64, e: Complex64| Complex64::new(h, 0.0).powc(e);
    let m = [[pw(y, s), pw(y, 1.0 - s)], [pw(2.0 * y, s), pw(2.0 * y, 1.0 - s)]];
    let cond = condition_2x2(m);
    if cond > 1e6 {
        return Err(Error::IllConditioned(cond));
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let alpha = (c1 * m[1][1] - c2 * m[0][1]) / det;
    let beta = (m[0][0] * c2 - m[1][0] * c1) / det;
    Ok((alpha, beta))
}

/// Entrywise bound on the solution error of [`two_height_solve`] for input
/// errors `e1`, `e2`; returns the bound on `β` plus the bound on `α`.
pub(crate) fn solve_error_bound(s: Complex64, y: f64, e1: f64, e2: f64) -> f64 {
    let pw = |h: f64, e: Complex64| Complex64::new(h, 0.0).powc(e).norm();
    let (m00, m01, m10, m11) = (pw(y, s), pw(y, 1.0 - s), pw(2.0 * y, s), pw(2.0 * y, 1.0 - s));
    let det = (Complex64::new(y, 0.0).powc(s) * Complex64::new(2.0 * y, 0.0).powc(1.0 - s)
        - Complex64::new(y, 0.0).powc(1.0 - s) * Complex64::new(2.0 * y, 0.0).powc(s))
    .norm();
    ((m11 * e1 + m01 * e2) + (m00 * e2 + m10 * e1)) / det
}

/// Fourier coefficient by trapezoid quadrature of the series itself along
/// `Im z = y` (and `2y` when `n = 0`).
pub fn fourier_quadrature(
    params: &EisensteinParams,
    b: &CuspData,
    n: i64,
    y: f64,
    symbols: Option<&dyn SymbolSource>,
) -> Result<FourierCoefficient> {
    require_pair(&params.cusp, b)?;
    let s = params.s;
    let make = |value, y_s_coefficient, err| FourierCoefficient {
        a_index: params.cusp.label,
        b_index: b.label,
        n,
        s,
        value,
        y_s_coefficient,
        method: CoefficientMethod::Quadrature,
        error_estimate: err,
    };
    if n != 0 {
        let w = whittaker_w(s, n, UpperHalfPoint::new(0.0, y)?)?.norm();
        if w < 1e-13 {
            return Err(Error::Domain(format!("W_s({n}·{y}i) = {w:e} is below 1e-13")));
        }
        let (vals, tail) = row_values(params, y, symbols)?;
        let (c, alias) = trapezoid_mode(&vals, n);
        return Ok(make(c / w, None, (alias + tail) / w));
    }
    let (v1, t1) = row_values(params, y, symbols)?;
    let (v2, t2) = row_values(params, 2.0 * y, symbols)?;
    let (c1, a1) = trapezoid_mode(&v1, 0);
    let (c2, a2) = trapezoid_mode(&v2, 0);
    let (alpha, beta) = two_height_solve(s, y, c1, c2)?;
    let (e1, e2) = (a1 + t1, a2 + t2);
    let err = solve_error_bound(s, y, e1, e2);
    Ok(make(beta, Some(alpha), err))
}
