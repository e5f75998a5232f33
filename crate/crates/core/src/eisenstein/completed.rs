use num_complex::Complex64;
use serde::Serialize;

use super::fourier::{solve_error_bound, two_height_solve, QUADRATURE_POINTS};
use super::scattering::{scattering_twisted, ClassicalScattering};
use super::series::{coset_sum, EisensteinParams, SeriesValue, Weights};
use crate::error::{Error, Result};
use crate::newform::SymbolSource;
use crate::special::UpperHalfPoint;

/// `Ẽ(z, w; f) = E(z, w; f) − ½φ(w; f)φ(1−w)E(z, w)` for a one-cusp `Γ*`, with
/// the scalar data it is built from.
pub struct CompletedSeries<'a> {
    params: EisensteinParams,
    symbols: &'a dyn SymbolSource,
    /// `φ(w; f)` by its direct `c`-series.
    pub phi_twisted: Complex64,
    pub phi_twisted_error: f64,
    /// `φ(w)` and `φ(1−w)` from the classical closed form.
    pub phi_w: Complex64,
    pub phi_one_minus_w: Complex64,
}

impl<'a> CompletedSeries<'a> {
    /// `params.s` plays the role of `w`.
    pub fn new(
        params: EisensteinParams,
        symbols: &'a dyn SymbolSource,
        classical: &ClassicalScattering,
    ) -> Result<Self> {
        if !params.cusp.is_infinity() {
            return Err(Error::UnsupportedCusp(format!("{:?}", params.cusp.representative)));
        }
        if classical.level() != params.level() {
            return Err(Error::Domain("scattering data of another level".into()));
        }
        let w = params.s;
        let (phi_twisted, phi_twisted_error) = if symbols.is_trivial() {
            (Complex64::new(0.0, 0.0), 0.0)
        } else {
            let d = scattering_twisted(&params, symbols)?;
            (d.scalar(), d.error_estimate)
        };
        Ok(Self {
            phi_w: classical.phi(w)?,
            phi_one_minus_w: classical.phi(1.0 - w)?,
            params,
            symbols,
            phi_twisted,
            phi_twisted_error,
        })
    }

    pub fn w(&self) -> Complex64 {
        self.params.s
    }

    /// Same series with a different absolute tail tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.params.tolerance = tolerance;
        self
    }

    pub fn params(&self) -> &EisensteinParams {
        &self.params
    }

    /// Weight added to `ψ` for each coset: `−½φ(w; f)φ(1−w)`.
    fn shift(&self) -> Complex64 {
        -0.5 * self.phi_twisted * self.phi_one_minus_w
    }

    /// Scalar closed forms `(a, b) = (−½φ(w;f)φ(1−w), ½φ(w;f))`.
    pub fn scalar_constant_terms(&self) -> (Complex64, Complex64) {
        (self.shift(), 0.5 * self.phi_twisted)
    }

    fn trivial(&self) -> bool {
        self.symbols.is_trivial()
    }

    pub fn eval_many(&self, zs: &[UpperHalfPoint]) -> Result<Vec<SeriesValue>> {
        self.sum(zs, false)
    }

    pub fn eval(&self, z: UpperHalfPoint) -> Result<SeriesValue> {
        Ok(self.eval_many(&[z])?[0])
    }

    /// `Ẽ − a y^w − b y^{1−w}`, summed class by class with each kernel's own
    /// constant term removed (no cancellation against the constant term).
    pub fn oscillatory_many(&self, zs: &[UpperHalfPoint]) -> Result<Vec<SeriesValue>> {
        self.sum(zs, true)
    }

    fn sum(&self, zs: &[UpperHalfPoint], oscillatory: bool) -> Result<Vec<SeriesValue>> {
        if self.trivial() {
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
        let p = &self.params;
        let k = self.shift();
        let r = coset_sum(
            p.level(),
            p.s,
            zs,
            &Weights::Shifted(self.symbols, k),
            oscillatory,
            p.tolerance,
            p.c_max_ceiling,
            p.exec,
        )?;
        Ok(zs
            .iter()
            .zip(r.values.iter().zip(&r.tails))
            .map(|(z, (v, t))| {
                let identity = if oscillatory {
                    Complex64::new(0.0, 0.0)
                } else {
                    k * Complex64::new(z.y, 0.0).powc(p.s)
                };
                SeriesValue {
                    value: v + identity,
                    tail_bound: *t,
                    c_max: r.c_max,
                    classes: r.classes + 1,
                }
            })
            .collect())
    }

    /// Constant term `a y^w + b y^{1−w}` read off by trapezoid quadrature at
    /// heights `y` and `2y`; returns `(a, b, error estimate)`.
    pub fn constant_terms_quadrature(&self, y: f64) -> Result<(Complex64, Complex64, f64)> {
        if self.trivial() {
            return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0));
        }
        let row = |h: f64| -> Result<(Complex64, f64)> {
            let zs: Vec<UpperHalfPoint> = (0..QUADRATURE_POINTS)
                .map(|j| UpperHalfPoint::new(j as f64 / QUADRATURE_POINTS as f64, h))
                .collect::<Result<_>>()?;
            let vals = self.eval_many(&zs)?;
            let p = vals.len() as f64;
            let full: Complex64 = vals.iter().map(|v| v.value).sum::<Complex64>() / p;
            let half: Complex64 = vals.iter().step_by(2).map(|v| v.value).sum::<Complex64>() / (p / 2.0);
            let tail = vals.iter().map(|v| v.tail_bound).fold(0.0, f64::max);
            Ok((full, (full - half).norm() + tail))
        };
        let (c1, e1) = row(y)?;
        let (c2, e2) = row(2.0 * y)?;
        let (a, b) = two_height_solve(self.w(), y, c1, c2)?;
        Ok((a, b, solve_error_bound(self.w(), y, e1, e2)))
    }
}

/// `Ẽ(z, w; f)` at one point.
pub fn eval_completed(
    params: &EisensteinParams,
    z: UpperHalfPoint,
    symbols: &dyn SymbolSource,
    classical: &ClassicalScattering,
) -> Result<SeriesValue> {
    CompletedSeries::new(params.clone(), symbols, classical)?.eval(z)
}

/// Serializable summary of the scalar data entering `Ẽ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompletedData {
    pub w: Complex64,
    pub phi_twisted: Complex64,
    pub phi_w: Complex64,
    pub phi_one_minus_w: Complex64,
}

impl CompletedSeries<'_> {
    pub fn data(&self) -> CompletedData {
        CompletedData {
            w: self.w(),
            phi_twisted: self.phi_twisted,
            phi_w: self.phi_w,
            phi_one_minus_w: self.phi_one_minus_w,
        }
    }
}
