use std::f64::consts::PI;
use std::sync::OnceLock;

use dashmap::DashMap;
use num_complex::Complex64;

use super::{pole_points, pole_residues, pole_terms, ConstantTermPair, LambdaValue};
use crate::eisenstein::{fourier_series_many, ClassicalScattering, CompletedSeries, EisensteinParams};
use crate::error::{Error, Result};
use crate::group::CuspData;
use crate::newform::SymbolSource;
use crate::special::{bessel_k, integrate_de, QuadOptions, UpperHalfPoint};

#[derive(Debug, Clone, Copy)]
pub struct LambdaOptions {
    /// Absolute target handed to the adaptive `y`-quadrature.
    pub quad_tol: f64,
    /// `G(y)` is treated as zero above this height; `|G| ≲ e^{−2πy}`.
    pub cutoff: f64,
    pub pole_guard: f64,
    /// Height `y` (with `2y`) for the constant-term extraction.
    pub extraction_height: f64,
    pub extraction_tol: f64,
    /// Tail tolerance for `φ_1`; `φ_n` gets `e^{2π(n−1)/√N}` times this.
    pub spectral_tol: f64,
    /// Tail tolerance of the lattice `G` on the direct route.
    pub lattice_tol: f64,
    /// Step of the fixed exp-sinh rule on the direct route.
    pub direct_step: f64,
    /// Evaluation budget of each adaptive quadrature.
    pub max_evaluations: usize,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        Self {
            quad_tol: 1e-16,
            cutoff: 16.0,
            pole_guard: 1e-8,
            extraction_height: 1.0,
            extraction_tol: 1e-10,
            spectral_tol: 1e-12,
            lattice_tol: 1e-11,
            direct_step: 1.0 / 16.0,
            max_evaluations: 1 << 20,
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn key(y: f64) -> u64 {
    y.to_bits()
}

/// `a(w), b(w)` by two-height quadrature of `Ẽ`, cross-checked against the
/// scalar closed forms.
pub fn constant_terms(completed: &CompletedSeries<'_>, height: f64) -> Result<ConstantTermPair> {
    let w = completed.w();
    if w.re <= 2.0 {
        return Err(Error::ConvergenceRegion {
            s: w,
            requirement: "Re(w) > 2",
        });
    }
    let (a_closed, b_closed) = completed.scalar_constant_terms();
    let (a_w, b_w, extraction_error) = completed.constant_terms_quadrature(height)?;
    let slack = (10.0 * extraction_error).max(1e-6);
    if (a_w - a_closed).norm() > slack || (b_w - b_closed).norm() > slack {
        return Err(Error::ValidationFailure(format!(
            "extracted constant terms ({a_w}, {b_w}) disagree with closed forms ({a_closed}, {b_closed})"
        )));
    }
    Ok(ConstantTermPair {
        w,
        a_w,
        b_w,
        extraction_error,
        a_closed,
        b_closed,
    })
}

/// `Λ̃(·, w)` for one `w`, holding the data both evaluation routes share and
/// memoizing `G(y) = Ẽ(iy) − a y^w − b y^{1−w}` per height.
pub struct Lambda<'a> {
    completed: CompletedSeries<'a>,
    level: f64,
    y0: f64,
    a: Complex64,
    b: Complex64,
    constants: std::result::Result<ConstantTermPair, Error>,
    /// `φ_n + φ_{−n}` of `Ẽ` for `n = 1, 2, …`, with error estimates.
    spectral: Vec<Complex64>,
    spectral_err: Vec<f64>,
    opts: LambdaOptions,
    memo_spectral: DashMap<u64, (Complex64, f64)>,
    /// `(y, weight, G(y), tail)` on the fixed exp-sinh nodes, filled on first use.
    lattice: OnceLock<std::result::Result<Vec<LatticeNode>, Error>>,
}

#[derive(Debug, Clone, Copy)]
struct LatticeNode {
    y: f64,
    /// `dy` weight of the step-`h` rule.
    weight: f64,
    /// Whether the node belongs to the step-`2h` rule too.
    coarse: bool,
    g: Complex64,
    tail: f64,
}

impl<'a> Lambda<'a> {
    /// `params.s` is `w`.
    pub fn new(
        params: EisensteinParams,
        symbols: &'a dyn SymbolSource,
        classical: &ClassicalScattering,
        opts: LambdaOptions,
    ) -> Result<Self> {
        let w = params.s;
        if w.re <= 2.0 {
            return Err(Error::ConvergenceRegion {
                s: w,
                requirement: "Re(w) > 2",
            });
        }
        let level = params.level() as f64;
        let y0 = 1.0 / level.sqrt();
        let completed =
            CompletedSeries::new(params.clone().with_tolerance(opts.extraction_tol), symbols, classical)?;
        let (a, b) = completed.scalar_constant_terms();
        let constants = constant_terms(&completed, opts.extraction_height);
        let completed = completed.with_tolerance(opts.lattice_tol);
        let (spectral, spectral_err) = if symbols.is_trivial() {
            (Vec::new(), Vec::new())
        } else {
            // e^{−2π n y0} below 1e−18 past this
            let n_max = (42.0 / (2.0 * PI * y0)).ceil() as i64;
            let k = a;
            let mut out = Vec::with_capacity(n_max as usize);
            let mut errs = Vec::with_capacity(n_max as usize);
            for n in 1..=n_max {
                let tol = opts.spectral_tol * (2.0 * PI * (n - 1) as f64 * y0).exp();
                let p = params.clone().with_tolerance(tol.min(1e-6));
                let pair = fourier_series_many(&p, &p.cusp, &[n, -n], Some(symbols))?;
                let mut v = pair[0].value + pair[1].value;
                let mut e = pair[0].error_estimate + pair[1].error_estimate;
                if k != c(0.0) {
                    let cc = fourier_series_many(&p, &p.cusp, &[n, -n], None)?;
                    v += k * (cc[0].value + cc[1].value);
                    e += k.norm() * (cc[0].error_estimate + cc[1].error_estimate);
                }
                out.push(v);
                errs.push(e);
            }
            (out, errs)
        };
        Ok(Self {
            completed,
            level,
            y0,
            a,
            b,
            constants,
            spectral,
            spectral_err,
            opts,
            memo_spectral: DashMap::new(),
            lattice: OnceLock::new(),
        })
    }

    pub fn w(&self) -> Complex64 {
        self.completed.w()
    }

    pub fn level(&self) -> u64 {
        self.level as u64
    }

    /// The extracted constant terms, or the extraction failure.
    pub fn constants(&self) -> std::result::Result<&ConstantTermPair, &Error> {
        self.constants.as_ref()
    }

    /// The `(a, b)` used in the pole terms.
    pub fn pole_coefficients(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    /// `G(y)` from the Fourier coefficients: `Σ_{n≥1}(φ_n + φ_{−n})·2√(ny)K_{w−½}(2πny)`.
    /// Also returns the bound propagated from the coefficient error estimates.
    pub fn g_spectral(&self, y: f64) -> Result<(Complex64, f64)> {
        if self.spectral.is_empty() || y > self.opts.cutoff {
            return Ok((c(0.0), 0.0));
        }
        if let Some(v) = self.memo_spectral.get(&key(y)) {
            return Ok(*v);
        }
        let nu = self.w() - 0.5;
        let mut acc = c(0.0);
        let mut err = 0.0;
        for (i, (coeff, e)) in self.spectral.iter().zip(&self.spectral_err).enumerate() {
            let n = (i + 1) as f64;
            let x = 2.0 * PI * n * y;
            if x > 700.0 {
                break;
            }
            let wn = 2.0 * (n * y).sqrt() * bessel_k(nu, x)?;
            acc += coeff * wn;
            err += e * wn.norm();
        }
        self.memo_spectral.insert(key(y), (acc, err));
        Ok((acc, err))
    }

    /// `G(y)` from the lattice sum, with its certified tail.
    pub fn g_lattice(&self, y: f64) -> Result<(Complex64, f64)> {
        if self.spectral.is_empty() || y > self.opts.cutoff {
            return Ok((c(0.0), 0.0));
        }
        let r = self.completed.oscillatory_many(&[UpperHalfPoint::new(0.0, y)?])?[0];
        Ok((r.value, r.tail_bound))
    }

    /// Exp-sinh rule `y = y0 + exp(½π sinh t)` at step `h`, truncated where the
    /// weight drops below `1e−25` and at the cutoff, with `G` summed at every node
    /// in one pass over the classes.
    fn lattice_nodes(&self) -> Result<&[LatticeNode]> {
        self.lattice
            .get_or_init(|| {
                let h = self.opts.direct_step;
                let node = |k: i64| {
                    let t = k as f64 * h;
                    let e = (0.5 * PI * t.sinh()).exp();
                    LatticeNode {
                        y: self.y0 + e,
                        weight: h * 0.5 * PI * t.cosh() * e,
                        coarse: k % 2 == 0,
                        g: c(0.0),
                        tail: 0.0,
                    }
                };
                let mut nodes: Vec<LatticeNode> =
                    (0..).map(node).take_while(|n| n.y <= self.opts.cutoff).collect();
                nodes.extend((1..).map(|k| node(-k)).take_while(|n| n.weight > 1e-25));
                let zs: Vec<UpperHalfPoint> =
                    nodes.iter().map(|n| UpperHalfPoint::new(0.0, n.y)).collect::<Result<_>>()?;
                let vals = self.completed.oscillatory_many(&zs)?;
                for (n, v) in nodes.iter_mut().zip(vals) {
                    n.g = v.value;
                    n.tail = v.tail_bound;
                }
                Ok(nodes)
            })
            .as_deref()
            .map_err(|e| e.clone())
    }

    fn quad(&self, f: impl FnMut(f64) -> Complex64) -> Result<(Complex64, f64)> {
        let r = integrate_de(f, self.y0, f64::INFINITY, QuadOptions {
            max_evaluations: self.opts.max_evaluations,
            ..QuadOptions::with_target(self.opts.quad_tol)
        })?;
        Ok((r.value, r.abs_error_estimate))
    }

    /// `∫_{1/√N}^∞ G(y)(y^s + N^{−s}y^{−s}) dy/y` with the spectral `G`.
    pub fn regular_part(&self, s: Complex64) -> Result<(Complex64, f64)> {
        if self.spectral.is_empty() {
            return Ok((c(0.0), 0.0));
        }
        let ns = c(self.level).powc(-s);
        let mut failure = None;
        let r = self.quad(|y| match self.g_spectral(y) {
            Ok((g, _)) => g * (c(y).powc(s) + ns * c(y).powc(-s)) / y,
            Err(e) => {
                failure.get_or_insert(e);
                c(0.0)
            }
        })?;
        // coefficient truncation, integrated against |kernel|
        let propagated = self.quad(|y| match self.g_spectral(y) {
            Ok((_, e)) => c(e * (c(y).powc(s).norm() + (ns * c(y).powc(-s)).norm()) / y),
            Err(e) => {
                failure.get_or_insert(e);
                c(0.0)
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok((r.0, r.1 + propagated.0.re)),
        }
    }

    fn guard(&self, s: Complex64) -> Result<()> {
        for p in pole_points(self.w()) {
            if (s - p).norm() < self.opts.pole_guard {
                return Err(Error::PoleHit { s, pole: p });
            }
        }
        Ok(())
    }

    /// The continuation: half-line integral plus the closed pole terms.
    pub fn continued(&self, s: Complex64) -> Result<LambdaValue> {
        self.guard(s)?;
        let (regular_part, err) = self.regular_part(s)?;
        let pole = pole_terms(self.level, self.a, self.b, s, self.w());
        Ok(LambdaValue {
            s,
            w: self.w(),
            regular_part,
            pole_terms: pole,
            total: regular_part + pole.iter().sum::<Complex64>(),
            quadrature_error: err,
        })
    }

    /// The defining integral over `(0, ∞)`, split at `1/√N` with the lower piece
    /// moved up by `y ↦ 1/(Ny)`; the lattice `G` throughout and every power term
    /// integrated numerically.
    pub fn direct(&self, s: Complex64) -> Result<LambdaValue> {
        self.direct_perturbed(s, c(0.0), c(0.0))
    }

    /// [`Lambda::direct`] with `a + ε_a`, `b + ε_b` subtracted in the Fricke-moved
    /// piece; a self-test of the power-term integration, which is linear in them.
    pub fn direct_perturbed(&self, s: Complex64, eps_a: Complex64, eps_b: Complex64) -> Result<LambdaValue> {
        let w = self.w();
        let bound = (1.0 + w.re).max(2.0 - w.re);
        if s.re <= bound {
            return Err(Error::ConvergenceRegion {
                s,
                requirement: "Re(s) > max(1 + Re(w), 2 − Re(w))",
            });
        }
        let n = self.level;
        let ns = c(n).powc(-s);
        let (regular_part, mut err) = if self.spectral.is_empty() {
            (c(0.0), 0.0)
        } else {
            let nodes = self.lattice_nodes()?;
            let (mut fine, mut coarse, mut tail) = (c(0.0), c(0.0), 0.0);
            for n in nodes {
                let k = (c(n.y).powc(s) + ns * c(n.y).powc(-s)) / n.y;
                let v = n.g * k * n.weight;
                fine += v;
                if n.coarse {
                    coarse += v * 2.0;
                }
                tail += n.tail * k.norm() * n.weight;
            }
            (fine, (fine - coarse).norm() + tail)
        };
        let (a, b) = (self.a, self.b);
        let (a2, b2) = (a + eps_a, b + eps_b);
        let pieces: [Box<dyn Fn(f64) -> Complex64>; 4] = [
            Box::new(move |u| a * c(u).powc(w) * c(n * u).powc(-s) / u),
            Box::new(move |u| b * c(u).powc(1.0 - w) * c(n * u).powc(-s) / u),
            Box::new(move |u| -a2 * c(n * u).powc(-w - s) / u),
            Box::new(move |u| -b2 * c(n * u).powc(w - 1.0 - s) / u),
        ];
        let mut pole = [c(0.0); 4];
        for (slot, f) in pole.iter_mut().zip(pieces.iter()) {
            let (v, e) = self.quad(f)?;
            *slot = v;
            err += e;
        }
        Ok(LambdaValue {
            s,
            w,
            regular_part,
            pole_terms: pole,
            total: regular_part + pole.iter().sum::<Complex64>(),
            quadrature_error: err,
        })
    }

    /// Residue at one of the four pole points, from the closed pole terms.
    pub fn residue_at(&self, s0: Complex64) -> Result<Complex64> {
        if let Err(e) = &self.constants {
            return Err(Error::PreconditionUnverifiable(format!("constant-term extraction failed: {e}")));
        }
        let residues = pole_residues(self.level, self.a, self.b, self.w());
        for (p, r) in pole_points(self.w()).iter().zip(residues) {
            if (s0 - p).norm() < self.opts.pole_guard {
                return Ok(r);
            }
        }
        Err(Error::Domain(format!("{s0} is not a pole point")))
    }

    /// `(1/2πi)∮ Λ̃(s) ds` over `|s − s0| = r` by the `m`-point trapezoid rule.
    pub fn residue_circle(&self, s0: Complex64, r: f64, m: usize) -> Result<Complex64> {
        let mut acc = c(0.0);
        for j in 0..m {
            let d = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            acc += d * self.continued(s0 + d)?.total;
        }
        Ok(acc / m as f64)
    }

    /// `N'^s Λ̃(s) − Λ̃(−s)` with `N'` the level used in the prefactor.
    pub fn fe_sides(&self, s: Complex64, prefactor_level: f64) -> Result<(Complex64, Complex64, f64)> {
        let l = self.continued(s)?;
        let r = self.continued(-s)?;
        let pre = c(prefactor_level).powc(s);
        Ok((pre * l.total, r.total, pre.norm() * l.quadrature_error + r.quadrature_error))
    }
}

fn build<'a>(
    cusp: &CuspData,
    w: Complex64,
    symbols: &'a dyn SymbolSource,
) -> Result<(Lambda<'a>, ClassicalScattering)> {
    let classical = ClassicalScattering::new(cusp.level)?;
    let l = Lambda::new(EisensteinParams::new(cusp.clone(), w), symbols, &classical, LambdaOptions::default())?;
    Ok((l, classical))
}

/// One-shot [`Lambda::direct`].
pub fn lambda_direct(cusp: &CuspData, s: Complex64, w: Complex64, symbols: &dyn SymbolSource) -> Result<LambdaValue> {
    build(cusp, w, symbols)?.0.direct(s)
}

/// One-shot [`Lambda::continued`].
pub fn lambda_continued(
    cusp: &CuspData,
    s: Complex64,
    w: Complex64,
    symbols: &dyn SymbolSource,
) -> Result<LambdaValue> {
    build(cusp, w, symbols)?.0.continued(s)
}

/// One-shot [`Lambda::residue_at`].
pub fn residue_at(cusp: &CuspData, s0: Complex64, w: Complex64, symbols: &dyn SymbolSource) -> Result<Complex64> {
    build(cusp, w, symbols)?.0.residue_at(s0)
}
