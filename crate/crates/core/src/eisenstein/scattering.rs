use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::fourier::fourier_series;
use super::series::EisensteinParams;
use crate::error::{Error, Result};
use crate::group::arith::{gcd, is_prime, phi_table, prime_factors};
use crate::group::{class_count, cusp_set, CValue};
use crate::newform::SymbolSource;
use crate::special::completed_zeta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScatteringKind {
    Classical,
    Twisted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuationCertificate {
    DirectSum,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringData {
    /// Indexed by the cusp labels of [`cusp_set`].
    pub matrix: Vec<Vec<Complex64>>,
    pub kind: ScatteringKind,
    pub s: Complex64,
    pub certificate: ContinuationCertificate,
    pub error_estimate: f64,
}

impl ScatteringData {
    /// The entry of a one-cusp group.
    pub fn scalar(&self) -> Complex64 {
        self.matrix[0][0]
    }
}

/// `Σ_c #classes(c)·c^{−2s} = ζ(2s−1)/ζ(2s) · R(N^{−s})` with
/// `R(t) = (α₀ + α₁t + α₂t²)/(1 + β₁t)`, all rational and found from exact
/// class counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub level: u64,
    pub alpha: [f64; 3],
    pub beta1: f64,
}

impl ClosedForm {
    pub fn rational_factor(&self, s: Complex64) -> Complex64 {
        if self.level == 1 {
            return Complex64::new(self.alpha[0] + self.alpha[1] + self.alpha[2], 0.0) / (1.0 + self.beta1);
        }
        let t = Complex64::new(self.level as f64, 0.0).powc(-s);
        (self.alpha[0] + t * (self.alpha[1] + t * self.alpha[2])) / (1.0 + t * self.beta1)
    }

    /// `φ(s) = ξ(2s−1)/ξ(2s)·R(N^{−s})`, valid on all of ℂ away from poles.
    pub fn phi(&self, s: Complex64) -> Result<Complex64> {
        let num = completed_zeta(2.0 * s - 1.0)?;
        let den = completed_zeta(2.0 * s)?;
        if den.norm() == 0.0 {
            return Err(Error::PoleHit { s, pole: s });
        }
        Ok(num / den * self.rational_factor(s))
    }
}

/// Dirichlet inverse of `φ`: multiplicative with `h(p^e) = 1 − p` for `e ≥ 1`.
fn phi_inverse(k: u64) -> i64 {
    let mut ps = prime_factors(k);
    ps.dedup();
    ps.iter().map(|&p| 1 - p as i64).product()
}

/// Largest `ℓ` at which the vanishing of non-`N`-power coefficients is checked.
const ZERO_CHECK: u64 = 40_000;

/// Derive [`ClosedForm`] for `N = 1` or prime `N`.
///
/// The Dirichlet series `Σ_ℓ b_ℓ ℓ^{−s} = Z(s)·ζ(2s)/ζ(2s−1)` with `ℓ = c²k²` has
/// exact integer coefficients `b_ℓ = Σ #classes(c)·h(k)`. The closed form needs
/// `b_ℓ = 0` unless `ℓ` is a power of `N`; those powers give the Taylor
/// coefficients of `R(t)`, which must satisfy a first-order recurrence.
pub fn derive_closed_form(level: u64) -> Result<ClosedForm> {
    let n = level;
    if n != 1 && !is_prime(n) {
        return Err(Error::ContinuationUnavailable(format!(
            "closed-form scattering is derived for N = 1 or prime N, not {n}"
        )));
    }
    // lower-left entries with c² ≤ ZERO_CHECK, as (c², count)
    let mut cs: Vec<(u64, i64)> = Vec::new();
    let mut m = 1u64;
    while (n * m) * (n * m) <= ZERO_CHECK {
        cs.push(((n * m) * (n * m), class_count(n, CValue::Plain(m)) as i64));
        m += 1;
    }
    if n > 1 {
        let mut u = 1u64;
        while n * u * u <= ZERO_CHECK {
            cs.push((n * u * u, class_count(n, CValue::Fricke(u)) as i64));
            u += 1;
        }
    }
    let mut b = vec![0i64; ZERO_CHECK as usize + 1];
    for &(c2, count) in &cs {
        let mut k = 1u64;
        while c2 * k * k <= ZERO_CHECK {
            b[(c2 * k * k) as usize] += count * phi_inverse(k);
            k += 1;
        }
    }
    let is_power = |mut l: u64| {
        if n == 1 {
            return l == 1;
        }
        while l.is_multiple_of(n) {
            l /= n;
        }
        l == 1
    };
    for (l, &v) in b.iter().enumerate().skip(1) {
        if v != 0 && !is_power(l as u64) {
            return Err(Error::ValidationFailure(format!(
                "coefficient b_{l} = {v} is not supported on powers of {n}"
            )));
        }
    }
    if n == 1 {
        return Ok(ClosedForm {
            level: 1,
            alpha: [b[1] as f64, 0.0, 0.0],
            beta1: 0.0,
        });
    }
    // r_j = b_{N^j}, computed from the exact counts at c² = N^i
    let count_at = |i: u32| -> i64 {
        if i == 0 {
            0
        } else if i.is_multiple_of(2) {
            class_count(n, CValue::Plain(n.pow(i / 2 - 1))) as i64
        } else {
            class_count(n, CValue::Fricke(n.pow((i - 1) / 2))) as i64
        }
    };
    let h_pow = |k: u32| if k == 0 { 1 } else { 1 - n as i64 };
    const J: u32 = 7;
    let r: Vec<i64> = (0..=J)
        .map(|j| (0..=j / 2).map(|k| h_pow(k) * count_at(j - 2 * k)).sum())
        .collect();
    for (j, rj) in r.iter().enumerate() {
        let l = (n as u128).pow(j as u32);
        if l <= ZERO_CHECK as u128 && b[l as usize] != *rj {
            return Err(Error::ValidationFailure(format!("b_{l} disagrees with the power formula")));
        }
    }
    // (1 + β₁t)·Σ r_j t^j is a quadratic: r_j + β₁ r_{j−1} = 0 for j ≥ 3
    let (num, den) = if r[2] != 0 { (-r[3], r[2]) } else { (0, 1) };
    for j in 3..=J as usize {
        if (r[j] as i128) * (den as i128) + (num as i128) * (r[j - 1] as i128) != 0 {
            return Err(Error::ValidationFailure(format!(
                "Taylor coefficients of R(t) are not of the assumed rational shape at t^{j}"
            )));
        }
    }
    let beta1 = num as f64 / den as f64;
    Ok(ClosedForm {
        level: n,
        alpha: [
            r[0] as f64,
            r[1] as f64 + beta1 * r[0] as f64,
            r[2] as f64 + beta1 * r[1] as f64,
        ],
        beta1,
    })
}

/// Direct evaluation of `Σ_c #classes(c) c^{−2s}` for `Re s > 1` by a sieve up
/// to index `U` and a partial-summation tail whose counting function is fitted
/// as `D t²/2 + L t` on `[U/2, U]`.
#[derive(Debug, Clone)]
pub struct DirectScattering {
    level: u64,
    /// `(ln κ, counts)` per lattice `κ·m`: `κ = N` (plain) and `√N` (Fricke).
    families: Vec<(f64, Vec<u64>)>,
}

impl DirectScattering {
    pub fn new(level: u64, u: usize) -> Self {
        let phi = phi_table(u);
        let n = level;
        let mut ps = prime_factors(n);
        ps.dedup();
        let plain: Vec<u64> = (0..=u)
            .map(|m| {
                if m == 0 {
                    return 0;
                }
                let extra: u64 = ps
                    .iter()
                    .map(|&p| if (m as u64).is_multiple_of(p) { p } else { p - 1 })
                    .product();
                phi[m] * extra
            })
            .collect();
        let mut families = vec![((n as f64).ln(), plain)];
        if n > 1 {
            let fr: Vec<u64> = (0..=u)
                .map(|k| if k > 0 && gcd(k as i64, n as i64) == 1 { phi[k] } else { 0 })
                .collect();
            families.push(((n as f64).ln() / 2.0, fr));
        }
        Self { level, families }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `(value, error estimate)`; the estimate compares cut-offs `U` and `U/2`.
    pub fn sum(&self, s: Complex64) -> Result<(Complex64, f64)> {
        if s.re <= 1.0 {
            return Err(Error::ConvergenceRegion {
                s,
                requirement: "Re(s) > 1",
            });
        }
        let mut total = Complex64::new(0.0, 0.0);
        let mut alt = Complex64::new(0.0, 0.0);
        for (ln_k, counts) in &self.families {
            let u = counts.len() - 1;
            let term = |m: usize| -> Complex64 {
                let l = ln_k + (m as f64).ln();
                (-2.0 * s * l).exp() * counts[m] as f64
            };
            let mut partial = Vec::with_capacity(u + 1);
            let mut acc = Complex64::new(0.0, 0.0);
            partial.push(acc);
            for m in 1..=u {
                acc += term(m);
                partial.push(acc);
            }
            total += partial[u] + self.tail(*ln_k, counts, u, s);
            alt += partial[u / 2] + self.tail(*ln_k, counts, u / 2, s);
        }
        Ok((total, (total - alt).norm()))
    }

    fn tail(&self, ln_k: f64, counts: &[u64], u: usize, s: Complex64) -> Complex64 {
        // least squares A(t) ≈ D t²/2 + L t on t ∈ [u/2, u]
        let mut cum = 0f64;
        let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (t, &c) in counts.iter().enumerate().take(u + 1).skip(1) {
            cum += c as f64;
            if t >= u / 2 {
                let (x1, x2) = ((t * t) as f64 / 2.0, t as f64);
                s11 += x1 * x1;
                s12 += x1 * x2;
                s22 += x2 * x2;
                r1 += x1 * cum;
                r2 += x2 * cum;
            }
        }
        let det = s11 * s22 - s12 * s12;
        let d = (r1 * s22 - r2 * s12) / det;
        let l = (s11 * r2 - s12 * r1) / det;
        let uf = u as f64;
        let model = d * uf * uf / 2.0 + l * uf;
        let kappa_pow = (-2.0 * s * ln_k).exp();
        let g_u = kappa_pow * Complex64::new(uf, 0.0).powc(-2.0 * s);
        let int_t = kappa_pow * Complex64::new(uf, 0.0).powc(2.0 - 2.0 * s) / (2.0 * s - 2.0);
        let int_1 = kappa_pow * Complex64::new(uf, 0.0).powc(1.0 - 2.0 * s) / (2.0 * s - 1.0);
        (model - cum) * g_u + int_t * d + int_1 * l
    }
}

/// Default sieve length for [`DirectScattering`].
pub const DIRECT_SIEVE: usize = 200_000;

/// Classical scattering of a one-cusp `Γ*`, closed form certified against the
/// direct sum on a grid in `1.5 ≤ Re s ≤ 3`.
#[derive(Debug, Clone)]
pub struct ClassicalScattering {
    pub closed: ClosedForm,
    direct: DirectScattering,
    /// Largest closed-vs-direct deviation seen during validation.
    pub validation_residual: f64,
}

/// Validation grid: 20 points with `Re s` spread over `[1.5, 3]`.
pub fn validation_grid() -> Vec<Complex64> {
    (0..20)
        .map(|k| {
            let t = k as f64 / 19.0;
            Complex64::new(1.5 + 1.5 * t, 2.0 * (3.0 * k as f64).sin())
        })
        .collect()
}

/// Agreement demanded between the two classical paths.
pub const VALIDATION_TOL: f64 = 1e-8;

impl ClassicalScattering {
    pub fn new(level: u64) -> Result<Self> {
        if cusp_set(level)?.len() != 1 {
            return Err(Error::UnsupportedCusp(format!(
                "level {level} has more than one cusp; only the scalar case is evaluated"
            )));
        }
        let closed = derive_closed_form(level)?;
        let direct = DirectScattering::new(level, DIRECT_SIEVE);
        let mut worst = 0.0f64;
        for s in validation_grid() {
            let pre = PI.sqrt() * crate::special::gamma_ratio(s)?;
            let (d, _) = direct.sum(s)?;
            let a = closed.phi(s)?;
            let dev = (a - pre * d).norm() / a.norm().max(1e-300);
            worst = worst.max(dev);
        }
        if worst > VALIDATION_TOL {
            return Err(Error::ValidationFailure(format!(
                "closed form and direct sum differ by {worst:e}"
            )));
        }
        Ok(Self {
            closed,
            direct,
            validation_residual: worst,
        })
    }

    pub fn level(&self) -> u64 {
        self.closed.level
    }

    pub fn phi(&self, s: Complex64) -> Result<Complex64> {
        self.closed.phi(s)
    }

    /// Direct `c`-series, only for `Re s > 1`.
    pub fn phi_direct(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let pre = PI.sqrt() * crate::special::gamma_ratio(s)?;
        let (v, e) = self.direct.sum(s)?;
        Ok((pre * v, pre.norm() * e))
    }

    pub fn data(&self, s: Complex64) -> Result<ScatteringData> {
        Ok(ScatteringData {
            matrix: vec![vec![self.phi(s)?]],
            kind: ScatteringKind::Classical,
            s,
            certificate: ContinuationCertificate::ClosedForm,
            error_estimate: self.validation_residual * self.phi(s)?.norm(),
        })
    }
}

/// Twisted scattering `φ(s; f) = √π Γ(s−½)/Γ(s) Σ_c S(0,0,f;c)/c^{2s}`, `Re s > 2` only.
pub fn scattering_twisted(params: &EisensteinParams, symbols: &dyn SymbolSource) -> Result<ScatteringData> {
    let s = params.s;
    if s.re <= 2.0 {
        return Err(Error::ContinuationUnavailable(format!(
            "twisted scattering needs Re(s) > 2, got {s}"
        )));
    }
    let cusps = cusp_set(params.level())?;
    if cusps.len() != 1 {
        return Err(Error::UnsupportedCusp(format!(
            "level {} has {} cusps; only the scalar case is evaluated",
            params.level(),
            cusps.len()
        )));
    }
    let fc = fourier_series(params, &cusps[0], 0, Some(symbols))?;
    Ok(ScatteringData {
        matrix: vec![vec![fc.value]],
        kind: ScatteringKind::Twisted,
        s,
        certificate: ContinuationCertificate::DirectSum,
        error_estimate: fc.error_estimate,
    })
}

/// Scattering data of either kind.
pub fn scattering(
    params: &EisensteinParams,
    kind: ScatteringKind,
    symbols: Option<&dyn SymbolSource>,
) -> Result<ScatteringData> {
    match kind {
        ScatteringKind::Classical => ClassicalScattering::new(params.level())?.data(params.s),
        ScatteringKind::Twisted => {
            let src = symbols.ok_or_else(|| Error::Domain("twisted scattering needs ψ".into()))?;
            scattering_twisted(params, src)
        }
    }
}
