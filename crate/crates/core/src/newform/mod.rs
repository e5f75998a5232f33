//! The weight-2 newform `f`, its q-expansion, periods and modular symbols.

mod cache_file;
mod symbols;

pub use cache_file::{load_cache, save_cache, CACHE_MAGIC, CACHE_VERSION};
pub use symbols::{modular_symbol, ModularSymbols, PsiCache, SymbolSource, ZeroSymbols};

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::arith::is_prime;
use crate::special::UpperHalfPoint;

/// Level of the pinned instance, the curve `y² + y = x³ − x`.
pub const CANONICAL_LEVEL: u64 = 37;

/// Truncation tolerance for q-expansions.
pub const SERIES_TOL: f64 = 1e-12;

/// Coefficients `a_1 … a_{n_max}` of a weight-2 newform with its Fricke sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewformData {
    level: u64,
    fricke_eigenvalue: i8,
    /// `coefficients[n-1] = a_n`.
    coefficients: Vec<i64>,
}

#[derive(Deserialize)]
struct NewformFile {
    level: u64,
    fricke_eigenvalue: i64,
    coefficients: Vec<i64>,
}

/// `p + 1 − #E(F_p)` for `y² + y = x³ − x`, by exhaustive point counting.
pub fn ap_oracle(p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if p == CANONICAL_LEVEL {
        return Err(Error::UnsupportedPrime(p));
    }
    let mut affine = 0i64;
    for x in 0..p {
        let rhs = (x * x % p * x + p * p - x) % p;
        for y in 0..p {
            if (y * y + y) % p == rhs {
                affine += 1;
            }
        }
    }
    Ok(p as i64 + 1 - (affine + 1))
}

fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let (mut base, mut e, m) = (a as u128, ((p - 1) / 2) as u128, p as u128);
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// `a_p` by a character sum over `(2y+1)² = 4x³ − 4x + 1`.
fn ap_fast(p: u64) -> i64 {
    if p == 2 {
        return ap_oracle(2).expect("p = 2");
    }
    if p == CANONICAL_LEVEL {
        return -1;
    }
    let p = p as i64;
    -(0..p)
        .map(|x| legendre(4 * x * x % p * x - 4 * x + 1, p))
        .sum::<i64>()
}

fn smallest_prime_factors(n: usize) -> Vec<usize> {
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    spf
}

/// Fill `a_n` from prime values by multiplicativity and the Hecke recursion.
fn extend_from_primes(level: u64, n_max: usize, ap: impl Fn(u64) -> i64) -> Vec<i64> {
    let spf = smallest_prime_factors(n_max);
    let mut a = vec![0i64; n_max + 1];
    if n_max >= 1 {
        a[1] = 1;
    }
    for n in 2..=n_max {
        let p = spf[n];
        let mut m = n;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let pk = n / m;
        if m > 1 {
            a[n] = a[pk] * a[m];
            continue;
        }
        // n = p^k
        let app = if k == 1 { ap(p as u64) } else { a[p] };
        a[n] = if k == 1 {
            app
        } else if level.is_multiple_of(p as u64) {
            app * a[n / p]
        } else {
            app * a[n / p] - p as i64 * a[n / p / p]
        };
    }
    a.remove(0);
    a
}

impl NewformData {
    /// The level-37 rank-one newform with `a_p` from point counts.
    pub fn canonical(n_max: usize) -> Self {
        Self {
            level: CANONICAL_LEVEL,
            fricke_eigenvalue: 1,
            coefficients: extend_from_primes(CANONICAL_LEVEL, n_max.max(1), ap_fast),
        }
    }

    pub fn new(level: u64, fricke_eigenvalue: i64, coefficients: Vec<i64>) -> Result<Self> {
        if fricke_eigenvalue != 1 {
            return Err(Error::InvalidNewform(format!(
                "Fricke eigenvalue {fricke_eigenvalue}; +1 is required"
            )));
        }
        if level < 2 {
            return Err(Error::UnsupportedLevel(level));
        }
        let nf = Self {
            level,
            fricke_eigenvalue: 1,
            coefficients,
        };
        nf.validate()?;
        Ok(nf)
    }

    /// Parse `{level, fricke_eigenvalue, coefficients}` JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: NewformFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidNewform(e.to_string()))?;
        Self::new(f.level, f.fricke_eigenvalue, f.coefficients)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Re-generate to a larger `n_max` (only possible for the canonical instance).
    pub fn extended(&self, n_max: usize) -> Result<Self> {
        if n_max <= self.n_max() {
            return Ok(self.clone());
        }
        if self.level != CANONICAL_LEVEL {
            return Err(Error::TruncationInsufficient {
                height: f64::NAN,
                n_max: self.n_max(),
            });
        }
        Ok(Self::canonical(n_max))
    }

    fn validate(&self) -> Result<()> {
        let a = &self.coefficients;
        let bad = |m: String| Err(Error::InvalidNewform(m));
        if a.first() != Some(&1) {
            return bad("a_1 must be 1".into());
        }
        let n_max = a.len();
        let spf = smallest_prime_factors(n_max);
        let get = |n: usize| a[n - 1];
        for n in 2..=n_max {
            let p = spf[n];
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            let pk = n / m;
            if m > 1 {
                if get(n) != get(pk) * get(m) {
                    return bad(format!("a_{n} ≠ a_{pk}·a_{m}"));
                }
            } else if pk != p {
                let expect = if self.level.is_multiple_of(p as u64) {
                    get(p) * get(n / p)
                } else {
                    let prev2 = if n / p / p >= 1 { get(n / p / p) } else { 0 };
                    get(p) * get(n / p) - p as i64 * prev2
                };
                if get(n) != expect {
                    return bad(format!("Hecke recursion fails at a_{n}"));
                }
            } else if (get(p) as f64).abs() > 2.0 * (p as f64).sqrt() {
                return bad(format!("|a_{p}| exceeds 2√{p}"));
            }
        }
        if self.level == CANONICAL_LEVEL {
            for p in (2..n_max.min(200) as u64).filter(|&p| is_prime(p) && p != CANONICAL_LEVEL) {
                if get(p as usize) != ap_oracle(p)? {
                    return bad(format!("a_{p} disagrees with the point count"));
                }
            }
        }
        Ok(())
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn fricke_eigenvalue(&self) -> i8 {
        self.fricke_eigenvalue
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len()
    }

    /// `a_n` for `1 ≤ n ≤ n_max`.
    pub fn coefficient(&self, n: usize) -> Option<i64> {
        n.checked_sub(1).and_then(|i| self.coefficients.get(i).copied())
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    /// SHA-256 over level, sign and coefficients; keys persisted caches.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.level.to_le_bytes());
        h.update([self.fricke_eigenvalue as u8]);
        for a in &self.coefficients {
            h.update(a.to_le_bytes());
        }
        h.finalize().into()
    }

    /// Smallest truncation whose tail `Σ_{n>M} 2n·wⁿ·rⁿ` (weights `w = 1` for `f`,
    /// `1/n` for the period) is below [`SERIES_TOL`] at height `y`.
    fn truncation(&self, y: f64, period: bool) -> Result<usize> {
        let r = (-2.0 * PI * y).exp();
        let tail = |m: usize| {
            let mf = m as f64;
            let rm = r.powf(mf + 1.0);
            if period {
                2.0 * rm / (1.0 - r) / (2.0 * PI)
            } else {
                2.0 * rm * (mf + 1.0 - mf * r) / ((1.0 - r) * (1.0 - r))
            }
        };
        let mut m = 8usize;
        while tail(m) > SERIES_TOL {
            if m >= self.n_max() {
                return Err(Error::TruncationInsufficient {
                    height: y,
                    n_max: self.n_max(),
                });
            }
            m = (m + m / 4 + 1).min(self.n_max());
        }
        Ok(m)
    }

    /// `f(z) = Σ a_n qⁿ`.
    pub fn evaluate_f(&self, z: UpperHalfPoint) -> Result<Complex64> {
        let m = self.truncation(z.y, false)?;
        Ok(self.q_sum(z, m, |_| 1.0))
    }

    /// `P(z) = ∫_z^{i∞} f(w) dw = −(1/2πi) Σ (a_n/n) qⁿ`.
    pub fn period_to_infinity(&self, z: UpperHalfPoint) -> Result<Complex64> {
        let m = self.truncation(z.y, true)?;
        let s = self.q_sum(z, m, |n| 1.0 / n as f64);
        Ok(-s / Complex64::new(0.0, 2.0 * PI))
    }

    fn q_sum(&self, z: UpperHalfPoint, m: usize, weight: impl Fn(usize) -> f64) -> Complex64 {
        let q = Complex64::from_polar((-2.0 * PI * z.y).exp(), 2.0 * PI * z.x.rem_euclid(1.0));
        let mut qn = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=m {
            qn *= q;
            if n % 64 == 0 {
                // re-anchor the phase to keep the rounding drift bounded
                qn = Complex64::from_polar(
                    (-2.0 * PI * z.y * n as f64).exp(),
                    2.0 * PI * (n as f64 * z.x.rem_euclid(1.0)).rem_euclid(1.0),
                );
            }
            acc += qn * (self.coefficients[n - 1] as f64 * weight(n));
        }
        acc
    }

    /// `∫_A^∞ f(iy) dy = Σ a_n e^{−2πnA}/(2πn)`.
    fn imaginary_axis_tail(&self, a: f64) -> Result<f64> {
        let z = UpperHalfPoint::new(0.0, a)?;
        Ok((self.period_to_infinity(z)? * Complex64::new(0.0, -1.0)).re)
    }

    /// `L_f(1) = 2π ∫_0^∞ f(iy) dy`, split at `1/√N` with Fricke invariance
    /// folding the lower half onto the upper.
    pub fn l_value_at_1(&self) -> Result<Complex64> {
        self.l_value_split(1.0 / (self.level as f64).sqrt())
    }

    /// Same integral split at an arbitrary height `A`:
    /// `2π [∫_A^∞ f(iy)dy − w ∫_{1/(NA)}^∞ f(iy)dy]`, with the Fricke sign
    /// `f(−1/(Nz)) = w N z² f(z)` entering through `f(i/(Nt)) = −w N t² f(it)`.
    pub fn l_value_split(&self, a: f64) -> Result<Complex64> {
        let w = self.fricke_eigenvalue as f64;
        let upper = self.imaginary_axis_tail(a)?;
        let lower = self.imaginary_axis_tail(1.0 / (self.level as f64 * a))?;
        Ok(Complex64::new(2.0 * PI * (upper - w * lower), 0.0))
    }
}

#[cfg(test)]
mod tests;
