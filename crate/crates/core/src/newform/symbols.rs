use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use num_complex::Complex64;

use super::NewformData;
use crate::error::{Error, Result};
use crate::group::arith::{is_prime, mod_inverse};
use crate::group::GroupElement;
use crate::special::UpperHalfPoint;

/// Anything that assigns `ψ(γ)` to elements of `Γ*`.
pub trait SymbolSource: Send + Sync {
    fn level(&self) -> u64;

    /// `ψ(γ) = ∫_{i∞}^{γ i∞} f(z) dz`.
    fn psi(&self, g: &GroupElement) -> Result<Complex64>;

    /// `Ψ(p/q) = ∫_{i∞}^{p/q} f(z) dz`, with `q = 0` meaning `∞`.
    fn psi_cusp(&self, p: i64, q: i64) -> Result<Complex64>;

    /// True when `ψ` vanishes identically.
    fn is_trivial(&self) -> bool {
        false
    }
}

/// `ψ ≡ 0`, the degenerate twist (level one has no cusp forms of weight 2).
#[derive(Debug, Clone, Copy)]
pub struct ZeroSymbols {
    pub level: u64,
}

impl SymbolSource for ZeroSymbols {
    fn level(&self) -> u64 {
        self.level
    }

    fn psi(&self, _g: &GroupElement) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }

    fn psi_cusp(&self, _p: i64, _q: i64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }

    fn is_trivial(&self) -> bool {
        true
    }
}

/// Concurrent memo of `ψ` keyed by the canonical group element.
#[derive(Debug, Default)]
pub struct PsiCache {
    map: DashMap<GroupElement, Complex64>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl PsiCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Look up `key`, computing and inserting on a miss. Concurrent misses on
    /// the same key may both compute; the values agree so either insert wins.
    pub fn get_or_compute(
        &self,
        key: &GroupElement,
        compute: impl FnOnce() -> Result<Complex64>,
    ) -> Result<Complex64> {
        if let Some(v) = self.map.get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(*v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = compute()?;
        self.map.insert(*key, v);
        Ok(v)
    }

    pub fn insert(&self, key: GroupElement, value: Complex64) {
        self.map.insert(key, value);
    }

    pub fn get(&self, key: &GroupElement) -> Option<Complex64> {
        self.map.get(key).map(|v| *v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Entries sorted by key, for deterministic persistence.
    pub fn entries(&self) -> Vec<(GroupElement, Complex64)> {
        let mut v: Vec<_> = self.map.iter().map(|e| (*e.key(), *e.value())).collect();
        v.sort_by_key(|a| a.0);
        v
    }
}

/// Modular symbols of a prime-level newform.
///
/// Cusps with small denominators are handled directly by two q-expansions at a
/// common base point. Everything else goes through continued fractions and a
/// table of Manin symbols indexed by `P¹(Z/N)`.
#[derive(Debug)]
pub struct ModularSymbols {
    nf: NewformData,
    /// `table[t] = M(1 : t)` for `0 ≤ t < N`, `table[N] = M(0 : 1)`.
    table: Vec<Complex64>,
    cache: PsiCache,
}

/// Largest real lower-left entry handled by the direct route.
const DIRECT_C_MAX: f64 = 20.0;

impl ModularSymbols {
    pub fn new(nf: NewformData) -> Result<Self> {
        let n = nf.level();
        if !is_prime(n) {
            return Err(Error::UnsupportedLevel(n));
        }
        let ni = n as i64;
        let w = GroupElement::fricke_element(n);
        let psi0 = psi_direct(&nf, &w, None)?;
        let mut table = vec![Complex64::new(0.0, 0.0); n as usize + 1];
        table[n as usize] = -psi0;
        for t in 0..ni {
            // representative d' ∈ (−N/2, N/2]
            let d = if t > ni / 2 { t - ni } else { t };
            table[t as usize] = if d == 0 {
                psi0
            } else {
                // Fricke element sending ∞ to −1/d
                let a = mod_inverse(d.rem_euclid(ni), ni).expect("unit");
                let g = GroupElement::new(n, a, -1, 1 - a * d, d, true)?;
                psi0 - psi_direct(&nf, &g, None)?
            };
        }
        Ok(Self {
            nf,
            table,
            cache: PsiCache::new(),
        })
    }

    /// The canonical level-37 instance with enough coefficients for its table.
    pub fn canonical() -> Result<Self> {
        Self::new(NewformData::canonical(2000))
    }

    pub fn newform(&self) -> &NewformData {
        &self.nf
    }

    pub fn cache(&self) -> &PsiCache {
        &self.cache
    }

    fn manin(&self, c: i64, d: i64) -> Complex64 {
        let n = self.nf.level() as i64;
        let c = c.rem_euclid(n);
        if c == 0 {
            return self.table[n as usize];
        }
        let t = d.rem_euclid(n) * mod_inverse(c, n).expect("unit") % n;
        self.table[t as usize]
    }

    /// `Ψ(p/q)` by continued fractions: `Σ_j M(q_j : (−1)^{j−1} q_{j−1})`.
    pub fn psi_manin(&self, p: i64, q: i64) -> Complex64 {
        if q == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let (mut a, mut b) = if q < 0 { (-p, -q) } else { (p, q) };
        a = a.rem_euclid(b);
        let (mut q2, mut q1) = (1i64, 0i64);
        let mut sign = -1i64;
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            let aj = a.div_euclid(b);
            let qj = aj * q1 + q2;
            acc += self.manin(qj, sign * q1);
            let r = a - aj * b;
            a = b;
            b = r;
            q2 = q1;
            q1 = qj;
            sign = -sign;
            if b == 0 {
                break;
            }
        }
        acc
    }

    /// `ψ(γ)` from a chosen base point, bypassing table and cache.
    pub fn psi_with_base_point(&self, g: &GroupElement, z0: UpperHalfPoint) -> Result<Complex64> {
        psi_direct(&self.nf, g, Some(z0))
    }

    /// `ψ(γ)` by the direct route at the balanced base point.
    pub fn psi_direct(&self, g: &GroupElement) -> Result<Complex64> {
        psi_direct(&self.nf, g, None)
    }
}

/// `ψ(γ) = P(γ⁻¹z₀) − P(z₀)`; by default `z₀ = −D/C + i/C` from the bottom row
/// of `γ⁻¹`, where both points sit at height `1/C`.
fn psi_direct(nf: &NewformData, g: &GroupElement, z0: Option<UpperHalfPoint>) -> Result<Complex64> {
    let inv = g.invert().real_matrix();
    let (c, d) = inv.bottom_row();
    if c.abs() < 1e-12 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let z0 = match z0 {
        Some(z) => z,
        None => UpperHalfPoint::new(-d / c, 1.0 / c.abs())?,
    };
    let z1 = UpperHalfPoint::from_complex(inv.act(z0.as_complex()))?;
    Ok(nf.period_to_infinity(z1)? - nf.period_to_infinity(z0)?)
}

impl SymbolSource for ModularSymbols {
    fn level(&self) -> u64 {
        self.nf.level()
    }

    fn psi(&self, g: &GroupElement) -> Result<Complex64> {
        if g.level() != self.level() {
            return Err(Error::Domain(format!(
                "element of level {} given to symbols of level {}",
                g.level(),
                self.level()
            )));
        }
        self.cache.get_or_compute(g, || {
            let (c, _) = g.real_matrix().bottom_row();
            if c.abs() <= DIRECT_C_MAX {
                psi_direct(&self.nf, g, None)
            } else {
                let (p, q) = g.image_of_infinity();
                Ok(self.psi_manin(p, q))
            }
        })
    }

    fn psi_cusp(&self, p: i64, q: i64) -> Result<Complex64> {
        Ok(self.psi_manin(p, q))
    }
}

/// `ψ(γ)` through a cache (the free-function form of [`SymbolSource::psi`]).
pub fn modular_symbol(symbols: &ModularSymbols, g: &GroupElement) -> Result<Complex64> {
    symbols.psi(g)
}
