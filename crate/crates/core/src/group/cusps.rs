use serde::Serialize;

use super::arith::{divisors, is_squarefree};
use super::{GroupElement, RealMatrix};
use crate::error::{Error, Result};

/// A cusp representative: `∞` or a reduced fraction `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cusp {
    Infinity,
    Rational { p: i64, q: i64 },
}

/// A `Γ*`-inequivalence class of cusps with its scaling matrix.
#[derive(Debug, Clone, Serialize)]
pub struct CuspData {
    pub level: u64,
    pub label: usize,
    pub representative: Cusp,
    /// `σ_𝔞`, real with determinant one, `σ_𝔞(∞) = 𝔞`.
    #[serde(serialize_with = "ser_matrix")]
    pub scaling: RealMatrix,
    pub width: u64,
    /// Integer generator of the stabilizer of `𝔞` in `Γ*`.
    pub stabilizer_generator: GroupElement,
    /// `σ_𝔞⁻¹ · generator · σ_𝔞` is `±(1, 1; 0, 1)` to rounding.
    pub certified: bool,
}

fn ser_matrix<S: serde::Serializer>(m: &RealMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.0.serialize(s)
}

impl CuspData {
    pub fn is_infinity(&self) -> bool {
        self.representative == Cusp::Infinity
    }
}

fn certify(scaling: &RealMatrix, generator: &GroupElement) -> bool {
    let conj = scaling
        .inverse()
        .mul(&generator.real_matrix())
        .mul(scaling);
    let [[a, b], [c, d]] = conj.0;
    let sign = if a > 0.0 { 1.0 } else { -1.0 };
    let tol = 1e-9 * (1.0 + scaling.0.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)).powi(2);
    (a * sign - 1.0).abs() < tol
        && (d * sign - 1.0).abs() < tol
        && c.abs() < tol
        && (b * sign - 1.0).abs() < tol
}

/// Inequivalent cusps of `Γ*` for squarefree `N`, `∞` first.
///
/// The cusps of `Γ₀(N)` are `1/δ` for `δ | N`; the Fricke involution pairs
/// `1/δ` with `1/(N/δ)`. Each pair is represented by its smaller divisor, the
/// pair `{1, N}` by `∞`. Widths are `N/δ` and `σ = (1,0;δ,1)·diag(√w, 1/√w)`.
pub fn cusp_set(level: u64) -> Result<Vec<CuspData>> {
    if !is_squarefree(level) {
        return Err(Error::UnsupportedLevel(level));
    }
    let n = level as i64;
    let mut out = Vec::new();
    for delta in divisors(level) {
        let partner = level / delta;
        if delta > partner || (delta == partner && level != 1) {
            continue;
        }
        let label = out.len();
        if delta == 1 {
            let gen = GroupElement::translation(level, 1);
            let scaling = RealMatrix::IDENTITY;
            out.push(CuspData {
                level,
                label,
                representative: Cusp::Infinity,
                scaling,
                width: 1,
                stabilizer_generator: gen,
                certified: certify(&scaling, &gen),
            });
            continue;
        }
        let dl = delta as i64;
        let w = partner as i64;
        let gen = GroupElement::new(level, 1 - n, w, -dl * n, 1 + n, false)?;
        let r = (w as f64).sqrt();
        let scaling = RealMatrix([[1.0, 0.0], [dl as f64, 1.0]]).mul(&RealMatrix([[r, 0.0], [0.0, 1.0 / r]]));
        out.push(CuspData {
            level,
            label,
            representative: Cusp::Rational { p: 1, q: dl },
            scaling,
            width: partner,
            stabilizer_generator: gen,
            certified: certify(&scaling, &gen),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::arith::gcd;
    use std::collections::HashMap;

    /// Union–find over cusps with small denominators, merged by a brute-force
    /// search over Γ₀(N) elements with bounded entries and their Fricke translates.
    fn orbit_count(level: u64, max_den: i64, bound: i64) -> usize {
        let n = level as i64;
        let mut cusps: Vec<(i64, i64)> = vec![(1, 0)];
        for q in 1..=max_den {
            for p in 0..q {
                if gcd(p, q) == 1 {
                    cusps.push((p, q));
                }
            }
        }
        let index: HashMap<(i64, i64), usize> = cusps.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut parent: Vec<usize> = (0..cusps.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        // normalise p/q to (p mod q, q) since translations identify p/q ~ p/q + 1
        let norm = |p: i64, q: i64| -> (i64, i64) {
            if q == 0 {
                return (1, 0);
            }
            let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
            let g = gcd(p, q);
            let (p, q) = (p / g, q / g);
            (p.rem_euclid(q), q)
        };
        let mut elements = Vec::new();
        for a in -bound..=bound {
            for cc in (-bound..=bound).filter(|c| c % n == 0) {
                for d in -bound..=bound {
                    if a * d == 1 && cc == 0 {
                        elements.push(GroupElement::new(level, a, 0, 0, d, false).unwrap());
                        continue;
                    }
                    if cc == 0 || (a * d - 1) % cc != 0 {
                        continue;
                    }
                    let b = (a * d - 1) / cc;
                    if let Ok(g) = GroupElement::new(level, a, b, cc, d, false) {
                        elements.push(g);
                        elements.push(g.multiply(&GroupElement::fricke_element(level)));
                    }
                }
            }
        }
        elements.push(GroupElement::fricke_element(level));
        for g in &elements {
            let m = g.real_matrix();
            let r = (level as f64).sqrt();
            for &(p, q) in &cusps {
                // act exactly: scale the Fricke matrix by √N to make it integral
                let (num, den) = if g.is_fricke() {
                    let (ga, gb, gc, gd) = g.integer_part();
                    // gW·(p/q) = (gb·N·p − ga·q)/(gd·N·p − gc·q) after clearing √N
                    (gb * n * p - ga * q, gd * n * p - gc * q)
                } else {
                    let [[a, b], [c, d]] = m.0;
                    let _ = r;
                    (a as i64 * p + b as i64 * q, c as i64 * p + d as i64 * q)
                };
                let target = norm(num, den);
                if let (Some(&i), Some(&j)) = (index.get(&norm(p, q)), index.get(&target)) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let mut roots: Vec<usize> = (0..cusps.len()).map(|i| find(&mut parent, i)).collect();
        roots.sort();
        roots.dedup();
        roots.len()
    }

    #[test]
    fn counts_match_orbit_oracle() {
        assert_eq!(cusp_set(1).unwrap().len(), 1);
        assert_eq!(orbit_count(1, 6, 6), 1);
        assert_eq!(cusp_set(37).unwrap().len(), 1);
        assert_eq!(orbit_count(37, 6, 40), 1);
        assert_eq!(cusp_set(6).unwrap().len(), 2);
        assert_eq!(orbit_count(6, 6, 12), 2);
        assert_eq!(cusp_set(30).unwrap().len(), 4);
    }

    #[test]
    fn every_scaling_is_certified() {
        for n in [1u64, 2, 6, 10, 30, 37] {
            for c in cusp_set(n).unwrap() {
                assert!(c.certified, "N = {n}, cusp {:?}", c.representative);
                assert!((c.scaling.det() - 1.0).abs() < 1e-12);
                let img = c.scaling.act(num_complex::Complex64::new(0.0, 1e9));
                if let Cusp::Rational { p, q } = c.representative {
                    assert!((img.re - p as f64 / q as f64).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn non_squarefree_rejected() {
        assert!(matches!(cusp_set(12), Err(Error::UnsupportedLevel(12))));
    }
}
