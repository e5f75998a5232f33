use std::cmp::Ordering;

use serde::Serialize;

use super::arith::{gcd, mod_inverse};
use super::{CuspData, GroupElement};
use crate::error::{Error, Result};

/// A lower-left entry of `Γ*` at `∞`: `N·m` (from `Γ₀(N)`) or `√N·u` (from `Γ₀(N)W_N`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CValue {
    Plain(u64),
    Fricke(u64),
}

impl CValue {
    pub fn real(&self, level: u64) -> f64 {
        match *self {
            CValue::Plain(m) => (level * m) as f64,
            CValue::Fricke(u) => (level as f64).sqrt() * u as f64,
        }
    }

    /// `c²/N`, an exact integer.
    fn square_over_level(&self, level: u64) -> u128 {
        match *self {
            CValue::Plain(m) => level as u128 * (m as u128) * (m as u128),
            CValue::Fricke(u) => (u as u128) * (u as u128),
        }
    }

    pub fn cmp_exact(&self, other: &CValue, level: u64) -> Ordering {
        self.square_over_level(level)
            .cmp(&other.square_over_level(level))
            .then_with(|| matches!(self, CValue::Fricke(_)).cmp(&matches!(other, CValue::Fricke(_))))
    }

    /// The integer that indexes residue classes of `d`: `N·m` or `u`.
    pub fn modulus(&self, level: u64) -> u64 {
        match *self {
            CValue::Plain(m) => level * m,
            CValue::Fricke(u) => u,
        }
    }
}

/// A representative of a double coset `Γ_∞ γ Γ_∞` with `c > 0`.
///
/// `upper` and `lower` are the reduced fractions `a/c` and `d/c` taken from the
/// real matrix of `γ` (so `upper` is the cusp `γ∞`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosetRep {
    pub element: GroupElement,
    pub c: CValue,
    pub c_real: f64,
    pub upper: (i64, i64),
    pub lower: (i64, i64),
}

impl CosetRep {
    pub fn lower_phase(&self) -> f64 {
        self.lower.0 as f64 / self.lower.1 as f64
    }

    pub fn upper_phase(&self) -> f64 {
        self.upper.0 as f64 / self.upper.1 as f64
    }
}

/// All lower-left values `0 < c ≤ c_max` in increasing order.
pub fn c_values(level: u64, c_max: f64) -> Vec<CValue> {
    let mut out = Vec::new();
    let n = level as f64;
    let mut m = 1u64;
    while (level * m) as f64 <= c_max {
        out.push(CValue::Plain(m));
        m += 1;
    }
    if level > 1 {
        let mut u = 1u64;
        while n.sqrt() * u as f64 <= c_max {
            if gcd(u as i64, level as i64) == 1 {
                out.push(CValue::Fricke(u));
            }
            u += 1;
        }
    }
    out.sort_by(|a, b| a.cmp_exact(b, level));
    out
}

/// Number of double cosets with lower-left entry `c`.
pub fn class_count(level: u64, c: CValue) -> u64 {
    use super::arith::euler_phi;
    match c {
        CValue::Plain(m) => euler_phi(level * m),
        CValue::Fricke(u) => {
            if level == 1 || gcd(u as i64, level as i64) != 1 {
                0
            } else {
                euler_phi(u)
            }
        }
    }
}

fn reduced(p: i64, q: i64) -> (i64, i64) {
    let g = gcd(p, q).max(1);
    let (p, q) = (p / g, q / g);
    (p.rem_euclid(q), q)
}

/// Double coset representatives with lower-left entry exactly `c`, sorted by `d`.
pub fn class_reps(level: u64, c: CValue) -> Vec<CosetRep> {
    let n = level as i64;
    let c_real = c.real(level);
    let mut out = Vec::new();
    match c {
        CValue::Plain(m) => {
            let cc = n * m as i64;
            for d in 0..cc {
                if gcd(d, cc) != 1 {
                    continue;
                }
                let a = mod_inverse(d, cc).expect("unit");
                let b = (a as i128 * d as i128 - 1) / cc as i128;
                let element = GroupElement::new(level, a, b as i64, cc, d, false).expect("valid");
                out.push(CosetRep {
                    element,
                    c,
                    c_real,
                    upper: reduced(a, cc),
                    lower: reduced(d, cc),
                });
            }
        }
        CValue::Fricke(u) => {
            if level == 1 || gcd(u as i64, n) != 1 {
                return out;
            }
            let u = u as i64;
            for v in 0..u {
                if gcd(v, u) != 1 {
                    continue;
                }
                let b = mod_inverse((n * v).rem_euclid(u), u).expect("unit");
                let a = (1 - b as i128 * n as i128 * v as i128) / u as i128;
                let element = GroupElement::new(level, a as i64, b, -n * v, u, true).expect("valid");
                out.push(CosetRep {
                    element,
                    c,
                    c_real,
                    upper: reduced(b, u),
                    lower: reduced(v, u),
                });
            }
        }
    }
    out
}

/// Representatives of `Γ_∞\Γ*/Γ_∞` with `0 < c ≤ c_max`, sorted by `c` and then `d`.
pub fn double_coset_reps(level: u64, c_max: f64) -> Result<Vec<CosetRep>> {
    if level == 0 {
        return Err(Error::UnsupportedLevel(0));
    }
    if !(c_max.is_finite() && c_max >= 0.0) {
        return Err(Error::Domain(format!("c_max = {c_max}")));
    }
    Ok(c_values(level, c_max)
        .into_iter()
        .flat_map(|c| class_reps(level, c))
        .collect())
}

/// Double coset representatives relative to a cusp; only `∞` is supported.
pub fn coset_reps(cusp: &CuspData, c_max: f64) -> Result<Vec<CosetRep>> {
    if !cusp.is_infinity() {
        return Err(Error::UnsupportedCusp(format!("{:?}", cusp.representative)));
    }
    double_coset_reps(cusp.level, c_max)
}

/// Single cosets `Γ_∞\Γ*` with `0 < c ≤ c_max` and real `|d| ≤ d_max`.
pub fn coset_reps_bounded(level: u64, c_max: f64, d_max: f64) -> Result<Vec<GroupElement>> {
    let mut out = Vec::new();
    for rep in double_coset_reps(level, c_max)? {
        let shift = GroupElement::translation(level, 1);
        let step = rep.c_real;
        let d0 = rep.lower_phase() * step;
        let kmin = ((-d_max - d0) / step).ceil() as i64;
        let kmax = ((d_max - d0) / step).floor() as i64;
        for k in kmin..=kmax {
            out.push(rep.element.multiply(&shift.pow(k)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn level_one_classes() {
        // c ≤ 7: φ(1) + … + φ(7) = 18
        let reps = double_coset_reps(1, 7.0).unwrap();
        assert_eq!(reps.len(), 18);
        assert!(reps.iter().all(|r| !r.element.is_fricke()));
    }

    #[test]
    fn level_37_ordering_and_counts() {
        let cs = c_values(37, 40.0);
        assert_eq!(cs[0], CValue::Fricke(1));
        assert!(cs.contains(&CValue::Plain(1)));
        let reps = double_coset_reps(37, 37.0).unwrap();
        let plain: Vec<_> = reps.iter().filter(|r| r.c == CValue::Plain(1)).collect();
        assert_eq!(plain.len(), 36);
        for w in reps.windows(2) {
            assert!(w[0].c_real <= w[1].c_real + 1e-12);
        }
        for c in cs {
            assert_eq!(class_reps(37, c).len() as u64, class_count(37, c));
        }
    }

    #[test]
    fn real_bottom_rows_match() {
        for level in [1u64, 6, 37] {
            for r in double_coset_reps(level, 30.0).unwrap() {
                let (c, d) = r.element.real_matrix().bottom_row();
                assert!((c - r.c_real).abs() < 1e-9 * r.c_real);
                let ph = d / c;
                assert!(((ph - r.lower_phase()).rem_euclid(1.0) + 1e-9).rem_euclid(1.0) < 1e-8);
                assert_eq!(r.element.image_of_infinity(), {
                    let (p, q) = r.upper;
                    let (ip, iq) = r.element.image_of_infinity();
                    assert_eq!(iq, q);
                    assert_eq!(ip.rem_euclid(q), p);
                    (ip, iq)
                });
            }
        }
    }

    /// Brute force: all integer matrices with small entries, reduced to
    /// `Γ_∞`-orbits by their real bottom row, must agree with the enumeration.
    #[test]
    fn enumeration_is_exact() {
        for level in [1u64, 6, 37] {
            let n = level as i64;
            let c_max = 2.0 * level as f64;
            let d_max = 25.0;
            let key = |g: &GroupElement| {
                let (c, d) = g.real_matrix().bottom_row();
                ((c * 1e6).round() as i64, (d * 1e6).round() as i64)
            };
            let mut brute = HashSet::new();
            let lim = 160i64;
            for c in (-lim..=lim).filter(|c| *c != 0 && c % n == 0) {
                for d in -lim..=lim {
                    let Some(a) = mod_inverse(d.rem_euclid(c.abs()), c.abs()) else {
                        continue;
                    };
                    if gcd(d, c) != 1 {
                        continue;
                    }
                    let b = (a * d - 1) / c;
                    for fr in [false, true] {
                        if let Ok(g) = GroupElement::new(level, a, b, c, d, fr) {
                            let (cr, dr) = g.real_matrix().bottom_row();
                            if cr > 1e-9 && cr <= c_max + 1e-9 && dr.abs() <= d_max {
                                brute.insert(key(&g));
                            }
                        }
                    }
                }
            }
            // Fricke elements with c = 0 have bottom row √N(d, 0)
            if level > 1 {
                let g = GroupElement::new(level, 1, 0, 0, 1, true).unwrap();
                brute.insert(key(&g));
            }
            let listed: HashSet<_> = coset_reps_bounded(level, c_max, d_max)
                .unwrap()
                .iter()
                .map(key)
                .collect();
            assert_eq!(listed, brute, "level {level}");
        }
    }

    #[test]
    fn only_infinity_supported() {
        let cusps = super::super::cusp_set(6).unwrap();
        assert!(coset_reps(&cusps[0], 10.0).is_ok());
        assert!(matches!(coset_reps(&cusps[1], 10.0), Err(Error::UnsupportedCusp(_))));
    }
}
