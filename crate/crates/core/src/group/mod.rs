//! Exact arithmetic in `Γ₀(N)`, the Fricke element `W_N` and `Γ* = Γ₀(N) ∪ Γ₀(N)W_N`,
//! together with cusp data and the coset enumerations that feed every sum.

pub mod arith;
mod cosets;
mod cusps;

pub use cosets::{
    c_values, class_count, class_reps, coset_reps, coset_reps_bounded, double_coset_reps, CValue, CosetRep,
};
pub use cusps::{cusp_set, Cusp, CuspData};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use arith::gcd;

/// A real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMatrix(pub [[f64; 2]; 2]);

impl RealMatrix {
    pub const IDENTITY: RealMatrix = RealMatrix([[1.0, 0.0], [0.0, 1.0]]);

    pub fn mul(&self, o: &RealMatrix) -> RealMatrix {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = o.0;
        RealMatrix([[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]])
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> RealMatrix {
        let [[a, b], [c, d]] = self.0;
        let det = self.det();
        RealMatrix([[d / det, -b / det], [-c / det, a / det]])
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        let [[a, b], [c, d]] = self.0;
        (z * a + b) / (z * c + d)
    }

    pub fn bottom_row(&self) -> (f64, f64) {
        (self.0[1][0], self.0[1][1])
    }
}

/// An element of `Γ*` stored exactly: an integer matrix `g ∈ Γ₀(N)` and a flag
/// selecting `g` or `g·W_N`, where `W_N = (0, −1/√N; √N, 0)`.
///
/// Elements are projective; the sign is normalised so that the bottom row of
/// the encoded real matrix has `c > 0`, or `c = 0` and `d > 0`. At level 1 the
/// Fricke element is `S = (0, −1; 1, 0) ∈ SL₂(ℤ)` and is multiplied out, so
/// `fricke` is always `false` there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    level: u64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    fricke: bool,
}

fn mat_mul(x: [i64; 4], y: [i64; 4]) -> [i64; 4] {
    let m = |p: i64, q: i64, r: i64, s: i64| -> i64 {
        let v = p as i128 * q as i128 + r as i128 * s as i128;
        i64::try_from(v).expect("matrix entry overflow in Γ* arithmetic")
    };
    [
        m(x[0], y[0], x[1], y[2]),
        m(x[0], y[1], x[1], y[3]),
        m(x[2], y[0], x[3], y[2]),
        m(x[2], y[1], x[3], y[3]),
    ]
}

impl GroupElement {
    /// Build `g` (or `g·W_N` when `fricke`) from an integer matrix in `Γ₀(N)`.
    pub fn new(level: u64, a: i64, b: i64, c: i64, d: i64, fricke: bool) -> Result<Self> {
        if level == 0 {
            return Err(Error::UnsupportedLevel(0));
        }
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::Domain(format!("det({a},{b};{c},{d}) ≠ 1")));
        }
        if c.rem_euclid(level as i64) != 0 {
            return Err(Error::Domain(format!("{level} ∤ {c}")));
        }
        Ok(Self::canonical(level, [a, b, c, d], fricke))
    }

    fn canonical(level: u64, m: [i64; 4], fricke: bool) -> Self {
        let (m, fricke) = if fricke && level == 1 {
            // g·S = (b, −a; d, −c)
            ([m[1], -m[0], m[3], -m[2]], false)
        } else {
            (m, fricke)
        };
        let negate = if fricke {
            // real bottom row √N·(d, −c/N); d ≠ 0 for N > 1
            m[3] < 0
        } else {
            m[2] < 0 || (m[2] == 0 && m[3] < 0)
        };
        let m = if negate { m.map(|v| -v) } else { m };
        Self {
            level,
            a: m[0],
            b: m[1],
            c: m[2],
            d: m[3],
            fricke,
        }
    }

    pub fn identity(level: u64) -> Self {
        Self::canonical(level, [1, 0, 0, 1], false)
    }

    pub fn fricke_element(level: u64) -> Self {
        Self::canonical(level, [1, 0, 0, 1], true)
    }

    pub fn translation(level: u64, m: i64) -> Self {
        Self::canonical(level, [1, m, 0, 1], false)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_fricke(&self) -> bool {
        self.fricke
    }

    /// The integer part `g ∈ Γ₀(N)` as `(a, b, c, d)`.
    pub fn integer_part(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn is_identity(&self) -> bool {
        !self.fricke && self.b == 0 && self.c == 0 && self.a == 1 && self.d == 1
    }

    /// `W g W^{-1} = (d, −c/N; −bN, a)`.
    fn fricke_conjugate(level: u64, m: [i64; 4]) -> [i64; 4] {
        let n = level as i64;
        [m[3], -m[2] / n, -m[1] * n, m[0]]
    }

    fn raw(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.level, other.level, "elements of different levels");
        let n = self.level;
        let (m, fricke) = match (self.fricke, other.fricke) {
            (false, e) => (mat_mul(self.raw(), other.raw()), e),
            (true, e) => (
                mat_mul(self.raw(), Self::fricke_conjugate(n, other.raw())),
                !e,
            ),
        };
        Self::canonical(n, m, fricke)
    }

    pub fn invert(&self) -> GroupElement {
        let inv = [self.d, -self.b, -self.c, self.a];
        if self.fricke {
            Self::canonical(self.level, Self::fricke_conjugate(self.level, inv), true)
        } else {
            Self::canonical(self.level, inv, false)
        }
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        let base = if k < 0 { self.invert() } else { *self };
        (0..k.unsigned_abs()).fold(Self::identity(self.level), |acc, _| acc.multiply(&base))
    }

    /// The encoded real matrix.
    pub fn real_matrix(&self) -> RealMatrix {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        if self.fricke {
            let r = (self.level as f64).sqrt();
            RealMatrix([[b * r, -a / r], [d * r, -c / r]])
        } else {
            RealMatrix([[a, b], [c, d]])
        }
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        self.real_matrix().act(z)
    }

    /// The cusp `γ(∞)` as a reduced fraction `p/q` with `q ≥ 0` (`q = 0` is ∞).
    pub fn image_of_infinity(&self) -> (i64, i64) {
        let (p, q) = if self.fricke {
            // gW(∞) = g(0) = b/d
            (self.b, self.d)
        } else {
            (self.a, self.c)
        };
        let g = gcd(p, q).max(1);
        let (p, q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            (-p, -q)
        } else {
            (p, q)
        }
    }

    /// `|tr γ| = 2`, decided in exact arithmetic.
    pub fn is_parabolic(&self) -> Result<bool> {
        if self.is_identity() {
            return Err(Error::IdentityInput);
        }
        if self.fricke {
            // tr = (bN − c)/√N, so |tr| = 2 ⇔ (bN − c)² = 4N
            let n = self.level as i128;
            let t = self.b as i128 * n - self.c as i128;
            Ok(t * t == 4 * n)
        } else {
            Ok((self.a + self.d).abs() == 2)
        }
    }

    /// A small generating family used by random-word tests: `T`, `(1,0;N,1)`,
    /// `W_N` and two hyperbolic elements with lower-left entry `N`.
    pub fn standard_generators(level: u64) -> Vec<GroupElement> {
        let n = level as i64;
        let mut gens = vec![
            Self::translation(level, 1),
            Self::canonical(level, [1, 0, n, 1], false),
            Self::fricke_element(level),
        ];
        for a in 2..=3i64 {
            if let Some(d) = arith::mod_inverse(a, n) {
                let d = if d == 0 { 1 } else { d };
                if (a * d - 1) % n == 0 {
                    gens.push(Self::canonical(level, [a, (a * d - 1) / n, n, d], false));
                }
            }
        }
        gens
    }

    /// The product of a word in `standard_generators` (index, exponent sign).
    pub fn from_word(level: u64, word: &[(usize, bool)]) -> GroupElement {
        let gens = Self::standard_generators(level);
        word.iter().fold(Self::identity(level), |acc, &(i, inv)| {
            let g = gens[i % gens.len()];
            acc.multiply(&if inv { g.invert() } else { g })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N: u64 = 37;

    fn close(x: &RealMatrix, y: &RealMatrix) -> bool {
        let same = x.0.iter().flatten().zip(y.0.iter().flatten()).all(|(p, q)| (p - q).abs() < 1e-9);
        let neg = x.0.iter().flatten().zip(y.0.iter().flatten()).all(|(p, q)| (p + q).abs() < 1e-9);
        same || neg
    }

    #[test]
    fn fricke_squares_to_identity() {
        let w = GroupElement::fricke_element(N);
        assert!(w.multiply(&w).is_identity());
        assert_eq!(w.invert(), w);
    }

    #[test]
    fn hand_product() {
        let t = GroupElement::translation(N, 1);
        let l = GroupElement::new(N, 1, 0, 37, 1, false).unwrap();
        let p = t.multiply(&l);
        assert_eq!(p.integer_part(), (38, 1, 37, 1));
        assert!(!p.is_fricke());
        assert_eq!(t.multiply(&GroupElement::identity(N)), t);
    }

    #[test]
    fn invert_adjugate() {
        let g = GroupElement::new(N, 2, 1, 37, 19, false).unwrap();
        assert_eq!(g.invert().integer_part(), (19, -1, -37, 2).into_canonical());
        assert!(GroupElement::identity(N).invert().is_identity());
    }

    trait Canon {
        fn into_canonical(self) -> (i64, i64, i64, i64);
    }
    impl Canon for (i64, i64, i64, i64) {
        fn into_canonical(self) -> (i64, i64, i64, i64) {
            let g = GroupElement::canonical(N, [self.0, self.1, self.2, self.3], false);
            g.integer_part()
        }
    }

    #[test]
    fn parabolic_classification() {
        let t = GroupElement::translation(N, 1);
        assert!(t.is_parabolic().unwrap());
        let l = GroupElement::new(N, 1, 0, 37, 1, false).unwrap();
        assert!(l.is_parabolic().unwrap());
        assert!(!GroupElement::fricke_element(N).is_parabolic().unwrap());
        assert!(matches!(
            GroupElement::identity(N).is_parabolic(),
            Err(Error::IdentityInput)
        ));
    }

    #[test]
    fn level_one_fricke_is_s() {
        let s = GroupElement::fricke_element(1);
        assert!(!s.is_fricke());
        assert_eq!(s.integer_part(), (0, -1, 1, 0));
    }

    #[test]
    fn real_matrix_is_homomorphic() {
        let gens = GroupElement::standard_generators(N);
        for x in &gens {
            for y in &gens {
                let lhs = x.multiply(y).real_matrix();
                let rhs = x.real_matrix().mul(&y.real_matrix());
                assert!(close(&lhs, &rhs), "{x:?} {y:?}");
                assert!((lhs.det() - 1.0).abs() < 1e-9);
            }
        }
    }

    fn word() -> impl Strategy<Value = Vec<(usize, bool)>> {
        prop::collection::vec((0usize..5, any::<bool>()), 0..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn associativity(x in word(), y in word(), z in word()) {
            let (x, y, z) = (
                GroupElement::from_word(N, &x),
                GroupElement::from_word(N, &y),
                GroupElement::from_word(N, &z),
            );
            prop_assert_eq!(x.multiply(&y).multiply(&z), x.multiply(&y.multiply(&z)));
        }

        #[test]
        fn inverses(x in word()) {
            let x = GroupElement::from_word(N, &x);
            prop_assert!(x.multiply(&x.invert()).is_identity());
            prop_assert!(x.invert().multiply(&x).is_identity());
        }
    }
}
