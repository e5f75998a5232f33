use super::*;
use crate::group::GroupElement;
use crate::special::{integrate_de, QuadOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(x: f64, y: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(x, y).unwrap()
}

fn nf() -> NewformData {
    NewformData::canonical(3000)
}

#[test]
fn oracle_examples() {
    assert_eq!(ap_oracle(2).unwrap(), -2);
    assert_eq!(ap_oracle(3).unwrap(), -3);
    assert_eq!(ap_oracle(5).unwrap(), -2);
    assert_eq!(ap_oracle(37), Err(Error::UnsupportedPrime(37)));
    assert!(ap_oracle(9).is_err());
}

#[test]
fn generated_coefficients_match_point_counts() {
    let nf = nf();
    for p in (2..200u64).filter(|&p| is_prime(p) && p != 37) {
        assert_eq!(nf.coefficient(p as usize).unwrap(), ap_oracle(p).unwrap(), "p = {p}");
    }
    assert_eq!(nf.coefficient(37), Some(-1));
    // first terms of 37a: q − 2q² − 3q³ + 2q⁴ − 2q⁵ + 6q⁶ − q⁷ + 6q⁹
    assert_eq!(&nf.coefficients()[..9], &[1, -2, -3, 2, -2, 6, -1, 0, 6]);
    assert!(nf.validate().is_ok());
}

#[test]
fn json_ingest_and_rejection() {
    let c = NewformData::canonical(300);
    let text = serde_json::json!({
        "level": 37, "fricke_eigenvalue": 1, "coefficients": c.coefficients()
    })
    .to_string();
    assert_eq!(NewformData::from_json(&text).unwrap(), c);

    let wrong_sign = serde_json::json!({
        "level": 37, "fricke_eigenvalue": -1, "coefficients": c.coefficients()
    });
    assert!(matches!(
        NewformData::from_json(&wrong_sign.to_string()),
        Err(Error::InvalidNewform(_))
    ));

    let mut bad = c.coefficients().to_vec();
    bad[5] += 1; // a_6
    assert!(NewformData::new(37, 1, bad).is_err());
    let mut bad = c.coefficients().to_vec();
    bad[40] = -bad[40]; // a_41 (prime), fails the point count
    assert!(NewformData::new(37, 1, bad).is_err());
}

#[test]
fn q_expansion_properties() {
    let nf = nf();
    let z = pt(0.17, 0.4);
    let a = nf.evaluate_f(z).unwrap();
    let b = nf.evaluate_f(pt(1.17, 0.4)).unwrap();
    assert!((a - b).norm() < 1e-13);
    assert!(nf.evaluate_f(pt(0.3, 12.0)).unwrap().norm() < 1e-30);
    assert!(nf.period_to_infinity(pt(0.3, 12.0)).unwrap().norm() < 1e-30);
    let p0 = nf.period_to_infinity(pt(0.21, 0.3)).unwrap();
    let p1 = nf.period_to_infinity(pt(-0.79, 0.3)).unwrap();
    assert!((p0 - p1).norm() < 1e-13);
}

#[test]
fn fricke_modularity() {
    // f(−1/(Nz)) = N z² f(z)
    let nf = nf();
    for z in [Complex64::new(0.0, 0.3), Complex64::new(0.1, 0.4), Complex64::new(-0.05, 0.25)] {
        let wz = -1.0 / (37.0 * z);
        let lhs = nf.evaluate_f(UpperHalfPoint::from_complex(wz).unwrap()).unwrap();
        let rhs = nf.evaluate_f(UpperHalfPoint::from_complex(z).unwrap()).unwrap() * 37.0 * z * z;
        assert!((lhs - rhs).norm() < 1e-9, "{z}: {lhs} vs {rhs}");
    }
}

#[test]
fn period_derivative_is_minus_f() {
    let nf = nf();
    let z = Complex64::new(0.1, 0.8);
    let h = 1e-4;
    let p = |w: Complex64| nf.period_to_infinity(UpperHalfPoint::from_complex(w).unwrap()).unwrap();
    let deriv = (p(z + h) - p(z - h)) / (2.0 * h);
    let f = nf.evaluate_f(UpperHalfPoint::from_complex(z).unwrap()).unwrap();
    assert!((deriv + f).norm() < 1e-6);
}

#[test]
fn truncation_errors() {
    let small = NewformData::canonical(50);
    assert!(matches!(
        small.evaluate_f(pt(0.0, 0.01)),
        Err(Error::TruncationInsufficient { .. })
    ));
}

#[test]
fn central_value_vanishes() {
    let nf = nf();
    assert!(nf.l_value_at_1().unwrap().norm() < 1e-8);
    // splitting away from the fixed point is a genuine check of the sign
    for a in [0.09, 0.2, 0.5] {
        assert!(nf.l_value_split(a).unwrap().norm() < 1e-8, "A = {a}");
    }
    let twice = NewformData::canonical(6000);
    assert!((twice.l_value_at_1().unwrap() - nf.l_value_at_1().unwrap()).norm() < 1e-10);
}

#[test]
fn central_value_by_quadrature() {
    // ∫_0^∞ f(iy) dy by quadrature; the piece below y₀ is folded with the Fricke sign
    let nf = nf();
    let y0 = 0.12;
    let f_axis = |y: f64| nf.evaluate_f(pt(0.0, y)).unwrap();
    let opts = QuadOptions::with_target(1e-12);
    let upper = integrate_de(f_axis, y0, f64::INFINITY, opts).unwrap().value;
    let lower = integrate_de(f_axis, 1.0 / (37.0 * y0), f64::INFINITY, opts).unwrap().value;
    let l1 = 2.0 * PI * (upper - lower);
    assert!(l1.norm() < 1e-8, "{l1}");
    assert!(upper.norm() > 1e-3);
}

fn random_element(rng: &mut ChaCha8Rng, max_len: usize) -> GroupElement {
    let len = rng.gen_range(1..=max_len);
    let word: Vec<(usize, bool)> = (0..len).map(|_| (rng.gen_range(0..5), rng.gen_bool(0.5))).collect();
    GroupElement::from_word(37, &word)
}

#[test]
fn symbol_basics() {
    let ms = ModularSymbols::canonical().unwrap();
    let id = GroupElement::identity(37);
    assert_eq!(ms.psi(&id).unwrap(), Complex64::new(0.0, 0.0));
    let p = GroupElement::new(37, 1, 0, 37, 1, false).unwrap();
    assert!(ms.psi(&p).unwrap().norm() < 1e-9);
    let w = GroupElement::fricke_element(37);
    assert!(ms.psi(&w).unwrap().norm() < 1e-8);
    // ψ(W) from an off-centre base point is a non-trivial check of L_f(1) = 0
    let off = ms.psi_with_base_point(&w, pt(0.05, 0.3)).unwrap();
    assert!(off.norm() < 1e-8, "{off}");
    // and the symbol is not identically zero
    assert!(ms.psi_cusp(-1, 3).unwrap().norm() > 0.1);
}

#[test]
fn manin_agrees_with_direct() {
    let ms = ModularSymbols::canonical().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 40 {
        let g = random_element(&mut rng, 4);
        let (c, _) = g.real_matrix().bottom_row();
        if c.abs() > 150.0 || c.abs() < 1e-9 {
            continue;
        }
        let (p, q) = g.image_of_infinity();
        let a = ms.psi_direct(&g).unwrap();
        let b = ms.psi_manin(p, q);
        assert!((a - b).norm() < 1e-10, "{g:?}: {a} vs {b}");
        checked += 1;
    }
}

#[test]
fn homomorphism_and_antisymmetry() {
    let ms = ModularSymbols::canonical().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let g1 = random_element(&mut rng, 6);
        let g2 = random_element(&mut rng, 6);
        let lhs = ms.psi(&g1.multiply(&g2)).unwrap();
        let rhs = ms.psi(&g1).unwrap() + ms.psi(&g2).unwrap();
        assert!((lhs - rhs).norm() < 1e-9, "{g1:?} {g2:?}");
        let inv = ms.psi(&g1.invert()).unwrap();
        assert!((inv + ms.psi(&g1).unwrap()).norm() < 1e-10);
    }
}

#[test]
fn parabolic_vanishing() {
    let ms = ModularSymbols::canonical().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = GroupElement::translation(37, 1);
    let l = GroupElement::new(37, 1, 0, 37, 1, false).unwrap();
    for i in 0..20 {
        let g = random_element(&mut rng, 4);
        let base = if i % 2 == 0 { t } else { l };
        let k = rng.gen_range(1..4i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let p = g.multiply(&base.pow(k)).multiply(&g.invert());
        assert!(p.is_parabolic().unwrap());
        assert!(ms.psi(&p).unwrap().norm() < 1e-9);
    }
}

#[test]
fn base_point_independence() {
    let ms = ModularSymbols::canonical().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 10 {
        let g = random_element(&mut rng, 3);
        let inv = g.invert().real_matrix();
        let (c, d) = inv.bottom_row();
        if c.abs() < 1e-9 || c.abs() > 12.0 {
            continue;
        }
        let z1 = pt(-d / c + 0.1 / c, 1.3 / c.abs());
        let z2 = pt(-d / c - 0.05 / c, 0.8 / c.abs());
        let a = ms.psi_with_base_point(&g, z1).unwrap();
        let b = ms.psi_with_base_point(&g, z2).unwrap();
        assert!((a - b).norm() < 1e-10);
        checked += 1;
    }
}

#[test]
fn cache_reproduces_and_counts() {
    let ms = ModularSymbols::canonical().unwrap();
    let g = GroupElement::new(37, 3, 2, 37, 25, false).unwrap();
    let first = ms.psi(&g).unwrap();
    let second = ms.psi(&g).unwrap();
    assert_eq!(first, second);
    assert_eq!(ms.cache().misses(), 1);
    assert_eq!(ms.cache().hits(), 1);
    let fresh = ms.psi_direct(&g).unwrap();
    assert!((fresh - first).norm() < 1e-10);
}

#[test]
fn cache_is_consistent_under_concurrency() {
    use rayon::prelude::*;
    let ms = ModularSymbols::canonical().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gs: Vec<_> = (0..50).map(|_| random_element(&mut rng, 5)).collect();
    let serial: Vec<_> = gs.iter().map(|g| ms.psi_manin(g.image_of_infinity().0, g.image_of_infinity().1)).collect();
    let all: Vec<_> = gs.iter().cycle().take(400).collect();
    let par: Vec<_> = all.par_iter().map(|g| ms.psi(g).unwrap()).collect();
    for (i, v) in par.iter().enumerate() {
        let (c, _) = gs[i % 50].real_matrix().bottom_row();
        let tol = if c.abs() <= 20.0 { 1e-10 } else { 0.0 };
        assert!((v - serial[i % 50]).norm() <= tol);
    }
    assert!(ms.cache().len() <= 50);
}

#[test]
fn cache_file_roundtrip_and_integrity() {
    let ms = ModularSymbols::canonical().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        ms.psi(&random_element(&mut rng, 5)).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.bin");
    save_cache(&path, ms.newform(), ms.cache()).unwrap();
    let restored = PsiCache::new();
    let n = load_cache(&path, ms.newform(), &restored).unwrap();
    assert_eq!(n, ms.cache().len());
    assert_eq!(restored.entries(), ms.cache().entries());

    assert_eq!(load_cache(&dir.path().join("absent.bin"), ms.newform(), &restored).unwrap(), 0);

    let mut bytes = std::fs::read(&path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 1;
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(load_cache(&path, ms.newform(), &PsiCache::new()), Err(Error::Io(_))));

    save_cache(&path, ms.newform(), ms.cache()).unwrap();
    let other = NewformData::canonical(2001);
    assert!(load_cache(&path, &other, &PsiCache::new()).is_err());
}

