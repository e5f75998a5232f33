use num_complex::Complex64;

use super::*;
use crate::eisenstein::{ClassicalScattering, EisensteinParams};
use crate::group::cusp_set;
use crate::newform::{ModularSymbols, ZeroSymbols};
use crate::par::Exec;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn pole_terms_have_the_stated_residues() {
    let (a, b, w) = (c(0.3, -1.2), c(-0.7, 0.4), c(2.6, 0.3));
    let n = 37.0;
    let res = pole_residues(n, a, b, w);
    for (k, p) in pole_points(w).iter().enumerate() {
        let h = 1e-7;
        let near = pole_terms(n, a, b, *p + h, w)[k] * h;
        assert!((near - res[k]).norm() < 1e-5 * res[k].norm(), "{k}: {near} vs {}", res[k]);
    }
    // s = −w gives −a, s = w − 1 gives −b
    assert_eq!(res[2], -a);
    assert_eq!(res[3], -b);
}

#[test]
fn pole_terms_satisfy_the_s_symmetry() {
    let (a, b, w) = (c(0.3, -1.2), c(-0.7, 0.4), c(2.6, 0.0));
    let n = 37.0;
    for s in [c(0.5, 0.2), c(-1.3, 0.8), c(3.1, -0.4)] {
        let lhs: Complex64 = pole_terms(n, a, b, s, w).iter().sum::<Complex64>() * c(n, 0.0).powc(s);
        let rhs: Complex64 = pole_terms(n, a, b, -s, w).iter().sum();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{s}");
    }
}

#[test]
fn degenerate_symbols_give_zero() {
    let cusp = cusp_set(1).unwrap().remove(0);
    let zero = ZeroSymbols { level: 1 };
    let classical = ClassicalScattering::new(1).unwrap();
    let l = Lambda::new(EisensteinParams::new(cusp.clone(), c(2.6, 0.0)), &zero, &classical, LambdaOptions::default())
        .unwrap();
    assert_eq!(l.continued(c(0.5, 0.3)).unwrap().total, c(0.0, 0.0));
    assert_eq!(l.direct(c(4.0, 0.0)).unwrap().total, c(0.0, 0.0));
    let grid = [GridPoint { s: c(0.5, 0.0), w: c(2.6, 0.0) }];
    let report = check_fe_s(&cusp, &grid, &zero, LambdaOptions::default(), None, Exec::Sequential).unwrap();
    assert!(report.pass);
    assert_eq!(report.max_residual(), 0.0);
}

#[test]
fn level_37_routes_and_functional_equation() {
    let cusp = cusp_set(37).unwrap().remove(0);
    let symbols = ModularSymbols::canonical().unwrap();
    let classical = ClassicalScattering::new(37).unwrap();
    let w = c(2.6, 0.0);
    let l = Lambda::new(EisensteinParams::new(cusp, w), &symbols, &classical, LambdaOptions::default()).unwrap();
    for y in [0.17, 0.3, 0.8, 2.0] {
        let (g, ge) = l.g_spectral(y).unwrap();
        let (h, t) = l.g_lattice(y).unwrap();
        assert!((g - h).norm() < 10.0 * (t + ge), "y = {y}: {g} vs {h}");
    }
    let s = c(4.2, 0.0);
    let d = l.direct(s).unwrap();
    let k = l.continued(s).unwrap();
    assert!(d.total.norm() > 1e-9, "{}", d.total);
    assert!((d.total - k.total).norm() < 1e-5 * k.total.norm(), "{} vs {}", d.total, k.total);
    let (lhs, rhs, err) = l.fe_sides(c(1.3, 0.7), 37.0).unwrap();
    assert!((lhs - rhs).norm() < 1e-5 && (lhs - rhs).norm() <= 10.0 * err, "{lhs} vs {rhs} ({err:e})");
    let (lhs, rhs, _) = l.fe_sides(c(1.3, 0.7), 38.0).unwrap();
    assert!((lhs - rhs).norm() > 1e-3 * rhs.norm());
    // spurious ε in the subtracted y^{−w} term moves the result by ε times its pole-term formula
    let eps = c(1e-3, 2e-3);
    let p = l.direct_perturbed(s, eps, c(0.0, 0.0)).unwrap();
    let formula = pole_terms(37.0, eps, c(0.0, 0.0), s, w)[2];
    assert!((p.total - d.total - formula).norm() < 1e-8 * formula.norm(), "{} vs {formula}", p.total - d.total);
}

#[test]
fn pole_guard() {
    let cusp = cusp_set(1).unwrap().remove(0);
    let zero = ZeroSymbols { level: 1 };
    let classical = ClassicalScattering::new(1).unwrap();
    let w = c(2.6, 0.0);
    let l = Lambda::new(EisensteinParams::new(cusp, w), &zero, &classical, LambdaOptions::default()).unwrap();
    assert!(matches!(l.continued(w + 1e-9), Err(crate::Error::PoleHit { .. })));
    assert!(l.continued(w + 1e-6).is_ok());
    assert!(matches!(l.direct(c(3.0, 0.0)), Err(crate::Error::ConvergenceRegion { .. })));
    assert!(l.residue_at(c(1.0, 0.0)).is_err());
}
