//! The completed double Dirichlet series `Λ̃(s, w)`: the Mellin transform of
//! the non-constant part of `Ẽ(iy, w; f)` in `y`, its continuation in `s`,
//! residues and the functional-equation check.

mod lambda;
mod report;

use num_complex::Complex64;
use serde::Serialize;

pub use lambda::{constant_terms, lambda_continued, lambda_direct, residue_at, Lambda, LambdaOptions};
pub use report::{check_fe_s, check_fe_with, FeRecord, FeReport, GridPoint};

/// Constant term `a(w)y^w + b(w)y^{1−w}` of `Ẽ(·, w; f)` at `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantTermPair {
    pub w: Complex64,
    /// Read off by two-height quadrature.
    pub a_w: Complex64,
    pub b_w: Complex64,
    pub extraction_error: f64,
    /// `−½φ(w;f)φ(1−w)` and `½φ(w;f)`.
    pub a_closed: Complex64,
    pub b_closed: Complex64,
}

/// One evaluation of `Λ̃(s, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaValue {
    pub s: Complex64,
    pub w: Complex64,
    pub regular_part: Complex64,
    /// Singular at `s = w`, `1 − w`, `−w`, `w − 1` in that order.
    pub pole_terms: [Complex64; 4],
    pub total: Complex64,
    pub quadrature_error: f64,
}

/// The four pole points, ordered as in [`LambdaValue::pole_terms`].
pub fn pole_points(w: Complex64) -> [Complex64; 4] {
    [w, 1.0 - w, -w, w - 1.0]
}

/// `a(√N)^{−s−w}/(s−w)`, `b(√N)^{w−1−s}/(s+w−1)`, `−a(√N)^{−s−w}/(s+w)`,
/// `−b(√N)^{−s+w−1}/(s−w+1)`.
pub fn pole_terms(level: f64, a: Complex64, b: Complex64, s: Complex64, w: Complex64) -> [Complex64; 4] {
    let r = Complex64::new(level.sqrt(), 0.0);
    [
        a * r.powc(-s - w) / (s - w),
        b * r.powc(w - 1.0 - s) / (s + w - 1.0),
        -a * r.powc(-s - w) / (s + w),
        -b * r.powc(-s + w - 1.0) / (s - w + 1.0),
    ]
}

/// Residues of the pole terms, in the same order: `aN^{−w}`, `bN^{w−1}`, `−a`, `−b`.
pub fn pole_residues(level: f64, a: Complex64, b: Complex64, w: Complex64) -> [Complex64; 4] {
    let n = Complex64::new(level, 0.0);
    [a * n.powc(-w), b * n.powc(w - 1.0), -a, -b]
}

/// `Φ(w)Λ̃(s, 1−w)`, the right side of the functional equation in `w` given the
/// scattering factor `Φ(w)` and a value at `1 − w`. Never evaluated by the
/// library: `Λ̃(s, 1−w)` needs `w`-continuation, which is not provided.
pub fn fe_w_rhs(phi_w: Complex64, lambda_one_minus_w: Complex64) -> Complex64 {
    phi_w * lambda_one_minus_w
}

#[cfg(test)]
mod tests;
