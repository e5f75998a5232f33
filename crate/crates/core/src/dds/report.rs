use num_complex::Complex64;
use serde::Serialize;

use super::lambda::{Lambda, LambdaOptions};
use crate::eisenstein::{ClassicalScattering, EisensteinParams};
use crate::error::{Error, Result};
use crate::group::CuspData;
use crate::newform::SymbolSource;
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub s: Complex64,
    pub w: Complex64,
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeRecord {
    pub identity: String,
    pub grid_point: GridPoint,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the evaluation itself failed; the record then fails.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeReport {
    pub level: u64,
    /// Level used in the `N^s` prefactor; differs from `level` only in the
    /// sensitivity control.
    pub prefactor_level: f64,
    pub records: Vec<FeRecord>,
    pub pass: bool,
}

impl FeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// `|N^s Λ̃(s, w) − Λ̃(−s, w)|` over a grid, tolerance ten times the combined
/// quadrature error of both sides.
///
/// `prefactor_level` replaces `N` in `N^s` only (pass `None` for the real check).
pub fn check_fe_s(
    cusp: &CuspData,
    grid: &[GridPoint],
    symbols: &dyn SymbolSource,
    opts: LambdaOptions,
    prefactor_level: Option<f64>,
    exec: Exec,
) -> Result<FeReport> {
    let classical = ClassicalScattering::new(cusp.level)?;
    let pre = prefactor_level.unwrap_or(cusp.level as f64);
    let mut ws: Vec<Complex64> = Vec::new();
    for g in grid {
        if !ws.contains(&g.w) {
            ws.push(g.w);
        }
    }
    let lambdas: Vec<Result<Lambda<'_>>> = ws
        .iter()
        .map(|&w| Lambda::new(EisensteinParams::new(cusp.clone(), w).with_exec(exec), symbols, &classical, opts))
        .collect();
    let records = par::map(exec, grid, |g| {
        let idx = ws.iter().position(|w| *w == g.w).expect("collected above");
        match &lambdas[idx] {
            Ok(l) => record(l, g.s, pre),
            Err(e) => failed(*g, e),
        }
    });
    let pass = !records.is_empty() && records.iter().all(|r| r.pass);
    Ok(FeReport {
        level: cusp.level,
        prefactor_level: pre,
        records,
        pass,
    })
}

/// [`check_fe_s`] for the `s`-values of one prepared [`Lambda`].
pub fn check_fe_with(lambda: &Lambda<'_>, s_values: &[Complex64], prefactor_level: Option<f64>, exec: Exec) -> FeReport {
    let pre = prefactor_level.unwrap_or(lambda.level() as f64);
    let records = par::map(exec, s_values, |&s| record(lambda, s, pre));
    let pass = !records.is_empty() && records.iter().all(|r| r.pass);
    FeReport {
        level: lambda.level(),
        prefactor_level: pre,
        records,
        pass,
    }
}

const IDENTITY: &str = "N^s Λ(s,w) = Λ(-s,w)";

fn record(lambda: &Lambda<'_>, s: Complex64, pre: f64) -> FeRecord {
    let point = GridPoint { s, w: lambda.w() };
    match lambda.fe_sides(s, pre) {
        Ok((lhs, rhs, err)) => {
            let residual = (lhs - rhs).norm();
            let tolerance = 10.0 * err;
            FeRecord {
                identity: IDENTITY.to_string(),
                grid_point: point,
                lhs,
                rhs,
                residual,
                tolerance,
                pass: residual <= tolerance,
                error: None,
            }
        }
        Err(e) => failed(point, &e),
    }
}

fn failed(point: GridPoint, e: &Error) -> FeRecord {
    FeRecord {
        identity: IDENTITY.to_string(),
        grid_point: point,
        lhs: Complex64::new(f64::NAN, f64::NAN),
        rhs: Complex64::new(f64::NAN, f64::NAN),
        residual: f64::INFINITY,
        tolerance: 0.0,
        pass: false,
        error: Some(e.to_string()),
    }
}
