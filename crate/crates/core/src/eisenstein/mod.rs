//! Classical and twisted Eisenstein series at the cusp `∞` of `Γ*`, their
//! Fourier coefficients by two methods, scattering data and the completed series.

mod completed;
mod fourier;
pub mod kernel;
mod scattering;
mod series;

pub use completed::{eval_completed, CompletedData, CompletedSeries};
pub use fourier::{
    fourier_quadrature, fourier_series, fourier_series_many, kloosterman_classical,
    kloosterman_twisted, series_prefactor, CoefficientMethod, FourierCoefficient, TableRow,
    QUADRATURE_POINTS,
};
pub use scattering::{
    derive_closed_form, scattering, scattering_twisted, validation_grid, ClassicalScattering,
    ClosedForm, ContinuationCertificate, DirectScattering, ScatteringData, ScatteringKind,
    DIRECT_SIEVE, VALIDATION_TOL,
};
pub use series::{
    coset_tail, eval_classical, eval_classical_many, eval_twisted, eval_twisted_many,
    EisensteinParams, Envelope, SeriesValue,
};
