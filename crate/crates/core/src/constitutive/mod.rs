//! Pressure laws, Helmholtz energies, δ-regularization, truncations and
//! hypothesis audits.

pub mod audit;
pub mod catalog;
pub mod helmholtz;
pub mod law;
pub mod region;
pub mod regularize;
pub mod report;
pub mod truncation;

pub use audit::audit_hypotheses;
pub use catalog::{HomogeneousLaw, LawSpec, OscillatingLaw, Term};
pub use helmholtz::{helmholtz, helmholtz_fast, helmholtz_gradient, helmholtz_pde_residual, helmholtz_with};
pub use law::{bogovskii_gain, decompose_pressure, eval_pressure, Decomposed, Exponents, PressureLaw};
pub use region::{fraction, fractions, AdmissibleRegion};
pub use regularize::{
    cutoff, cutoff_slope, regularized_helmholtz, regularized_pressure, CutoffPressure,
    RegularizedLaw, RegularizedPressureParams,
};
pub use report::{Check, HypothesisReport, SamplingSpec, Verdict, Witness};
pub use truncation::TruncationKit;
