//! Proof-tracking monitors evaluated on stored trajectories, and refinement ladders.

mod defects;
mod flux;
mod integrability;
mod renorm;
mod study;

pub use defects::{oscillation_defect, oscillation_k_grid, oscillation_sup, s_transport_defect, DefectSample};
pub use flux::{covariance, effective_flux_field, effective_viscous_flux, flux_correlation_series, FluxSample};
pub use integrability::{pressure_integrability, PressureIntegrability};
pub use renorm::{renorm_residual, renorm_residual_pair, Renormalization, ResidualSample};
pub use study::{run_ladder, validate_ladder, LadderAxis, LadderRun, RefinementStudy, StudyRow};
