//! Numerical laboratory for viscous compressible two-density and bi-fluid
//! flows on the periodic torus.
//!
//! * [`constitutive`]: pressure laws, Helmholtz energies, regularization,
//!   truncations and hypothesis audits.
//! * [`bifluid`]: the pressure-equilibrium change of variables and its audit.
//! * [`spectral`]: torus grids, FFT-based differential operators and the real
//!   Fourier mode basis.
//! * [`solver`]: the IMEX Galerkin scheme, energy ledger and checkpointed runs.
//! * [`diagnostics`]: renormalization residuals, oscillation and transport
//!   defects, pressure integrability, effective viscous flux and ladders.
//! * [`cli`]: JSON-configured batch commands behind the `bifluid-lab` binary.

pub mod bifluid;
pub mod cli;
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod numerics;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
