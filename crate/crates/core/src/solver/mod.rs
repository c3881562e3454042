//! Time stepping of the `(N, ε, δ)` approximate system and its energy ledger.

mod config;
mod ledger;
mod run;
mod state;
mod stepper;

pub use config::{ApproxConfig, DEFAULT_CFL_BOUND};
pub use ledger::{energy_ledger_update, EnergyLedger};
pub use run::{max_mass_drift, read_ledger, run, write_ledger, LedgerRow, RunOptions, RunOutput, Snapshot, Trajectory, TrajectoryMeta};
pub use state::{check_min_principle, MinPrincipleRecord, MixtureState};
pub use stepper::{Solver, StateEnergy, StepReport};
