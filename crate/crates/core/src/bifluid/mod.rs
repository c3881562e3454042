//! Real two-phase flow rewritten as an academic two-density system.

pub mod audit;
pub mod effective;
pub mod phase;
pub mod system;
pub mod table;

pub use audit::audit_bifluid;
pub use effective::{uniform_fraction_bound, EffectivePressure};
pub use phase::{PhaseLaw, PhaseSpec, PowerPhase};
pub use system::{BiFluidSystem, PhaseDecomposition, DEFAULT_ROOT_TOLERANCE};
pub use table::{bifluid_table, write_table, TableRow};
