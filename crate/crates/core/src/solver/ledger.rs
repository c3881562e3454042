use serde::Serialize;

use super::state::MixtureState;
use super::stepper::{Solver, StateEnergy};
use crate::error::Result;

/// Running energy balance. `residual` is
/// `kinetic + helmholtz_total + dissipation_cum + eps_gradient_cum − E(0)`,
/// which vanishes for the continuous problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub time: f64,
    pub kinetic: f64,
    pub helmholtz_total: f64,
    pub dissipation_cum: f64,
    /// `∫∫ ε D²ℋ_δ(∇ρ, ∇Z⃗)`; may be negative for non-monotone laws.
    pub eps_gradient_cum: f64,
    /// Penalty share of `eps_gradient_cum`, i.e. `ε ∫∫ D²h_δ(∇ρ, ∇Z⃗) ≥ 0`.
    pub eps_penalty_cum: f64,
    pub initial_total: f64,
    pub residual: f64,
}

impl EnergyLedger {
    pub fn start(time: f64, e: &StateEnergy) -> Self {
        let total = e.kinetic + e.helmholtz;
        Self {
            time,
            kinetic: e.kinetic,
            helmholtz_total: e.helmholtz,
            dissipation_cum: 0.0,
            eps_gradient_cum: 0.0,
            eps_penalty_cum: 0.0,
            initial_total: total,
            residual: 0.0,
        }
    }

    /// Trapezoidal accumulation from `old` to `new` over `dt`.
    pub fn advance(&self, old: &StateEnergy, new: &StateEnergy, time: f64, dt: f64) -> Self {
        let trap = |a: f64, b: f64| 0.5 * dt * (a + b);
        let dissipation_cum = self.dissipation_cum + trap(old.dissipation_rate, new.dissipation_rate);
        let eps_gradient_cum = self.eps_gradient_cum + trap(old.eps_rate, new.eps_rate);
        let eps_penalty_cum = self.eps_penalty_cum + trap(old.eps_penalty_rate, new.eps_penalty_rate);
        let residual = new.kinetic + new.helmholtz + dissipation_cum + eps_gradient_cum
            - self.initial_total;
        Self {
            time,
            kinetic: new.kinetic,
            helmholtz_total: new.helmholtz,
            dissipation_cum,
            eps_gradient_cum,
            eps_penalty_cum,
            initial_total: self.initial_total,
            residual,
        }
    }
}

/// Ledger after one step from `old` to `new`, recomputing both energies.
pub fn energy_ledger_update(
    prev: &EnergyLedger,
    old: &MixtureState,
    new: &MixtureState,
    solver: &Solver,
) -> Result<EnergyLedger> {
    let eo = solver.state_energy(old)?;
    let en = solver.state_energy(new)?;
    Ok(prev.advance(&eo, &en, new.time, new.time - old.time))
}
