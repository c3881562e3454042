use serde::Serialize;

use super::defects::time_integral;
use crate::constitutive::{bogovskii_gain, Exponents};
use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Space-time integrals controlled by the Bogovskii test-function estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureIntegrability {
    pub theta: f64,
    /// `∫∫ ρ^{γ+Θ}`
    pub rho: f64,
    /// `∫∫ Z_i^{β_i+Θ}` per species.
    pub z: Vec<f64>,
    /// `δ ∫∫ ρ^{B+Θ}`
    pub penalty: f64,
}

/// Requires `0 < Θ ≤ min{2γ/3 − 1, γ/2}`.
pub fn pressure_integrability(
    traj: &Trajectory,
    exponents: &Exponents,
    theta: f64,
) -> Result<PressureIntegrability> {
    let gain = bogovskii_gain(exponents.gamma);
    if !(theta > 0.0 && theta <= gain) {
        return Err(Error::Domain(format!(
            "Theta = {theta} must lie in (0, gamma_BOG] with gamma_BOG = min{{2 gamma/3 - 1, gamma/2}} = {gain}"
        )));
    }
    if exponents.beta.len() != traj.meta.species {
        return Err(Error::Mismatch(format!(
            "{} beta exponents for {} species",
            exponents.beta.len(),
            traj.meta.species
        )));
    }
    let times = traj.times();
    let space = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..traj.snapshots.len()).map(f).collect()
    };
    let power_integral = |m: usize, which: Option<usize>, e: f64| -> f64 {
        let s = &traj.snapshots[m];
        let field = match which {
            None => &s.rho,
            Some(i) => &s.z[i],
        };
        field.data().iter().map(|v| v.powf(e)).sum::<f64>() * field.grid().cell_volume()
    };
    let rho = time_integral(&times, &space(&|m| power_integral(m, None, exponents.gamma + theta)));
    let z = exponents
        .beta
        .iter()
        .enumerate()
        .map(|(i, b)| time_integral(&times, &space(&|m| power_integral(m, Some(i), b + theta))))
        .collect();
    let b = traj.meta.b_exponent;
    let penalty =
        traj.meta.delta * time_integral(&times, &space(&|m| power_integral(m, None, b + theta)));
    Ok(PressureIntegrability {
        theta,
        rho,
        z,
        penalty,
    })
}
