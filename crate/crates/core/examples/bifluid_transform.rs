//! The pressure-equilibrium change of variables: solve for the phase
//! densities, recover the volume fraction and tabulate the effective law.

use std::sync::Arc;

use bifluid_lab::bifluid::{bifluid_table, write_table, BiFluidSystem, EffectivePressure, PowerPhase};
use bifluid_lab::constitutive::{AdmissibleRegion, PressureLaw};

fn main() -> bifluid_lab::Result<()> {
    let sys = Arc::new(BiFluidSystem::new(
        Arc::new(PowerPhase::pure(1.8)?),
        Arc::new(PowerPhase::pure(1.5)?),
        AdmissibleRegion::bi(0.0, 1.0)?,
    )?);

    for (rho, z) in [(1.0, 0.0), (1.0, 0.5), (0.2, 3.0), (0.0, 2.0)] {
        let ph = sys.recover_phases(rho, z)?;
        println!(
            "rho = {rho:<4} Z = {z:<4} -> a = {:.6}, rho+ = {:.6}, rho- = {:.6}",
            ph.a_frac, ph.rho_plus, ph.rho_minus
        );
        if rho > 0.0 && z > 0.0 {
            let (dr, dz) = sys.rho_plus_partials(rho, z)?;
            println!("    d rho+/d rho = {dr:.6}, d rho+/dZ = {dz:.6}");
        }
    }

    let eff = EffectivePressure::new(sys.clone())?;
    println!("\neffective law {} with exponents {:?}", eff.name(), eff.exponents());

    let axis: Vec<f64> = (0..4).map(|j| 10f64.powi(j - 1)).collect();
    let rows = bifluid_table(&sys, &axis, &axis)?;
    println!();
    write_table(&rows, std::io::stdout().lock())
}
