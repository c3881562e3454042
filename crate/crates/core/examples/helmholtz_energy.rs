//! Helmholtz energy of a few pressure laws: quadrature against the closed
//! form, the defining PDE residual, and the δ-regularized energy.

use std::sync::Arc;

use bifluid_lab::constitutive::{
    helmholtz, helmholtz_fast, helmholtz_pde_residual, AdmissibleRegion, HomogeneousLaw, PressureLaw,
    RegularizedLaw, RegularizedPressureParams, Term,
};

fn main() -> bifluid_lab::Result<()> {
    let band = AdmissibleRegion::bi(0.0, 1.0)?;

    println!("power laws rho^gamma, H = (rho^gamma - rho)/(gamma - 1)");
    for gamma in [1.8, 2.0, 3.0] {
        let law = HomogeneousLaw::power(gamma, band.clone())?;
        for rho in [1e-3, 2.0, 1e3] {
            let quad = helmholtz(&law, rho, &[0.5 * rho])?;
            let exact = (rho.powf(gamma) - rho) / (gamma - 1.0);
            println!("  gamma = {gamma:<4} rho = {rho:<6e} H = {quad:<24e} rel.err = {:.1e}", ((quad - exact) / exact).abs());
        }
    }

    // separable law with a cross term
    let law: Arc<dyn PressureLaw> = Arc::new(HomogeneousLaw::separable(
        2.0,
        vec![2.0],
        vec![Term::Monomial {
            coeff: 0.5,
            rho_exp: 1.0,
            z_exps: vec![0.5],
        }],
        band,
    )?);
    println!("\n{}", law.name());
    for (rho, z) in [(0.5, 0.1), (2.0, 1.0), (10.0, 7.5)] {
        let h = helmholtz_fast(law.as_ref(), rho, &[z])?;
        let res = helmholtz_pde_residual(law.as_ref(), rho, &[z])?;
        println!("  (rho, Z) = ({rho}, {z}): H = {h:.12}, PDE residual = {res:.1e}");
    }

    let reg = RegularizedLaw::new(law, RegularizedPressureParams::new(1e-3, 6.0)?);
    println!("\nregularized (delta = 1e-3, B = 6)");
    for rho in [1e-4, 1e-2, 1.0, 5.0] {
        let z = [0.5 * rho];
        println!(
            "  rho = {rho:<6e} Pi = {:<14.6e} H = {:.6e}",
            reg.pressure(rho, &z),
            reg.energy(rho, &z)?
        );
    }
    Ok(())
}
