//! Renormalized continuity residuals and transport defects along a run.

use bifluid_lab::cli::RunConfig;
use bifluid_lab::diagnostics::{pressure_integrability, renorm_residual, renorm_residual_pair, Renormalization};
use bifluid_lab::solver::{run, RunOptions};

fn main() -> bifluid_lab::Result<()> {
    let mut cfg = RunConfig::default_problem();
    cfg.t_end = 0.2;
    let solver = cfg.solver()?;
    let out = run(&solver, cfg.initial_state(&solver)?, &RunOptions { checkpoint_every: 4, ..Default::default() })?;
    let traj = &out.trajectory;

    for b in [
        Renormalization::Identity,
        Renormalization::Power { theta: 2.0 },
        Renormalization::Truncation { k: 2.0 },
        Renormalization::Entropy,
    ] {
        let raw = renorm_residual(traj, b, false)?;
        let corrected = renorm_residual(traj, b, true)?;
        let mid = raw.len() / 2;
        println!(
            "{b:?}: L1 residual at t = {:.3}: {:.3e} raw, {:.3e} after removing the diffusion term",
            raw[mid].time, raw[mid].l1, corrected[mid].l1
        );
    }

    // b(rho, Z) = Z^2 / rho is homogeneous of degree one
    let pair = renorm_residual_pair(traj, 0, |r, z| Ok((z * z / r, -z * z / (r * r), 2.0 * z / r)), true)?;
    println!("two-density b = Z^2/rho: mid-run residual {:.3e}", pair[pair.len() / 2].l1);

    let integ = pressure_integrability(traj, solver.config().law.exponents(), 0.25)?;
    println!(
        "int int rho^(gamma+theta) = {:.6}, delta int int rho^(B+theta) = {:.3e}",
        integ.rho, integ.penalty
    );
    Ok(())
}
