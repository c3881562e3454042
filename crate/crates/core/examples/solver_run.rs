//! Runs the reference smooth problem and prints the energy ledger and the
//! minimum-principle monitors.

use bifluid_lab::cli::RunConfig;
use bifluid_lab::solver::{run, RunOptions};

fn main() -> bifluid_lab::Result<()> {
    let mut cfg = RunConfig::default_problem();
    cfg.t_end = 0.25;
    let solver = cfg.solver()?;
    let initial = cfg.initial_state(&solver)?;
    let out = run(&solver, initial, &RunOptions::default())?;

    println!("{:>5} {:>8} {:>12} {:>12} {:>12} {:>12} {:>10}", "step", "t", "kinetic", "helmholtz", "dissipated", "residual", "inf rho");
    for row in out.rows.iter().step_by(10) {
        let l = &row.ledger;
        println!(
            "{:>5} {:>8.4} {:>12.6} {:>12.6} {:>12.6} {:>12.3e} {:>10.6}",
            row.step, l.time, l.kinetic, l.helmholtz_total, l.dissipation_cum, l.residual, row.monitor.inf_rho
        );
    }
    println!("max relative mass drift per step: {:.1e}", out.max_mass_drift);
    println!("snapshots kept: {}", out.trajectory.snapshots.len());
    Ok(())
}

