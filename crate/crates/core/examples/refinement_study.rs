//! A delta ladder through the batch front end: three runs in parallel, then
//! the refinement table.

use bifluid_lab::cli::{cmd_study, Global, RunConfig, StudyConfig};
use bifluid_lab::diagnostics::LadderAxis;
use bifluid_lab::spectral::GridSpec;

fn main() -> bifluid_lab::Result<()> {
    let mut base = RunConfig::default_problem();
    base.grid = GridSpec {
        dimension: 2,
        points_per_axis: 16,
    };
    base.n_modes = 60;
    base.dt = 5e-3;
    base.t_end = 0.2;
    let study = StudyConfig {
        base,
        axis: LadderAxis::Delta,
        values: vec![1e-2, 1e-3, 1e-4],
        theta: 0.25,
        truncation_level: 2.0,
        snapshot_interval: Some(0.02),
        reuse: None,
    };
    let out = std::env::temp_dir().join("bifluid-lab-refinement-study");
    let g = Global {
        out: Some(out.clone()),
        jobs: 3,
        quiet: true,
    };
    let result = cmd_study(&study, &out, &g)?;
    println!("{:>8} {:>14} {:>16} {:>14}", "delta", "int rho^g+t", "delta int rho^B+t", "flux cov");
    for r in &result.rows {
        println!(
            "{:>8.0e} {:>14.6} {:>16.3e} {:>14.6}",
            r.value, r.rho_gamma_theta, r.delta_rho_b_theta, r.flux_corr_mean
        );
    }
    println!("penalty slope in delta: {:?}", result.penalty_slope);
    println!("artifacts in {}", out.display());
    Ok(())
}
