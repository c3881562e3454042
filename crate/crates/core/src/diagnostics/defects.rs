use serde::Serialize;

use crate::constitutive::{fraction, TruncationKit};
use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Both trajectories must store snapshots at the same times on one grid.
pub(crate) fn check_paired(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.meta.grid != b.meta.grid {
        return Err(Error::Mismatch(format!(
            "grids differ: {:?} vs {:?}",
            a.meta.grid, b.meta.grid
        )));
    }
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::Mismatch(format!(
            "cadence mismatch: {} vs {} snapshots",
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        if (x.time - y.time).abs() > 1e-9 * x.time.abs().max(1.0) {
            return Err(Error::Mismatch(format!(
                "cadence mismatch: snapshot at t = {} vs t = {}",
                x.time, y.time
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectSample {
    pub time: f64,
    pub value: f64,
}

/// `∫ ρ |s − s_ref|^p` with `s = Z_i/ρ` (zero at vacuum), weighted by the
/// first trajectory's density.
pub fn s_transport_defect(
    traj: &Trajectory,
    reference: &Trajectory,
    species: usize,
    p: u32,
) -> Result<Vec<DefectSample>> {
    if !(1..=2).contains(&p) {
        return Err(Error::Domain(format!("p must be 1 or 2, got {p}")));
    }
    check_paired(traj, reference)?;
    if species >= traj.meta.species || species >= reference.meta.species {
        return Err(Error::Mismatch(format!("species {species} not stored")));
    }
    Ok(traj
        .snapshots
        .iter()
        .zip(&reference.snapshots)
        .map(|(a, b)| {
            let cell = a.rho.grid().cell_volume();
            let value = (0..a.rho.data().len())
                .map(|x| {
                    let r = a.rho.data()[x];
                    let s = fraction(r, a.z[species].data()[x]);
                    let s_ref = fraction(b.rho.data()[x], b.z[species].data()[x]);
                    r * (s - s_ref).abs().powi(p as i32)
                })
                .sum::<f64>()
                * cell;
            DefectSample {
                time: a.time,
                value,
            }
        })
        .collect())
}

/// Trapezoid in time over snapshot values.
pub(crate) fn time_integral(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `∫∫ |T_k(ρ_coarse) − T_k(ρ_fine)|^{γ+1}` over the stored run.
pub fn oscillation_defect(fine: &Trajectory, coarse: &Trajectory, k: f64, gamma: f64) -> Result<f64> {
    check_paired(fine, coarse)?;
    let t = TruncationKit::new(k)?;
    let e = gamma + 1.0;
    let values: Vec<f64> = fine
        .snapshots
        .iter()
        .zip(&coarse.snapshots)
        .map(|(f, c)| {
            f.rho
                .data()
                .iter()
                .zip(c.rho.data())
                .map(|(&a, &b)| (t.t(b) - t.t(a)).abs().powf(e))
                .sum::<f64>()
                * f.rho.grid().cell_volume()
        })
        .collect();
    Ok(time_integral(&fine.times(), &values))
}

/// `{2^j · median(ρ)}`, `j = 0..4`, over all stored densities; levels not
/// above 1 are dropped since the truncation needs `k > 1`.
pub fn oscillation_k_grid(traj: &Trajectory) -> Vec<f64> {
    let mut all: Vec<f64> = traj
        .snapshots
        .iter()
        .flat_map(|s| s.rho.data().iter().copied())
        .collect();
    if all.is_empty() {
        return Vec::new();
    }
    all.sort_by(f64::total_cmp);
    let median = all[all.len() / 2];
    (0..5)
        .map(|j| median * f64::from(1u32 << j))
        .filter(|&k| k > 1.0)
        .collect()
}

/// Supremum of [`oscillation_defect`] over [`oscillation_k_grid`] of the fine run.
pub fn oscillation_sup(fine: &Trajectory, coarse: &Trajectory, gamma: f64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for k in oscillation_k_grid(fine) {
        best = best.max(oscillation_defect(fine, coarse, k, gamma)?);
    }
    Ok(best)
}
