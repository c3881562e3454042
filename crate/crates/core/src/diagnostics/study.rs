use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::defects::{oscillation_sup, s_transport_defect, time_integral};
use super::flux::flux_correlation_series;
use super::integrability::pressure_integrability;
use crate::constitutive::{Exponents, RegularizedLaw};
use crate::error::{Error, Result};
use crate::numerics::log_log_slope;
use crate::solver::{LedgerRow, Trajectory};

/// The parameter varied along a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderAxis {
    Epsilon,
    Delta,
    Dt,
    /// Grid points per axis.
    N,
}

impl LadderAxis {
    pub fn name(self) -> &'static str {
        match self {
            LadderAxis::Epsilon => "epsilon",
            LadderAxis::Delta => "delta",
            LadderAxis::Dt => "dt",
            LadderAxis::N => "n",
        }
    }

    /// Index of the run closest to the limit object.
    fn finest(self, values: &[f64]) -> usize {
        let cmp = |a: &(usize, &f64), b: &(usize, &f64)| a.1.total_cmp(b.1);
        let it = values.iter().enumerate();
        match self {
            LadderAxis::N => it.max_by(cmp),
            _ => it.min_by(cmp),
        }
        .map(|(i, _)| i)
        .unwrap_or(0)
    }
}

/// One finished ladder run.
#[derive(Debug, Clone)]
pub struct LadderRun {
    pub value: f64,
    pub trajectory: Trajectory,
    pub rows: Vec<LedgerRow>,
    pub max_mass_drift: f64,
    pub law: RegularizedLaw,
    pub exponents: Exponents,
}

/// Monitored scalars of one ladder point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub value: f64,
    pub final_residual: f64,
    pub min_inf_rho: f64,
    pub max_band_defect: f64,
    pub max_mass_drift: f64,
    pub rho_gamma_theta: f64,
    pub z_beta_theta: Vec<f64>,
    pub delta_rho_b_theta: f64,
    pub flux_corr_mean: f64,
    pub flux_corr_final: f64,
    pub flux_corr_max_abs: f64,
    /// Against the finest run; `None` when grids or cadences differ.
    pub osc_defect: Option<f64>,
    /// Terminal `∫ρ|s − s_ref|²` against the finest run.
    pub s_defect: Option<f64>,
}

/// Ladder results with fitted log-log slopes (absent for a single point).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub axis: LadderAxis,
    pub theta: f64,
    pub truncation_level: f64,
    pub rows: Vec<StudyRow>,
    /// Slope of `|final_residual|` against the ladder value.
    pub residual_slope: Option<f64>,
    /// Slope of `δ∫∫ρ^{B+Θ}` against the ladder value.
    pub penalty_slope: Option<f64>,
}

/// Ladder values must be strictly monotone and positive.
pub fn validate_ladder(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config("ladder needs at least one value".into()));
    }
    if values.iter().any(|v| !(v > &0.0 && v.is_finite())) {
        return Err(Error::Config(format!("ladder values must be positive: {values:?}")));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::Config(format!("ladder is not strictly monotone: {values:?}")));
    }
    Ok(())
}

/// Runs `build` for every ladder value on at most `jobs` threads; results keep ladder order.
pub fn run_ladder<F>(values: &[f64], jobs: usize, build: F) -> Result<Vec<LadderRun>>
where
    F: Fn(usize, f64) -> Result<LadderRun> + Sync,
{
    validate_ladder(values)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| build(i, v))
            .collect()
    })
}

impl RefinementStudy {
    pub fn from_runs(axis: LadderAxis, theta: f64, truncation_level: f64, runs: &[LadderRun]) -> Result<Self> {
        let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
        validate_ladder(&values)?;
        let finest = &runs[axis.finest(&values)];
        let mut rows = Vec::with_capacity(runs.len());
        for run in runs {
            let traj = &run.trajectory;
            let last = run.rows.last().expect("ledger has the initial row");
            let integ = pressure_integrability(traj, &run.exponents, theta)?;
            let flux = flux_correlation_series(traj, &run.law, truncation_level)?;
            let corr: Vec<f64> = flux.iter().map(|f| f.correlation).collect();
            let times = traj.times();
            let span = times.last().copied().unwrap_or(0.0) - times[0];
            let flux_corr_mean = if span > 0.0 {
                time_integral(&times, &corr) / span
            } else {
                corr[0]
            };
            let paired = traj.meta.grid == finest.trajectory.meta.grid
                && traj.snapshots.len() == finest.trajectory.snapshots.len();
            let (osc_defect, s_defect) = if paired {
                let osc = oscillation_sup(&finest.trajectory, traj, run.exponents.gamma)?;
                let s = s_transport_defect(traj, &finest.trajectory, 0, 2)?;
                (Some(osc), s.last().map(|d| d.value))
            } else {
                (None, None)
            };
            rows.push(StudyRow {
                value: run.value,
                final_residual: last.ledger.residual,
                min_inf_rho: run
                    .rows
                    .iter()
                    .map(|r| r.monitor.inf_rho)
                    .fold(f64::INFINITY, f64::min),
                max_band_defect: run
                    .rows
                    .iter()
                    .map(|r| r.monitor.max_sup_defect())
                    .fold(0.0, f64::max),
                max_mass_drift: run.max_mass_drift,
                rho_gamma_theta: integ.rho,
                z_beta_theta: integ.z,
                delta_rho_b_theta: integ.penalty,
                flux_corr_mean,
                flux_corr_final: *corr.last().expect("at least one snapshot"),
                flux_corr_max_abs: corr.iter().fold(0.0, |m: f64, c| m.max(c.abs())),
                osc_defect,
                s_defect,
            });
        }
        let abs_res: Vec<f64> = rows.iter().map(|r| r.final_residual.abs()).collect();
        let pen: Vec<f64> = rows.iter().map(|r| r.delta_rho_b_theta).collect();
        let slope = |ys: &[f64]| {
            if values.len() < 2 {
                None
            } else {
                log_log_slope(&values, ys)
            }
        };
        Ok(Self {
            axis,
            theta,
            truncation_level,
            residual_slope: slope(&abs_res),
            penalty_slope: slope(&pen),
            rows,
        })
    }

    /// One CSV row per ladder value; slope columns repeat the ladder-wide fit
    /// and are empty when it is undefined.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let species = self.rows.first().map_or(0, |r| r.z_beta_theta.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = [
            "axis",
            "value",
            "final_residual",
            "min_inf_rho",
            "max_band_defect",
            "max_mass_drift",
            "rho_gamma_theta",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=species).map(|i| format!("z{i}_beta_theta")));
        header.extend(
            [
                "delta_rho_b_theta",
                "flux_corr_mean",
                "flux_corr_final",
                "flux_corr_max_abs",
                "osc_defect",
                "s_defect",
                "residual_slope",
                "penalty_slope",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        w.write_record(&header)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![
                self.axis.name().to_string(),
                r.value.to_string(),
                r.final_residual.to_string(),
                r.min_inf_rho.to_string(),
                r.max_band_defect.to_string(),
                r.max_mass_drift.to_string(),
                r.rho_gamma_theta.to_string(),
            ];
            rec.extend(r.z_beta_theta.iter().map(|v| v.to_string()));
            rec.extend([
                r.delta_rho_b_theta.to_string(),
                r.flux_corr_mean.to_string(),
                r.flux_corr_final.to_string(),
                r.flux_corr_max_abs.to_string(),
                opt(r.osc_defect),
                opt(r.s_defect),
                opt(self.residual_slope),
                opt(self.penalty_slope),
            ]);
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("study.csv", e))?;
        Ok(())
    }
}
