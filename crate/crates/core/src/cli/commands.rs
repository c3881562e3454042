use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{load_json, AuditConfig, RunConfig, StudyConfig, TableConfig};
use crate::bifluid::{audit_bifluid, bifluid_table, write_table, EffectivePressure};
use crate::constitutive::{audit_hypotheses, HypothesisReport, Verdict};
use crate::diagnostics::{run_ladder, LadderRun, RefinementStudy};
use crate::error::{Error, Result};
use crate::solver::{max_mass_drift, read_ledger, run, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;
pub const EXIT_AUDIT_FAIL: i32 = 3;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Global {
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub quiet: bool,
}

impl Global {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Written next to the ledger of every run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    /// `completed` or `blow_up`.
    pub status: String,
    pub steps: usize,
    pub final_time: f64,
    pub final_residual: f64,
    pub max_mass_drift: f64,
    pub min_inf_rho: f64,
    pub max_band_defect: f64,
    pub blow_up: Option<String>,
}

/// Runs one configuration, writing `config.json`, `ledger.csv`,
/// `checkpoints/` and `summary.json` under `out`.
pub fn cmd_run(cfg: &RunConfig, out: &Path, g: &Global) -> Result<RunSummary> {
    let solver = cfg.solver()?;
    let initial = cfg.initial_state(&solver)?;
    create_dir(out)?;
    write_text(&out.join("config.json"), &to_json(cfg)?)?;
    let opts = cfg.run_options(Some(out.to_path_buf()));
    g.say(format!(
        "run: {} steps of dt = {} on {}^{}",
        solver.config().steps(),
        cfg.dt,
        cfg.grid.points_per_axis,
        cfg.grid.dimension
    ));
    let summary = match run(&solver, initial, &opts) {
        Ok(o) => summarize(&o.rows, o.max_mass_drift, None),
        Err(Error::BlowUp { time, detail }) => {
            let rows = read_ledger(&out.join("ledger.csv"), cfg.band_threshold)?;
            let mut s = summarize(&rows, max_mass_drift(&rows), Some(format!("t = {time}: {detail}")));
            s.final_time = time;
            write_text(&out.join("summary.json"), &to_json(&s)?)?;
            return Err(Error::BlowUp { time, detail });
        }
        Err(e) => return Err(e),
    };
    write_text(&out.join("summary.json"), &to_json(&summary)?)?;
    g.say(format!(
        "run: t = {}, residual = {:e}, max mass drift = {:e}",
        summary.final_time, summary.final_residual, summary.max_mass_drift
    ));
    Ok(summary)
}

fn summarize(rows: &[crate::solver::LedgerRow], drift: f64, blow_up: Option<String>) -> RunSummary {
    let last = rows.last().expect("ledger has the initial row");
    RunSummary {
        status: if blow_up.is_some() { "blow_up" } else { "completed" }.into(),
        steps: last.step,
        final_time: last.ledger.time,
        final_residual: last.ledger.residual,
        max_mass_drift: drift,
        min_inf_rho: rows.iter().map(|r| r.monitor.inf_rho).fold(f64::INFINITY, f64::min),
        max_band_defect: rows.iter().map(|r| r.monitor.max_sup_defect()).fold(0.0, f64::max),
        blow_up,
    }
}

/// Audit result: one report for a plain law, two (transform and effective
/// law) for a bi-fluid law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditOutput {
    pub verdict: Verdict,
    pub reports: Vec<HypothesisReport>,
}

pub fn audit(cfg: &AuditConfig) -> Result<AuditOutput> {
    let mut reports = Vec::new();
    if let Some(sys) = cfg.law.bifluid_system(cfg.region.clone())? {
        let sys = std::sync::Arc::new(sys);
        reports.push(audit_bifluid(&sys, &cfg.sampling));
        // A failed exponent check can make the effective law unbuildable; the
        // transform report already carries the witness then.
        if let Ok(eff) = EffectivePressure::new(sys) {
            reports.push(audit_hypotheses(&eff, &cfg.sampling));
        }
    } else {
        let law = cfg.law.build(cfg.region.clone())?;
        reports.push(audit_hypotheses(law.as_ref(), &cfg.sampling));
    }
    let verdict = reports.iter().fold(Verdict::Pass, |v, r| v.and(r.verdict));
    Ok(AuditOutput { verdict, reports })
}

/// Writes `report.json`; exit status follows the verdict.
pub fn cmd_audit(cfg: &AuditConfig, out: &Path, g: &Global) -> Result<AuditOutput> {
    let result = audit(cfg)?;
    create_dir(out)?;
    write_text(&out.join("report.json"), &to_json(&result)?)?;
    for r in &result.reports {
        g.say(format!("audit {}: {:?}", r.subject, r.verdict));
        for c in r.failures() {
            g.say(format!("  FAIL {}: {}", c.id, c.description));
        }
    }
    Ok(result)
}

/// Writes `table.csv` with columns `rho,Z,rho_plus,a_frac,P`.
pub fn cmd_bifluid_table(cfg: &TableConfig, out: &Path, g: &Global) -> Result<usize> {
    let sys = cfg
        .law
        .bifluid_system(cfg.region.clone())?
        .ok_or_else(|| Error::Config("bifluid-table needs a law of kind \"bifluid\"".into()))?;
    let rows = bifluid_table(&sys, &cfg.rho.values()?, &cfg.z.values()?)?;
    create_dir(out)?;
    let path = out.join("table.csv");
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_table(&rows, std::io::BufWriter::new(file))?;
    g.say(format!("bifluid-table: {} rows -> {}", rows.len(), path.display()));
    Ok(rows.len())
}

fn ladder_config(cfg: &StudyConfig, value: f64) -> Result<RunConfig> {
    let mut run_cfg = cfg.base.with_axis(cfg.axis, value)?;
    if let Some(interval) = cfg.snapshot_interval {
        let every = (interval / run_cfg.dt).round();
        if !(every >= 1.0) || ((every * run_cfg.dt - interval) / interval).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "snapshot interval {interval} is not a multiple of dt = {}",
                run_cfg.dt
            )));
        }
        run_cfg.checkpoint_every = every as usize;
    }
    Ok(run_cfg)
}

/// Runs (or reloads) every ladder point and writes `study.csv` and
/// `study.json`; the runs themselves land in `run_<i>/`.
pub fn cmd_study(cfg: &StudyConfig, out: &Path, g: &Global) -> Result<RefinementStudy> {
    if let Some(dir) = &cfg.reuse {
        if !dir.is_dir() {
            return Err(Error::Config(format!("reuse directory {} does not exist", dir.display())));
        }
    }
    // Fail on a bad ladder before any run starts.
    for &v in &cfg.values {
        ladder_config(cfg, v)?.approx_config()?;
    }
    create_dir(out)?;
    let quiet = Global {
        quiet: true,
        ..g.clone()
    };
    let runs = run_ladder(&cfg.values, g.jobs.max(1), |i, value| -> Result<LadderRun> {
        let run_cfg = ladder_config(cfg, value)?;
        let solver = run_cfg.solver()?;
        let law = solver.law().clone();
        let exponents = solver.config().law.exponents().clone();
        let (trajectory, rows) = match &cfg.reuse {
            Some(dir) => {
                let rdir = dir.join(format!("run_{i}"));
                let ckpt = rdir.join("checkpoints");
                if !ckpt.is_dir() {
                    return Err(Error::Config(format!("missing checkpoint directory {}", ckpt.display())));
                }
                (
                    Trajectory::load(&ckpt)?,
                    read_ledger(&rdir.join("ledger.csv"), run_cfg.band_threshold)?,
                )
            }
            None => {
                let rdir = out.join(format!("run_{i}"));
                cmd_run(&run_cfg, &rdir, &quiet)?;
                (
                    Trajectory::load(&rdir.join("checkpoints"))?,
                    read_ledger(&rdir.join("ledger.csv"), run_cfg.band_threshold)?,
                )
            }
        };
        g.say(format!("study: {} = {value} done", cfg.axis.name()));
        Ok(LadderRun {
            value,
            max_mass_drift: max_mass_drift(&rows),
            trajectory,
            rows,
            law,
            exponents,
        })
    })?;
    let study = RefinementStudy::from_runs(cfg.axis, cfg.theta, cfg.truncation_level, &runs)?;
    let path = out.join("study.csv");
    let mut buf = Vec::new();
    study.write_csv(&mut buf)?;
    write_text(&path, std::str::from_utf8(&buf).expect("csv is utf-8"))?;
    write_text(&out.join("study.json"), &to_json(&study)?)?;
    g.say(format!("study: {} rows -> {}", study.rows.len(), path.display()));
    Ok(study)
}

/// Exit status for an error surfaced by a subcommand.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        _ => EXIT_CONFIG,
    }
}

pub(crate) fn report_error(e: &Error) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "error: {e}");
}

/// Loads a config or falls back to a default.
pub(crate) fn load_or<T: serde::de::DeserializeOwned>(path: Option<&Path>, default: impl FnOnce() -> Result<T>) -> Result<T> {
    match path {
        Some(p) => load_json(p),
        None => default(),
    }
}
