use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ledger::EnergyLedger;
use super::state::{check_min_principle, MinPrincipleRecord, MixtureState};
use super::stepper::{Solver, StepReport};
use crate::error::{Error, Result};
use crate::spectral::{read_field, write_field, Field, GridSpec, TorusGrid, VectorField};

/// Stored fields at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub rho: Field,
    pub z: Vec<Field>,
    pub u: VectorField,
}

/// Parameters a diagnostic needs to interpret a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryMeta {
    pub grid: GridSpec,
    pub dt: f64,
    /// Steps between consecutive snapshots.
    pub cadence: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub lambda: f64,
    pub delta: f64,
    pub b_exponent: f64,
    pub n_modes: usize,
    pub species: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub snapshots: Vec<Snapshot>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointEntry {
    step: usize,
    time: f64,
    rho: String,
    z: Vec<String>,
    u: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    meta: TrajectoryMeta,
    checkpoints: Vec<CheckpointEntry>,
}

const MANIFEST: &str = "trajectory.json";

impl Trajectory {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::from_spec(self.meta.grid)
    }

    /// Time between snapshots.
    pub fn spacing(&self) -> f64 {
        self.meta.dt * self.meta.cadence as f64
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    /// Loads a checkpoint directory written by [`run`].
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        let read = |name: &str| read_field(&dir.join(name)).map(|(_, f)| f);
        let mut snapshots = Vec::with_capacity(manifest.checkpoints.len());
        for c in &manifest.checkpoints {
            snapshots.push(Snapshot {
                step: c.step,
                time: c.time,
                rho: read(&c.rho)?,
                z: c.z.iter().map(|n| read(n)).collect::<Result<_>>()?,
                u: VectorField::new(c.u.iter().map(|n| read(n)).collect::<Result<_>>()?)?,
            });
        }
        Ok(Self {
            meta: manifest.meta,
            snapshots,
        })
    }
}

/// Output and monitoring options for [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Snapshot every this many steps (the initial and final states are always kept).
    pub checkpoint_every: usize,
    /// Writes `ledger.csv` and `checkpoints/` here when set.
    pub out_dir: Option<PathBuf>,
    /// Band-defect threshold of the minimum-principle monitor.
    pub band_threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            checkpoint_every: 10,
            out_dir: None,
            band_threshold: 1e-8,
        }
    }
}

/// One ledger line.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub step: usize,
    pub ledger: EnergyLedger,
    pub monitor: MinPrincipleRecord,
    pub mass_rho: f64,
    pub mass_z: Vec<f64>,
    pub report: Option<StepReport>,
}

impl LedgerRow {
    fn header(species: usize) -> Vec<String> {
        let mut h: Vec<String> = [
            "step",
            "time",
            "kinetic",
            "helmholtz",
            "dissipation_cum",
            "eps_gradient_cum",
            "eps_penalty_cum",
            "residual",
            "inf_rho",
            "band_defect_sup",
            "band_defect_l1",
            "mass_rho",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend((1..=species).map(|i| format!("mass_z{i}")));
        h.extend(["cfl", "cg_iterations", "galerkin_residual"].iter().map(|s| s.to_string()));
        h
    }

    fn record(&self) -> Vec<String> {
        let l = &self.ledger;
        let mut r = vec![
            self.step.to_string(),
            l.time.to_string(),
            l.kinetic.to_string(),
            l.helmholtz_total.to_string(),
            l.dissipation_cum.to_string(),
            l.eps_gradient_cum.to_string(),
            l.eps_penalty_cum.to_string(),
            l.residual.to_string(),
            self.monitor.inf_rho.to_string(),
            self.monitor.max_sup_defect().to_string(),
            self.monitor.max_l1_defect().to_string(),
            self.mass_rho.to_string(),
        ];
        r.extend(self.mass_z.iter().map(|m| m.to_string()));
        match &self.report {
            Some(s) => r.extend([
                s.cfl.to_string(),
                s.cg_iterations.to_string(),
                s.galerkin_residual.to_string(),
            ]),
            None => r.extend([String::new(), String::new(), String::new()]),
        }
        r
    }
}

/// Largest relative change of any total mass between two rows.
fn mass_drift(prev: &LedgerRow, row: &LedgerRow) -> f64 {
    std::iter::once((prev.mass_rho, row.mass_rho))
        .chain(prev.mass_z.iter().copied().zip(row.mass_z.iter().copied()))
        .map(|(a, b)| ((b - a) / a.abs().max(f64::MIN_POSITIVE)).abs())
        .fold(0.0, f64::max)
}

/// Largest per-step mass drift over a ledger.
pub fn max_mass_drift(rows: &[LedgerRow]) -> f64 {
    rows.windows(2).map(|w| mass_drift(&w[0], &w[1])).fold(0.0, f64::max)
}

/// Reads a ledger written by [`write_ledger`] or [`run`]. Band defects come
/// back as their maxima over species, the worst cell is not recorded and the
/// monitor verdict is recomputed against `band_threshold`.
pub fn read_ledger(path: &Path, band_threshold: f64) -> Result<Vec<LedgerRow>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("{}: missing column {name}", path.display())))
    };
    let species = header.iter().filter(|h| h.starts_with("mass_z")).count();
    let names = [
        "step",
        "time",
        "kinetic",
        "helmholtz",
        "dissipation_cum",
        "eps_gradient_cum",
        "eps_penalty_cum",
        "residual",
        "inf_rho",
        "band_defect_sup",
        "band_defect_l1",
        "mass_rho",
        "cfl",
        "cg_iterations",
        "galerkin_residual",
    ];
    let idx = names.iter().map(|n| col(n)).collect::<Result<Vec<_>>>()?;
    let z_idx = (1..=species).map(|i| col(&format!("mass_z{i}"))).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("{}: bad value {:?}: {e}", path.display(), &rec[i])))
        };
        let v = idx.iter().take(12).map(|&i| num(i)).collect::<Result<Vec<_>>>()?;
        let report = if rec[idx[12]].is_empty() {
            None
        } else {
            Some(StepReport {
                cfl: num(idx[12])?,
                cg_iterations: num(idx[13])? as usize,
                galerkin_residual: num(idx[14])?,
                clamp_correction: 0.0,
            })
        };
        let (sup, l1) = (v[9], v[10]);
        rows.push(LedgerRow {
            step: v[0] as usize,
            ledger: EnergyLedger {
                time: v[1],
                kinetic: v[2],
                helmholtz_total: v[3],
                dissipation_cum: v[4],
                eps_gradient_cum: v[5],
                eps_penalty_cum: v[6],
                initial_total: v[2] + v[3] + v[4] + v[5] - v[7],
                residual: v[7],
            },
            monitor: MinPrincipleRecord {
                inf_rho: v[8],
                band_defect_sup: vec![sup],
                band_defect_l1: vec![l1],
                worst_cell: None,
                pass: v[8] > 0.0 && sup <= band_threshold,
            },
            mass_rho: v[11],
            mass_z: z_idx.iter().map(|&i| num(i)).collect::<Result<_>>()?,
            report,
        });
    }
    Ok(rows)
}

/// Writes ledger rows as CSV.
pub fn write_ledger<W: Write>(rows: &[LedgerRow], species: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LedgerRow::header(species))?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(|e| Error::io("ledger", e))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<LedgerRow>,
    pub trajectory: Trajectory,
    pub final_state: MixtureState,
    /// Largest per-step relative change of any total mass.
    pub max_mass_drift: f64,
}

impl RunOutput {
    pub fn final_ledger(&self) -> &EnergyLedger {
        &self.rows.last().expect("ledger has the initial row").ledger
    }
}

struct CheckpointWriter {
    dir: PathBuf,
    entries: Vec<CheckpointEntry>,
}

impl CheckpointWriter {
    fn write(&mut self, snap: &Snapshot) -> Result<()> {
        let tag = format!("{:06}", snap.step);
        let name = |stem: String, f: &Field| -> Result<String> {
            write_field(&self.dir, &stem, f, Some(snap.time))?;
            Ok(format!("{stem}.bin"))
        };
        let rho = name(format!("rho_{tag}"), &snap.rho)?;
        let z = snap
            .z
            .iter()
            .enumerate()
            .map(|(i, f)| name(format!("z{}_{tag}", i + 1), f))
            .collect::<Result<_>>()?;
        let u = snap
            .u
            .components()
            .iter()
            .enumerate()
            .map(|(a, f)| name(format!("u{}_{tag}", a + 1), f))
            .collect::<Result<_>>()?;
        self.entries.push(CheckpointEntry {
            step: snap.step,
            time: snap.time,
            rho,
            z,
            u,
        });
        Ok(())
    }

    fn finish(&self, meta: &TrajectoryMeta) -> Result<()> {
        let manifest = Manifest {
            meta: meta.clone(),
            checkpoints: self.entries.clone(),
        };
        let path = self.dir.join(MANIFEST);
        fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))
    }
}

/// Steps from `initial` to `t_end`, keeping the ledger and monitors each
/// step and snapshots at the configured cadence. On blow-up the ledger
/// written so far stays on disk and the error carries the time.
pub fn run(solver: &Solver, initial: MixtureState, opts: &RunOptions) -> Result<RunOutput> {
    let cfg = solver.config();
    let species = cfg.species();
    let cadence = opts.checkpoint_every.max(1);
    let meta = TrajectoryMeta {
        grid: cfg.grid.spec(),
        dt: cfg.dt,
        cadence,
        epsilon: cfg.epsilon,
        mu: cfg.mu,
        lambda: cfg.lambda,
        delta: cfg.pressure_params.delta,
        b_exponent: cfg.pressure_params.b_exponent,
        n_modes: cfg.n_modes,
        species,
    };
    let mut ledger_file = None;
    let mut checkpoints = None;
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("ledger.csv");
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(LedgerRow::header(species))?;
        ledger_file = Some(w);
        let cdir = dir.join("checkpoints");
        if cdir.exists() {
            fs::remove_dir_all(&cdir).map_err(|e| Error::io(&cdir, e))?;
        }
        checkpoints = Some(CheckpointWriter {
            dir: cdir,
            entries: Vec::new(),
        });
    }

    let snapshot = |s: &MixtureState| Snapshot {
        step: s.step,
        time: s.time,
        rho: s.rho.clone(),
        z: s.z.clone(),
        u: solver.velocity(s),
    };
    let make_row = |s: &MixtureState, ledger: EnergyLedger, report: Option<StepReport>| {
        let (mass_rho, mass_z) = s.masses();
        LedgerRow {
            step: s.step,
            ledger,
            monitor: check_min_principle(s, solver.region(), opts.band_threshold),
            mass_rho,
            mass_z,
            report,
        }
    };

    let mut state = initial;
    let mut energy = solver.state_energy(&state)?;
    let mut ledger = EnergyLedger::start(state.time, &energy);
    let mut rows = vec![make_row(&state, ledger, None)];
    let mut snaps = vec![snapshot(&state)];
    if let Some(w) = ledger_file.as_mut() {
        w.write_record(rows[0].record())?;
    }
    if let Some(c) = checkpoints.as_mut() {
        c.write(&snaps[0])?;
    }
    let steps = cfg.steps();
    let mut max_mass_drift: f64 = 0.0;
    let mut failure = None;
    for n in 1..=steps {
        let (next, report) = match solver.step(&state) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        let next_energy = match solver.state_energy(&next) {
            Ok(e) => e,
            Err(e) => {
                failure = Some(Error::BlowUp {
                    time: next.time,
                    detail: format!("energy evaluation failed: {e}"),
                });
                break;
            }
        };
        ledger = ledger.advance(&energy, &next_energy, next.time, cfg.dt);
        let row = make_row(&next, ledger, Some(report));
        let drift = mass_drift(&rows[rows.len() - 1], &row);
        if drift > 1e-12 {
            log::warn!("mass drift {drift:e} at step {n}");
        }
        max_mass_drift = max_mass_drift.max(drift);
        if let Some(w) = ledger_file.as_mut() {
            w.write_record(row.record())?;
            w.flush().map_err(|e| Error::io("ledger.csv", e))?;
        }
        rows.push(row);
        state = next;
        energy = next_energy;
        if n % cadence == 0 || n == steps {
            let s = snapshot(&state);
            if let Some(c) = checkpoints.as_mut() {
                c.write(&s)?;
            }
            snaps.push(s);
        }
    }
    if let Some(mut w) = ledger_file {
        w.flush().map_err(|e| Error::io("ledger.csv", e))?;
    }
    if let Some(c) = &checkpoints {
        c.finish(&meta)?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RunOutput {
        rows,
        trajectory: Trajectory {
            meta,
            snapshots: snaps,
        },
        final_state: state,
        max_mass_drift,
    })
}
