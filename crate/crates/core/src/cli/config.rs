use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constitutive::{
    AdmissibleRegion, LawSpec, PressureLaw, RegularizedPressureParams, SamplingSpec, Term,
};
use crate::diagnostics::LadderAxis;
use crate::error::{Error, Result};
use crate::solver::{ApproxConfig, MixtureState, RunOptions, Solver};
use crate::spectral::{random_band_limited, Field, GridSpec, TorusGrid, VectorField};

/// One cosine term `amplitude · cos(k·x + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeTerm {
    pub amplitude: f64,
    pub k: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

/// Named analytic initial profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant { value: f64 },
    /// `mean + Σ amplitude cos(k·x + phase)`
    Modes {
        mean: f64,
        #[serde(default)]
        terms: Vec<ModeTerm>,
    },
    /// `mean + amplitude · g` with `g` a seeded random trigonometric
    /// polynomial on `|k_a| ≤ kmax`, scaled to `sup|g| = 1`.
    Random { mean: f64, amplitude: f64, kmax: usize },
}

impl Profile {
    pub fn sample(&self, grid: &TorusGrid, seed: u64, units: &str) -> Result<Field> {
        let d = grid.dim();
        Ok(match self {
            Profile::Constant { value } => Field::constant(grid, *value, units),
            Profile::Modes { mean, terms } => {
                for t in terms {
                    if t.k.len() != d {
                        return Err(Error::Config(format!(
                            "mode wavevector {:?} does not match dimension {d}",
                            t.k
                        )));
                    }
                }
                Field::from_fn(grid, units, |x| {
                    mean + terms
                        .iter()
                        .map(|t| {
                            let phase: f64 = t.k.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                            t.amplitude * (phase + t.phase).cos()
                        })
                        .sum::<f64>()
                })
            }
            Profile::Random {
                mean,
                amplitude,
                kmax,
            } => {
                let g = random_band_limited(grid, *kmax, seed);
                let scale = g.sup().max(f64::MIN_POSITIVE);
                g.map(|v| mean + amplitude * v / scale).with_units(units)
            }
        })
    }
}

/// How a partial density is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PartialInit {
    /// `Z_i = s_i ρ` with the given fraction profile.
    Fraction(Profile),
    Density(Profile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub rho: Profile,
    pub z: Vec<PartialInit>,
    /// One profile per velocity component; empty means at rest.
    #[serde(default)]
    pub u: Vec<Profile>,
}

fn default_checkpoint_every() -> usize {
    10
}
fn default_band_threshold() -> f64 {
    1e-8
}
fn default_cfl() -> f64 {
    crate::solver::DEFAULT_CFL_BOUND
}

/// A complete run description. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub n_modes: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub b_exponent: f64,
    pub mu: f64,
    pub lambda: f64,
    pub dt: f64,
    pub t_end: f64,
    pub region: AdmissibleRegion,
    pub law: LawSpec,
    pub initial: InitialData,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
    #[serde(default = "default_band_threshold")]
    pub band_threshold: f64,
    #[serde(default)]
    pub positivity_clamp: bool,
    #[serde(default)]
    pub initial_smoothing: Option<usize>,
    #[serde(default = "default_cfl")]
    pub cfl_bound: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

/// Reads and parses a JSON document.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// The reference smooth 2-D problem: a separable law with a cross term,
    /// data strictly inside the band, and a swirling velocity.
    pub fn default_problem() -> Self {
        let mode = |amplitude: f64, k: [i64; 2], phase: f64| ModeTerm {
            amplitude,
            k: k.to_vec(),
            phase,
        };
        let half_pi = std::f64::consts::FRAC_PI_2;
        Self {
            grid: GridSpec {
                dimension: 2,
                points_per_axis: 32,
            },
            n_modes: 200,
            epsilon: 0.01,
            delta: 1e-3,
            b_exponent: 6.0,
            mu: 0.1,
            lambda: 0.0,
            dt: 2.5e-3,
            t_end: 0.5,
            region: AdmissibleRegion::bi(0.0, 1.0).expect("valid band"),
            law: LawSpec::Separable {
                gamma: 2.0,
                beta: vec![2.0],
                terms: vec![Term::Monomial {
                    coeff: 0.5,
                    rho_exp: 1.0,
                    z_exps: vec![0.5],
                }],
            },
            initial: InitialData {
                // 1 + 0.3 sin x₁ cos x₂
                rho: Profile::Modes {
                    mean: 1.0,
                    terms: vec![mode(0.15, [1, 1], -half_pi), mode(0.15, [1, -1], -half_pi)],
                },
                z: vec![PartialInit::Fraction(Profile::Modes {
                    mean: 0.5,
                    terms: vec![mode(0.2, [1, 1], 0.0)],
                })],
                u: vec![
                    Profile::Modes {
                        mean: 0.0,
                        terms: vec![mode(0.5, [0, 1], -half_pi)],
                    },
                    Profile::Modes {
                        mean: 0.0,
                        terms: vec![mode(0.3, [1, 0], 0.0)],
                    },
                ],
            },
            checkpoint_every: 10,
            band_threshold: 1e-8,
            positivity_clamp: false,
            initial_smoothing: None,
            cfl_bound: crate::solver::DEFAULT_CFL_BOUND,
            seed: 0,
            out_dir: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        load_json(path)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::from_spec(self.grid)
    }

    pub fn build_law(&self) -> Result<Arc<dyn PressureLaw>> {
        self.law.build(self.region.clone())
    }

    pub fn approx_config(&self) -> Result<ApproxConfig> {
        let mut cfg = ApproxConfig::new(
            self.grid()?,
            self.n_modes,
            self.epsilon,
            RegularizedPressureParams::new(self.delta, self.b_exponent)?,
            self.mu,
            self.lambda,
            self.dt,
            self.t_end,
            self.build_law()?,
        );
        cfg.cfl_bound = self.cfl_bound;
        cfg.positivity_clamp = self.positivity_clamp;
        cfg.initial_smoothing = self.initial_smoothing;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn solver(&self) -> Result<Solver> {
        Solver::new(self.approx_config()?)
    }

    /// Samples the initial recipe; each random profile gets its own stream.
    pub fn initial_state(&self, solver: &Solver) -> Result<MixtureState> {
        let grid = &solver.config().grid;
        let species = self.region.species();
        if self.initial.z.len() != species {
            return Err(Error::Config(format!(
                "initial data lists {} partial densities, the band has {species}",
                self.initial.z.len()
            )));
        }
        let d = grid.dim();
        if !self.initial.u.is_empty() && self.initial.u.len() != d {
            return Err(Error::Config(format!(
                "initial velocity has {} components, grid dimension is {d}",
                self.initial.u.len()
            )));
        }
        let mut stream = self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut next_seed = || {
            stream = stream.wrapping_add(1);
            stream
        };
        let rho = self.initial.rho.sample(grid, next_seed(), "M/L^d")?;
        let z = self
            .initial
            .z
            .iter()
            .map(|zi| match zi {
                PartialInit::Fraction(p) => Ok(p
                    .sample(grid, next_seed(), "1")?
                    .zip_map(&rho, |s, r| s * r)
                    .with_units("M/L^d")),
                PartialInit::Density(p) => p.sample(grid, next_seed(), "M/L^d"),
            })
            .collect::<Result<Vec<_>>>()?;
        let u = if self.initial.u.is_empty() {
            VectorField::zeros(grid)
        } else {
            VectorField::new(
                self.initial
                    .u
                    .iter()
                    .map(|p| p.sample(grid, next_seed(), "L/T"))
                    .collect::<Result<_>>()?,
            )?
        };
        solver.prepare_initial(&rho, &z, &u)
    }

    pub fn run_options(&self, out_dir: Option<PathBuf>) -> RunOptions {
        RunOptions {
            checkpoint_every: self.checkpoint_every,
            out_dir: out_dir.or_else(|| self.out_dir.clone()),
            band_threshold: self.band_threshold,
        }
    }

    /// Copy with one ladder parameter replaced.
    pub fn with_axis(&self, axis: LadderAxis, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match axis {
            LadderAxis::Epsilon => c.epsilon = value,
            LadderAxis::Delta => c.delta = value,
            LadderAxis::Dt => c.dt = value,
            LadderAxis::N => {
                if value.fract() != 0.0 || value < 4.0 {
                    return Err(Error::Config(format!("grid ladder value {value} is not a grid size")));
                }
                c.grid.points_per_axis = value as usize;
            }
        }
        Ok(c)
    }
}

fn default_theta() -> f64 {
    0.25
}
fn default_truncation() -> f64 {
    2.0
}

/// A refinement ladder over one parameter of a base run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub base: RunConfig,
    pub axis: LadderAxis,
    pub values: Vec<f64>,
    /// Integrability gain for the pressure integrals.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Truncation level of the flux correlation.
    #[serde(default = "default_truncation")]
    pub truncation_level: f64,
    /// Time between snapshots; overrides `base.checkpoint_every` so that
    /// runs with different `dt` share a cadence.
    #[serde(default)]
    pub snapshot_interval: Option<f64>,
    /// Read trajectories from `<reuse>/run_<i>/checkpoints` instead of running.
    #[serde(default)]
    pub reuse: Option<PathBuf>,
}

/// Law audit request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub law: LawSpec,
    pub region: AdmissibleRegion,
    #[serde(default)]
    pub sampling: SamplingSpec,
}

/// Log-spaced axis `min..max` with `points` values, or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    LogSpaced { min: f64, max: f64, points: usize },
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AxisSpec::Values(v) => Ok(v.clone()),
            AxisSpec::LogSpaced { min, max, points } => {
                if !(*min > 0.0 && max > min && *points >= 2) {
                    return Err(Error::Config(format!(
                        "log axis needs 0 < min < max and points >= 2, got {min}, {max}, {points}"
                    )));
                }
                let r = (max / min).ln();
                Ok((0..*points)
                    .map(|j| min * (r * j as f64 / (*points - 1) as f64).exp())
                    .collect())
            }
        }
    }
}

/// Tabulation request for the two-phase transform; `law` must be of kind `bifluid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub law: LawSpec,
    pub region: AdmissibleRegion,
    pub rho: AxisSpec,
    pub z: AxisSpec,
}
