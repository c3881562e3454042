use serde::{Deserialize, Serialize};

use crate::constitutive::TruncationKit;
use crate::error::{Error, Result};
use crate::solver::Trajectory;
use crate::spectral::{div, laplacian, Field, VectorField};

/// Renormalizing maps `b` with `b'` bounded on bounded sets away from vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Renormalization {
    Identity,
    Constant { value: f64 },
    /// `ρ^θ`, `θ ≥ 1`; for `θ < 1` the range must stay off vacuum.
    Power { theta: f64 },
    /// `T_k(ρ)`.
    Truncation { k: f64 },
    /// `ρ log ρ`; needs `ρ > 0`.
    Entropy,
}

impl Renormalization {
    /// `(b, b')` at `ρ`.
    pub fn eval(&self, rho: f64) -> Result<(f64, f64)> {
        Ok(match *self {
            Renormalization::Identity => (rho, 1.0),
            Renormalization::Constant { value } => (value, 0.0),
            Renormalization::Power { theta } => {
                if rho <= 0.0 && theta < 1.0 {
                    return Err(Error::Domain(format!(
                        "rho^{theta} has an unbounded slope at rho = {rho}"
                    )));
                }
                (rho.powf(theta), theta * rho.powf(theta - 1.0))
            }
            Renormalization::Truncation { k } => {
                let t = TruncationKit::new(k)?;
                (t.t(rho), t.dt(rho))
            }
            Renormalization::Entropy => {
                if rho <= 0.0 {
                    return Err(Error::Domain(format!("rho log rho needs rho > 0, got {rho}")));
                }
                (rho * rho.ln(), rho.ln() + 1.0)
            }
        })
    }
}

/// Residual norm at one snapshot time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSample {
    pub time: f64,
    pub l1: f64,
}

/// Discrete time derivative at snapshot `m`: centered in the interior,
/// one-sided at the ends.
fn time_derivative(values: &[Field], times: &[f64], m: usize) -> Field {
    let (a, b) = match m {
        0 => (0, 1),
        _ if m + 1 == values.len() => (m - 1, m),
        _ => (m - 1, m + 1),
    };
    let h = times[b] - times[a];
    values[b].zip_map(&values[a], |x, y| (x - y) / h)
}

fn ensure_snapshots(traj: &Trajectory) -> Result<()> {
    if traj.snapshots.len() < 2 {
        return Err(Error::Mismatch("residuals need at least two snapshots".into()));
    }
    Ok(())
}

/// L¹ norm of `∂_t b(ρ) + div(b(ρ)u) + (ρb' − b) div u`, minus the parabolic
/// part `ε b'(ρ) Δρ` when `subtract_diffusion` is set, at every snapshot.
pub fn renorm_residual(
    traj: &Trajectory,
    b: Renormalization,
    subtract_diffusion: bool,
) -> Result<Vec<ResidualSample>> {
    ensure_snapshots(traj)?;
    let times = traj.times();
    let mut bs = Vec::with_capacity(traj.snapshots.len());
    let mut slopes = Vec::with_capacity(traj.snapshots.len());
    for s in &traj.snapshots {
        let mut v = Vec::with_capacity(s.rho.data().len());
        let mut d = Vec::with_capacity(s.rho.data().len());
        for &r in s.rho.data() {
            let (bv, bd) = b.eval(r)?;
            v.push(bv);
            d.push(bd);
        }
        bs.push(Field::raw(s.rho.grid(), v, "b"));
        slopes.push(d);
    }
    let eps = if subtract_diffusion { traj.meta.epsilon } else { 0.0 };
    let mut out = Vec::with_capacity(bs.len());
    for (m, s) in traj.snapshots.iter().enumerate() {
        let dt_b = time_derivative(&bs, &times, m);
        let divu = div(&s.u);
        let flux = VectorField::new(s.u.components().iter().map(|ua| &bs[m] * ua).collect())?;
        let div_flux = div(&flux);
        let lap = laplacian(&s.rho);
        let res: f64 = (0..s.rho.data().len())
            .map(|x| {
                let r = s.rho.data()[x];
                let (bv, bd) = (bs[m].data()[x], slopes[m][x]);
                let v = dt_b.data()[x] + div_flux.data()[x] + (r * bd - bv) * divu.data()[x]
                    - eps * bd * lap.data()[x];
                v.abs()
            })
            .sum::<f64>()
            * s.rho.grid().cell_volume();
        out.push(ResidualSample { time: s.time, l1: res });
    }
    Ok(out)
}

/// Two-density form for the pair `(ρ, Z_i)`: `map(ρ, Z)` returns
/// `(b, ∂_ρ b, ∂_Z b)` and the residual is
/// `∂_t b + div(b u) + (ρ∂_ρb + Z∂_Zb − b) div u − ε(∂_ρb Δρ + ∂_Zb ΔZ)`.
pub fn renorm_residual_pair<F>(
    traj: &Trajectory,
    species: usize,
    map: F,
    subtract_diffusion: bool,
) -> Result<Vec<ResidualSample>>
where
    F: Fn(f64, f64) -> Result<(f64, f64, f64)>,
{
    ensure_snapshots(traj)?;
    if species >= traj.meta.species {
        return Err(Error::Mismatch(format!(
            "species {species} out of range ({} stored)",
            traj.meta.species
        )));
    }
    let times = traj.times();
    let mut bs = Vec::new();
    let mut grads = Vec::new();
    for s in &traj.snapshots {
        let z = &s.z[species];
        let vals = s
            .rho
            .data()
            .iter()
            .zip(z.data())
            .map(|(&r, &zz)| map(r, zz))
            .collect::<Result<Vec<_>>>()?;
        bs.push(Field::raw(s.rho.grid(), vals.iter().map(|v| v.0).collect(), "b"));
        grads.push(vals.into_iter().map(|v| (v.1, v.2)).collect::<Vec<_>>());
    }
    let eps = if subtract_diffusion { traj.meta.epsilon } else { 0.0 };
    let mut out = Vec::new();
    for (m, s) in traj.snapshots.iter().enumerate() {
        let z = &s.z[species];
        let dt_b = time_derivative(&bs, &times, m);
        let divu = div(&s.u);
        let flux = VectorField::new(s.u.components().iter().map(|ua| &bs[m] * ua).collect())?;
        let div_flux = div(&flux);
        let (lap_r, lap_z) = (laplacian(&s.rho), laplacian(z));
        let res: f64 = (0..s.rho.data().len())
            .map(|x| {
                let (r, zz) = (s.rho.data()[x], z.data()[x]);
                let (br, bz) = grads[m][x];
                let bv = bs[m].data()[x];
                let v = dt_b.data()[x]
                    + div_flux.data()[x]
                    + (r * br + zz * bz - bv) * divu.data()[x]
                    - eps * (br * lap_r.data()[x] + bz * lap_z.data()[x]);
                v.abs()
            })
            .sum::<f64>()
            * s.rho.grid().cell_volume();
        out.push(ResidualSample { time: s.time, l1: res });
    }
    Ok(out)
}
