use serde::Serialize;

use crate::constitutive::{RegularizedLaw, TruncationKit};
use crate::error::Result;
use crate::solver::{Snapshot, Trajectory};
use crate::spectral::{div, Field};

/// `F = Π_δ(ρ, Z⃗) − (2μ + λ) div u`.
pub fn effective_flux_field(snap: &Snapshot, law: &RegularizedLaw, mu: f64, lambda: f64) -> Field {
    let k = snap.z.len();
    let divu = div(&snap.u);
    let data = (0..snap.rho.data().len())
        .map(|x| {
            let zz: Vec<f64> = (0..k).map(|i| snap.z[i].data()[x]).collect();
            law.pressure(snap.rho.data()[x], &zz) - (2.0 * mu + lambda) * divu.data()[x]
        })
        .collect();
    Field::raw(snap.rho.grid(), data, "P")
}

/// `⟨F g⟩ − ⟨F⟩⟨g⟩` with `⟨·⟩` the spatial mean.
pub fn covariance(f: &Field, g: &Field) -> f64 {
    let n = f.data().len() as f64;
    let (mf, mg) = (f.mean(), g.mean());
    f.data()
        .iter()
        .zip(g.data())
        .map(|(a, b)| (a - mf) * (b - mg))
        .sum::<f64>()
        / n
}

/// `Cov(F, T_k(ρ))` at one snapshot.
pub fn effective_viscous_flux(
    snap: &Snapshot,
    law: &RegularizedLaw,
    mu: f64,
    lambda: f64,
    k: f64,
) -> Result<f64> {
    let t = TruncationKit::new(k)?;
    let f = effective_flux_field(snap, law, mu, lambda);
    Ok(covariance(&f, &snap.rho.map(|r| t.t(r))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxSample {
    pub time: f64,
    pub correlation: f64,
}

/// The correlation at every snapshot of a run.
pub fn flux_correlation_series(traj: &Trajectory, law: &RegularizedLaw, k: f64) -> Result<Vec<FluxSample>> {
    traj.snapshots
        .iter()
        .map(|s| {
            Ok(FluxSample {
                time: s.time,
                correlation: effective_viscous_flux(s, law, traj.meta.mu, traj.meta.lambda, k)?,
            })
        })
        .collect()
}
