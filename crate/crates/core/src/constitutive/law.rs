use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use super::region::AdmissibleRegion;
use crate::error::{finite, Error, Result};
use crate::numerics::{central_derivative, fd_step};

/// Growth exponents declared by a pressure law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    /// Density growth exponent, at least 9/5 for the existence theory.
    pub gamma: f64,
    /// One growth exponent per partial density.
    pub beta: Vec<f64>,
    /// `sup_s P(ρ, ρs) ≤ c ρ^alpha` on `(0, 1)`.
    pub alpha: f64,
    /// Polynomial growth of the local Lipschitz constants.
    pub lipschitz: f64,
}

impl Exponents {
    pub fn max_growth(&self) -> f64 {
        self.beta.iter().copied().fold(self.gamma, f64::max)
    }
}

/// Bogovskii integrability gain `min{2g/3 − 1, g/2}`.
pub fn bogovskii_gain(g: f64) -> f64 {
    (2.0 * g / 3.0 - 1.0).min(g / 2.0)
}

/// `(𝒫, ℛ)` with `P(ρ, ρs) = 𝒫 − ℛ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposed {
    pub monotone: f64,
    pub remainder: f64,
}

/// A constitutive pressure `(ρ, Z_1..Z_K) ↦ P`.
///
/// Implementations evaluate without domain checks; use
/// [`eval_pressure`] for validated access.
pub trait PressureLaw: Debug + Send + Sync {
    fn name(&self) -> String;

    fn region(&self) -> &AdmissibleRegion;

    fn exponents(&self) -> &Exponents;

    fn pressure(&self, rho: f64, z: &[f64]) -> f64;

    fn species(&self) -> usize {
        self.region().species()
    }

    fn d_rho(&self, rho: f64, z: &[f64]) -> f64 {
        let h = fd_step(rho).min(0.5 * rho.max(f64::MIN_POSITIVE));
        central_derivative(|r| self.pressure(r, z), rho, h)
    }

    fn d_z(&self, rho: f64, z: &[f64], i: usize) -> f64 {
        let h = fd_step(z[i]).min(0.5 * z[i].max(f64::MIN_POSITIVE));
        let mut zz = z.to_vec();
        central_derivative(
            |zi| {
                zz[i] = zi;
                self.pressure(rho, &zz)
            },
            z[i],
            h,
        )
    }

    /// Monotone/remainder split at `(ρ, s⃗)`, when the law declares one.
    fn decompose(&self, _rho: f64, _s: &[f64]) -> Option<Decomposed> {
        None
    }

    /// Relative accuracy of [`pressure`](Self::pressure); implicit laws
    /// report their solver tolerance.
    fn evaluation_noise(&self) -> f64 {
        f64::EPSILON
    }

    /// Radius beyond which the declared remainder vanishes.
    fn remainder_support(&self) -> Option<f64> {
        None
    }

    /// `f(s)` in `𝒫(ρ, s) = f(s) ρ^γ + π(ρ, s)` with `π` nondecreasing.
    fn leading_coefficient(&self, _s: &[f64]) -> Option<f64> {
        None
    }

    /// Closed-form Helmholtz energy, if the law admits one.
    fn helmholtz_closed_form(&self, _rho: f64, _z: &[f64]) -> Option<f64> {
        None
    }

    /// Closed-form gradient `(∂_ρ H, ∂_Z H)` of the Helmholtz energy.
    fn helmholtz_gradient_closed_form(&self, _rho: f64, _z: &[f64]) -> Option<(f64, Vec<f64>)> {
        None
    }
}

pub(crate) fn check_point(rho: f64, z: &[f64], species: usize) -> Result<()> {
    if z.len() != species {
        return Err(Error::Domain(format!(
            "expected {species} partial densities, got {}",
            z.len()
        )));
    }
    if !(rho >= 0.0) || z.iter().any(|&zi| !(zi >= 0.0)) {
        return Err(Error::Domain(format!(
            "densities must be nonnegative, got rho = {rho}, Z = {z:?}"
        )));
    }
    Ok(())
}

/// Validated pressure evaluation.
pub fn eval_pressure(law: &dyn PressureLaw, rho: f64, z: &[f64]) -> Result<f64> {
    check_point(rho, z, law.species())?;
    finite(law.pressure(rho, z), || {
        format!("{} at rho = {rho}, Z = {z:?}", law.name())
    })
}

/// Returns `(𝒫, ℛ)` at `(ρ, s⃗)`.
pub fn decompose_pressure(law: &dyn PressureLaw, rho: f64, s: &[f64]) -> Result<Decomposed> {
    check_point(rho, s, law.species())?;
    let region = law.region();
    for (i, &si) in s.iter().enumerate() {
        if si < region.a_lower()[i] || si > region.a_upper()[i] {
            return Err(Error::Domain(format!(
                "fraction s_{i} = {si} outside [{}, {}]",
                region.a_lower()[i],
                region.a_upper()[i]
            )));
        }
    }
    law.decompose(rho, s).ok_or_else(|| Error::Capability {
        law: law.name(),
        capability: "a monotone decomposition",
    })
}
