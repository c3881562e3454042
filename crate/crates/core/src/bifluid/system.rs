//! Two-phase system in pressure equilibrium and its change of variables.
//!
//! With volume fraction `𝔞` and phase densities `ρ±`, the unknowns
//! `ρ = 𝔞ρ₊`, `Z = (1 − 𝔞)ρ₋` satisfy two continuity equations. Pressure
//! equilibrium `𝔓₊(ρ₊) = 𝔓₋(ρ₋)` gives `ρ₋ = q(ρ₊)` with `q = 𝔓₋⁻¹∘𝔓₊`,
//! and `ρ₊` solves
//!
//! ```text
//! ρ₊ q(ρ₊) − q(ρ₊) ρ − Z ρ₊ = 0,   ρ₊ ∈ [ρ, ∞).
//! ```

use std::cell::RefCell;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::phase::PhaseLaw;
use crate::constitutive::AdmissibleRegion;
use crate::error::{Error, Result};
use crate::numerics::{brent, expand_bracket, RootOptions};

/// Phase variables recovered from `(ρ, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDecomposition {
    /// Volume fraction `𝔞 ∈ [0, 1]` of the `+` phase.
    pub a_frac: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
}

#[derive(Debug, Clone)]
pub struct BiFluidSystem {
    plus: Arc<dyn PhaseLaw>,
    minus: Arc<dyn PhaseLaw>,
    region: AdmissibleRegion,
    root_tolerance: f64,
}

pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-12;

impl BiFluidSystem {
    /// Checks the phase laws on a log-spaced grid: `𝔓(0) = 0` and strictly
    /// increasing.
    pub fn new(
        plus: Arc<dyn PhaseLaw>,
        minus: Arc<dyn PhaseLaw>,
        region: AdmissibleRegion,
    ) -> Result<Self> {
        if region.species() != 1 {
            return Err(Error::Config(
                "a bi-fluid system has exactly one partial density".into(),
            ));
        }
        for law in [&plus, &minus] {
            if law.pressure(0.0) != 0.0 {
                return Err(Error::Config(format!("{} must vanish at 0", law.name())));
            }
            let mut prev = 0.0;
            for j in -60..=60 {
                let s = 10f64.powf(j as f64 / 10.0);
                let p = law.pressure(s);
                if !(p > prev) || !(law.derivative(s) > 0.0) {
                    return Err(Error::Config(format!(
                        "{} is not strictly increasing near s = {s}",
                        law.name()
                    )));
                }
                prev = p;
            }
        }
        Ok(Self {
            plus,
            minus,
            region,
            root_tolerance: DEFAULT_ROOT_TOLERANCE,
        })
    }

    pub fn with_root_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1e-3) {
            return Err(Error::Config(format!(
                "root tolerance must lie in (0, 1e-3), got {tol}"
            )));
        }
        self.root_tolerance = tol;
        Ok(self)
    }

    pub fn plus(&self) -> &Arc<dyn PhaseLaw> {
        &self.plus
    }

    pub fn minus(&self) -> &Arc<dyn PhaseLaw> {
        &self.minus
    }

    pub fn region(&self) -> &AdmissibleRegion {
        &self.region
    }

    pub fn root_tolerance(&self) -> f64 {
        self.root_tolerance
    }

    pub(crate) fn root_options(&self) -> RootOptions {
        RootOptions {
            rtol: (1e-3 * self.root_tolerance).max(4.0 * f64::EPSILON),
            ..RootOptions::default()
        }
    }

    /// `q(s) = 𝔓₋⁻¹(𝔓₊(s))`.
    pub fn q(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        self.minus.inverse(self.plus.pressure(s))
    }

    /// `q⁻¹(z) = 𝔓₊⁻¹(𝔓₋(z))`.
    pub fn q_inv(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(0.0);
        }
        self.plus.inverse(self.minus.pressure(z))
    }

    /// `q'(s) = 𝔓₊'(s)/𝔓₋'(q(s))`.
    pub fn q_prime(&self, s: f64) -> Result<f64> {
        Ok(self.plus.derivative(s) / self.minus.derivative(self.q(s)?))
    }

    /// `ρ₊(ρ, Z)`; exact on the axes: `ρ₊(ρ, 0) = ρ`, `ρ₊(0, Z) = q⁻¹(Z)`.
    pub fn solve_rho_plus(&self, rho: f64, z: f64) -> Result<f64> {
        if !(rho >= 0.0 && z >= 0.0) {
            return Err(Error::Domain(format!(
                "densities must be nonnegative, got rho = {rho}, Z = {z}"
            )));
        }
        if z == 0.0 {
            return Ok(rho);
        }
        if rho == 0.0 {
            return self.q_inv(z);
        }
        // unknown d = ρ₊ − ρ keeps full relative precision when Z ≪ ρ;
        // d ↦ q(ρ + d)·d/(ρ + d) − Z is strictly increasing
        let fail = RefCell::new(None);
        let phi = |d: f64| match self.q(rho + d) {
            Ok(q) => q * (d / (rho + d)) - z,
            Err(e) => {
                fail.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let guess = (z * rho / self.q(rho)?).max(self.q_inv(z)?);
        let bracket = expand_bracket(phi, 0.0, guess, 1100);
        if let Some(e) = fail.take() {
            return Err(e);
        }
        let (lo, hi) = bracket.map_err(|e| match e {
            Error::Bracket { lo, hi, f_lo, f_hi } => Error::NoConvergence {
                solver: "rho_plus bracket",
                iterations: 1100,
                state: format!("[{lo}, {hi}] with residuals {f_lo:e}, {f_hi:e}"),
            },
            other => other,
        })?;
        let d = brent(phi, lo, hi, self.root_options())?;
        if let Some(e) = fail.take() {
            return Err(e);
        }
        let rp = rho + d;
        let q = self.q(rp)?;
        let residual = (q * d - z * rp).abs();
        if residual > self.root_tolerance * (rp * q + 1.0) {
            return Err(Error::NoConvergence {
                solver: "rho_plus",
                iterations: self.root_options().max_iter,
                state: format!(
                    "rho = {rho}, Z = {z}: rho_plus = {rp} leaves residual {residual:e}"
                ),
            });
        }
        Ok(rp)
    }

    /// `(∂_ρ ρ₊, ∂_Z ρ₊)` from the implicit function theorem.
    pub fn rho_plus_partials(&self, rho: f64, z: f64) -> Result<(f64, f64)> {
        let rp = self.solve_rho_plus(rho, z)?;
        if rp == 0.0 {
            return Err(Error::Domain(
                "rho_plus is not differentiable at the vacuum state".into(),
            ));
        }
        self.partials_at(rho, rp)
    }

    pub(crate) fn partials_at(&self, rho: f64, rp: f64) -> Result<(f64, f64)> {
        let q = self.q(rp)?;
        let qp = self.q_prime(rp)?;
        let den = rho * q + rp * qp * (rp - rho);
        Ok((rp * q / den, rp * rp / den))
    }

    /// `(𝔞, ρ₊, ρ₋)`; vacuum gives `𝔞 = 1`, `ρ± = 0`.
    pub fn recover_phases(&self, rho: f64, z: f64) -> Result<PhaseDecomposition> {
        if rho == 0.0 && z == 0.0 {
            return Ok(PhaseDecomposition {
                a_frac: 1.0,
                rho_plus: 0.0,
                rho_minus: 0.0,
            });
        }
        let rp = self.solve_rho_plus(rho, z)?;
        if rho == 0.0 {
            return Ok(PhaseDecomposition {
                a_frac: 0.0,
                rho_plus: rp,
                rho_minus: z,
            });
        }
        Ok(PhaseDecomposition {
            a_frac: rho / rp,
            rho_plus: rp,
            rho_minus: self.q(rp)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifluid::phase::PowerPhase;

    fn sys(gp: f64, gm: f64) -> BiFluidSystem {
        BiFluidSystem::new(
            Arc::new(PowerPhase::pure(gp).unwrap()),
            Arc::new(PowerPhase::pure(gm).unwrap()),
            AdmissibleRegion::bi(0.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn q_examples() {
        assert_eq!(sys(2.0, 1.0).q(3.0).unwrap(), 9.0);
        assert!((sys(1.5, 1.5).q(7.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((sys(3.0, 2.0).q(2.0).unwrap() - 8f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn linear_laws_add_densities() {
        let s = sys(1.0, 1.0);
        assert!((s.solve_rho_plus(1.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
        let ph = s.recover_phases(1.0, 1.0).unwrap();
        assert!((ph.a_frac - 0.5).abs() < 1e-14);
        assert!((ph.rho_minus - 2.0).abs() < 1e-14);
    }

    #[test]
    fn axes_are_exact() {
        let s = sys(2.0, 1.4);
        assert_eq!(s.solve_rho_plus(0.7, 0.0).unwrap(), 0.7);
        assert_eq!(s.solve_rho_plus(0.0, 0.0).unwrap(), 0.0);
        let z: f64 = 3.0;
        assert!((s.solve_rho_plus(0.0, z).unwrap() - z.powf(0.7)).abs() < 1e-14);
        let ph = s.recover_phases(0.0, z).unwrap();
        assert_eq!((ph.a_frac, ph.rho_minus), (0.0, z));
    }

    #[test]
    fn tiny_partial_density_keeps_precision() {
        let s = sys(2.0, 1.4);
        let rp = s.solve_rho_plus(1.0, 1e-6).unwrap();
        // d ≈ Zρ/q(ρ) to first order
        assert!(((rp - 1.0) / 1e-6 - 1.0).abs() < 1e-5);
    }
}
