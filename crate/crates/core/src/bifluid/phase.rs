//! Barotropic pressure laws of the individual phases.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent, expand_bracket, RootOptions};

/// A phase pressure `s ↦ 𝔓(s)`: continuous, `𝔓(0) = 0`, strictly
/// increasing.
pub trait PhaseLaw: Debug + Send + Sync {
    fn name(&self) -> String;

    fn pressure(&self, s: f64) -> f64;

    fn derivative(&self, s: f64) -> f64;

    fn second_derivative(&self, s: f64) -> f64;

    /// Growth exponent at infinity.
    fn gamma(&self) -> f64;

    /// Exponent of the behaviour near zero.
    fn alpha(&self) -> f64;

    /// `(a, b)` with `𝔓'(s) ≥ a s^{γ−1} − b` for all `s > 0`.
    fn derivative_lower_bound(&self) -> (f64, f64);

    /// `𝔓⁻¹(p)` for `p ≥ 0`.
    fn inverse(&self, p: f64) -> Result<f64> {
        numeric_inverse(self, p, RootOptions::default())
    }
}

pub(crate) fn numeric_inverse<L: PhaseLaw + ?Sized>(
    law: &L,
    p: f64,
    opts: RootOptions,
) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("phase pressure {p} is negative")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| law.pressure(s) - p;
    let (lo, hi) = expand_bracket(f, 0.0, 1.0, 1100).map_err(|_| {
        Error::Domain(format!(
            "{} does not reach pressure {p}; the phase law is not onto",
            law.name()
        ))
    })?;
    brent(f, lo, hi, opts)
}

/// `𝔓(s) = coeff·s^γ + linear·s` with `coeff > 0`, `linear ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPhase {
    coeff: f64,
    gamma: f64,
    linear: f64,
}

impl PowerPhase {
    pub fn new(coeff: f64, gamma: f64, linear: f64) -> Result<Self> {
        if !(coeff > 0.0 && coeff.is_finite()) {
            return Err(Error::Config(format!("phase coefficient must be positive, got {coeff}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("phase exponent must be positive, got {gamma}")));
        }
        if !(linear >= 0.0 && linear.is_finite()) {
            // a negative linear part would make the law decrease near 0
            return Err(Error::Config(format!(
                "linear phase perturbation must be nonnegative, got {linear}"
            )));
        }
        Ok(Self {
            coeff,
            gamma,
            linear,
        })
    }

    pub fn pure(gamma: f64) -> Result<Self> {
        Self::new(1.0, gamma, 0.0)
    }
}

impl PhaseLaw for PowerPhase {
    fn name(&self) -> String {
        if self.linear == 0.0 {
            format!("{}*s^{}", self.coeff, self.gamma)
        } else {
            format!("{}*s^{} + {}*s", self.coeff, self.gamma, self.linear)
        }
    }

    fn pressure(&self, s: f64) -> f64 {
        self.coeff * s.powf(self.gamma) + self.linear * s
    }

    fn derivative(&self, s: f64) -> f64 {
        if s == 0.0 && self.gamma < 1.0 {
            return f64::INFINITY;
        }
        self.coeff * self.gamma * s.powf(self.gamma - 1.0) + self.linear
    }

    fn second_derivative(&self, s: f64) -> f64 {
        self.coeff * self.gamma * (self.gamma - 1.0) * s.powf(self.gamma - 2.0)
    }

    fn gamma(&self) -> f64 {
        if self.gamma < 1.0 && self.linear > 0.0 {
            1.0
        } else {
            self.gamma
        }
    }

    fn alpha(&self) -> f64 {
        if self.linear > 0.0 {
            self.gamma.min(1.0)
        } else {
            self.gamma
        }
    }

    fn derivative_lower_bound(&self) -> (f64, f64) {
        if self.gamma() == self.gamma {
            (self.coeff * self.gamma, 0.0)
        } else {
            (self.linear, 0.0)
        }
    }

    fn inverse(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::Domain(format!("phase pressure {p} is negative")));
        }
        if self.linear == 0.0 {
            Ok((p / self.coeff).powf(1.0 / self.gamma))
        } else {
            numeric_inverse(self, p, RootOptions::default())
        }
    }
}

/// Serializable phase-law selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseSpec {
    /// `coeff·s^gamma + linear·s`
    Power {
        gamma: f64,
        #[serde(default = "one")]
        coeff: f64,
        #[serde(default)]
        linear: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl PhaseSpec {
    pub fn power(gamma: f64) -> Self {
        PhaseSpec::Power {
            gamma,
            coeff: 1.0,
            linear: 0.0,
        }
    }

    pub fn build(&self) -> Result<Arc<dyn PhaseLaw>> {
        match self {
            PhaseSpec::Power {
                gamma,
                coeff,
                linear,
            } => Ok(Arc::new(PowerPhase::new(*coeff, *gamma, *linear)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_and_numeric_inverses_agree() {
        let a = PowerPhase::new(2.0, 1.5, 0.0).unwrap();
        let p = a.pressure(3.0);
        assert!((a.inverse(p).unwrap() - 3.0).abs() < 1e-14);
        assert!((numeric_inverse(&a, p, RootOptions::default()).unwrap() - 3.0).abs() < 1e-14);
        let b = PowerPhase::new(1.0, 2.0, 0.5).unwrap();
        assert!((b.inverse(b.pressure(0.3)).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_decreasing_perturbation() {
        assert!(PowerPhase::new(1.0, 2.0, -0.1).is_err());
    }
}
