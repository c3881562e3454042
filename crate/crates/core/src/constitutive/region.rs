use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The cone `a_lower[i]·ρ ≤ Z_i ≤ a_upper[i]·ρ`, `ρ ≥ 0`, for K species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionRepr", into = "RegionRepr")]
pub struct AdmissibleRegion {
    a_lower: Vec<f64>,
    a_upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionRepr {
    a_lower: Vec<f64>,
    a_upper: Vec<f64>,
}

impl TryFrom<RegionRepr> for AdmissibleRegion {
    type Error = Error;
    fn try_from(r: RegionRepr) -> Result<Self> {
        AdmissibleRegion::new(r.a_lower, r.a_upper)
    }
}

impl From<AdmissibleRegion> for RegionRepr {
    fn from(r: AdmissibleRegion) -> Self {
        RegionRepr {
            a_lower: r.a_lower,
            a_upper: r.a_upper,
        }
    }
}

impl AdmissibleRegion {
    pub fn new(a_lower: Vec<f64>, a_upper: Vec<f64>) -> Result<Self> {
        if a_lower.is_empty() || a_lower.len() != a_upper.len() {
            return Err(Error::Config(format!(
                "admissible band needs one (a_lower, a_upper) pair per species, got {} and {}",
                a_lower.len(),
                a_upper.len()
            )));
        }
        for (i, (&lo, &hi)) in a_lower.iter().zip(&a_upper).enumerate() {
            if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::Config(format!(
                    "the admissible band requires 0 <= a_lower < a_upper < inf; species {i} has a_lower = {lo}, a_upper = {hi}"
                )));
            }
        }
        Ok(Self { a_lower, a_upper })
    }

    /// Single-species band.
    pub fn bi(a_lower: f64, a_upper: f64) -> Result<Self> {
        Self::new(vec![a_lower], vec![a_upper])
    }

    pub fn species(&self) -> usize {
        self.a_lower.len()
    }

    pub fn a_lower(&self) -> &[f64] {
        &self.a_lower
    }

    pub fn a_upper(&self) -> &[f64] {
        &self.a_upper
    }

    pub fn contains(&self, rho: f64, z: &[f64]) -> bool {
        rho >= 0.0
            && z.len() == self.species()
            && z
                .iter()
                .zip(self.a_lower.iter().zip(&self.a_upper))
                .all(|(&zi, (&lo, &hi))| lo * rho <= zi && zi <= hi * rho)
    }

    /// Largest band violation `max_i max(a_lower ρ − Z_i, Z_i − a_upper ρ, 0)`.
    pub fn defect(&self, rho: f64, z: &[f64]) -> f64 {
        z.iter()
            .zip(self.a_lower.iter().zip(&self.a_upper))
            .map(|(&zi, (&lo, &hi))| (lo * rho - zi).max(zi - hi * rho).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// `s = Z/ρ` with the vacuum convention `s = 0` at `ρ = 0`.
pub fn fraction(rho: f64, z: f64) -> f64 {
    if rho > 0.0 {
        z / rho
    } else {
        0.0
    }
}

/// Componentwise [`fraction`].
pub fn fractions(rho: f64, z: &[f64]) -> Vec<f64> {
    z.iter().map(|&zi| fraction(rho, zi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_defect() {
        let r = AdmissibleRegion::bi(0.0, 1.0).unwrap();
        assert!(r.contains(1.0, &[0.5]));
        assert!(!r.contains(1.0, &[1.1]));
        assert!(r.contains(0.0, &[0.0]));
        assert!((r.defect(2.0, &[2.2]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_inverted_band() {
        let err = AdmissibleRegion::bi(1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("admissible band"));
        assert!(AdmissibleRegion::bi(-0.1, 1.0).is_err());
        assert!(serde_json::from_str::<AdmissibleRegion>(r#"{"a_lower":[2],"a_upper":[1]}"#).is_err());
    }

    #[test]
    fn vacuum_fraction_is_zero() {
        assert_eq!(fraction(0.0, 0.0), 0.0);
        assert_eq!(fraction(2.0, 1.0), 0.5);
    }
}
