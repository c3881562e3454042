//! Built-in pressure laws.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::law::{Decomposed, Exponents, PressureLaw};
use super::region::{fractions, AdmissibleRegion};
use crate::bifluid::{BiFluidSystem, EffectivePressure, PhaseSpec};
use crate::error::{Error, Result};

/// A positively homogeneous building block of a pressure law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum Term {
    /// `coeff · ρ^rho_exp · Π Z_i^{z_exps[i]}`
    Monomial {
        coeff: f64,
        rho_exp: f64,
        z_exps: Vec<f64>,
    },
    /// `coeff · (ρ + Σ Z_i)^exponent`
    SumPower { coeff: f64, exponent: f64 },
}

impl Term {
    pub fn degree(&self) -> f64 {
        match self {
            Term::Monomial { rho_exp, z_exps, .. } => rho_exp + z_exps.iter().sum::<f64>(),
            Term::SumPower { exponent, .. } => *exponent,
        }
    }

    pub fn coeff(&self) -> f64 {
        match self {
            Term::Monomial { coeff, .. } | Term::SumPower { coeff, .. } => *coeff,
        }
    }

    pub fn value(&self, rho: f64, z: &[f64]) -> f64 {
        match self {
            Term::Monomial {
                coeff,
                rho_exp,
                z_exps,
            } => {
                let mut v = coeff * pow(rho, *rho_exp);
                for (zi, e) in z.iter().zip(z_exps) {
                    v *= pow(*zi, *e);
                }
                v
            }
            Term::SumPower { coeff, exponent } => {
                coeff * pow(rho + z.iter().sum::<f64>(), *exponent)
            }
        }
    }

    pub fn d_rho(&self, rho: f64, z: &[f64]) -> f64 {
        match self {
            Term::Monomial {
                coeff,
                rho_exp,
                z_exps,
            } => {
                if *rho_exp == 0.0 {
                    return 0.0;
                }
                let mut v = coeff * rho_exp * pow(rho, rho_exp - 1.0);
                for (zi, e) in z.iter().zip(z_exps) {
                    v *= pow(*zi, *e);
                }
                v
            }
            Term::SumPower { coeff, exponent } => {
                coeff * exponent * pow(rho + z.iter().sum::<f64>(), exponent - 1.0)
            }
        }
    }

    pub fn d_z(&self, rho: f64, z: &[f64], i: usize) -> f64 {
        match self {
            Term::Monomial {
                coeff,
                rho_exp,
                z_exps,
            } => {
                if z_exps[i] == 0.0 {
                    return 0.0;
                }
                let mut v = coeff * pow(rho, *rho_exp);
                for (j, (zj, e)) in z.iter().zip(z_exps).enumerate() {
                    v *= if j == i {
                        e * pow(*zj, e - 1.0)
                    } else {
                        pow(*zj, *e)
                    };
                }
                v
            }
            Term::SumPower { .. } => self.d_rho(rho, z),
        }
    }

    /// Helmholtz energy of this term alone, `(f − ρ f(1, s⃗))/(p − 1)`, or
    /// `ρ f(1, s⃗) ln ρ` at degree one.
    fn helmholtz(&self, rho: f64, z: &[f64]) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let s = fractions(rho, z);
        let p = self.degree();
        let g = rho * self.value(1.0, &s);
        if (p - 1.0).abs() < 1e-14 {
            g * rho.ln()
        } else {
            (self.value(rho, z) - g) / (p - 1.0)
        }
    }

    fn helmholtz_gradient(&self, rho: f64, z: &[f64]) -> (f64, Vec<f64>) {
        let s = fractions(rho, z);
        let p = self.degree();
        let g = rho * self.value(1.0, &s);
        let gz: Vec<f64> = (0..z.len()).map(|i| self.d_z(1.0, &s, i)).collect();
        let g_rho = self.value(1.0, &s) - s.iter().zip(&gz).map(|(si, gi)| si * gi).sum::<f64>();
        if (p - 1.0).abs() < 1e-14 {
            let ln = rho.ln();
            (g_rho * ln + g / rho, gz.iter().map(|gi| gi * ln).collect())
        } else {
            let d_rho = (self.d_rho(rho, z) - g_rho) / (p - 1.0);
            let d_z = (0..z.len())
                .map(|i| (self.d_z(rho, z, i) - gz[i]) / (p - 1.0))
                .collect();
            (d_rho, d_z)
        }
    }
}

fn pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// A finite sum of homogeneous terms; covers the two standard example
/// families and pure power laws. Helmholtz energies are available in
/// closed form.
#[derive(Debug, Clone)]
pub struct HomogeneousLaw {
    name: String,
    terms: Vec<Term>,
    region: AdmissibleRegion,
    exponents: Exponents,
}

impl HomogeneousLaw {
    pub fn new(
        name: impl Into<String>,
        terms: Vec<Term>,
        region: AdmissibleRegion,
        gamma: f64,
        beta: Vec<f64>,
    ) -> Result<Self> {
        let k = region.species();
        if beta.len() != k {
            return Err(Error::Config(format!(
                "expected {k} beta exponents, got {}",
                beta.len()
            )));
        }
        for t in &terms {
            if let Term::Monomial { z_exps, .. } = t {
                if z_exps.len() != k {
                    return Err(Error::Config(format!(
                        "monomial term needs {k} Z exponents, got {}",
                        z_exps.len()
                    )));
                }
            }
            if !(t.degree() > 0.0) {
                return Err(Error::Config(format!(
                    "term {t:?} must have positive total degree so that P(0, 0) = 0"
                )));
            }
        }
        let alpha = terms
            .iter()
            .map(Term::degree)
            .fold(f64::INFINITY, f64::min);
        let lipschitz = beta.iter().copied().fold(gamma, f64::max);
        Ok(Self {
            name: name.into(),
            terms,
            region,
            exponents: Exponents {
                gamma,
                beta,
                alpha,
                lipschitz,
            },
        })
    }

    /// `P = ρ^γ`.
    pub fn power(gamma: f64, region: AdmissibleRegion) -> Result<Self> {
        let k = region.species();
        Self::new(
            format!("power(gamma={gamma})"),
            vec![Term::Monomial {
                coeff: 1.0,
                rho_exp: gamma,
                z_exps: vec![0.0; k],
            }],
            region,
            gamma,
            vec![gamma; k],
        )
    }

    /// `P = ρ^γ + Σ Z_i^{β_i} + Σ F_m` with monomial corrections `F_m`.
    pub fn separable(
        gamma: f64,
        beta: Vec<f64>,
        extra: Vec<Term>,
        region: AdmissibleRegion,
    ) -> Result<Self> {
        let k = region.species();
        let mut terms = vec![Term::Monomial {
            coeff: 1.0,
            rho_exp: gamma,
            z_exps: vec![0.0; k],
        }];
        for (i, &b) in beta.iter().enumerate() {
            let mut z_exps = vec![0.0; k];
            z_exps[i] = b;
            terms.push(Term::Monomial {
                coeff: 1.0,
                rho_exp: 0.0,
                z_exps,
            });
        }
        terms.extend(extra);
        Self::new(
            format!("separable(gamma={gamma}, beta={beta:?})"),
            terms,
            region,
            gamma,
            beta,
        )
    }

    /// `P = (ρ + Σ Z_i)^γ + Σ F_m`.
    pub fn total_density(gamma: f64, extra: Vec<Term>, region: AdmissibleRegion) -> Result<Self> {
        let k = region.species();
        let mut terms = vec![Term::SumPower {
            coeff: 1.0,
            exponent: gamma,
        }];
        terms.extend(extra);
        Self::new(
            format!("total_density(gamma={gamma})"),
            terms,
            region,
            gamma,
            vec![gamma; k],
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn monotone(&self) -> bool {
        self.terms.iter().all(|t| t.coeff() >= 0.0)
    }
}

impl PressureLaw for HomogeneousLaw {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn region(&self) -> &AdmissibleRegion {
        &self.region
    }

    fn exponents(&self) -> &Exponents {
        &self.exponents
    }

    fn pressure(&self, rho: f64, z: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(rho, z)).sum()
    }

    fn d_rho(&self, rho: f64, z: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.d_rho(rho, z)).sum()
    }

    fn d_z(&self, rho: f64, z: &[f64], i: usize) -> f64 {
        self.terms.iter().map(|t| t.d_z(rho, z, i)).sum()
    }

    fn decompose(&self, rho: f64, s: &[f64]) -> Option<Decomposed> {
        // every term is ρ^p f(1, s) with p > 0; nonnegative coefficients
        // make ρ ↦ P(ρ, ρs) nondecreasing already
        if !self.monotone() {
            return None;
        }
        let z: Vec<f64> = s.iter().map(|si| rho * si).collect();
        Some(Decomposed {
            monotone: self.pressure(rho, &z),
            remainder: 0.0,
        })
    }

    fn remainder_support(&self) -> Option<f64> {
        self.monotone().then_some(0.0)
    }

    fn leading_coefficient(&self, s: &[f64]) -> Option<f64> {
        if !self.monotone() {
            return None;
        }
        let gamma = self.exponents.gamma;
        let f: f64 = self
            .terms
            .iter()
            .filter(|t| (t.degree() - gamma).abs() < 1e-12)
            .map(|t| t.value(1.0, s))
            .sum();
        (f > 0.0).then_some(f)
    }

    fn helmholtz_closed_form(&self, rho: f64, z: &[f64]) -> Option<f64> {
        Some(self.terms.iter().map(|t| t.helmholtz(rho, z)).sum())
    }

    fn helmholtz_gradient_closed_form(&self, rho: f64, z: &[f64]) -> Option<(f64, Vec<f64>)> {
        if rho <= 0.0 {
            return None;
        }
        let mut d_rho = 0.0;
        let mut d_z = vec![0.0; z.len()];
        for t in &self.terms {
            let (r, zz) = t.helmholtz_gradient(rho, z);
            d_rho += r;
            for (a, b) in d_z.iter_mut().zip(zz) {
                *a += b;
            }
        }
        Some((d_rho, d_z))
    }
}

/// `P = ρ^γ (1 + A sin(ω ln ρ)) + Σ Z_i^{β_i}`: log-periodic dips at every
/// scale, so no compactly supported remainder restores monotonicity.
#[derive(Debug, Clone)]
pub struct OscillatingLaw {
    amplitude: f64,
    frequency: f64,
    region: AdmissibleRegion,
    exponents: Exponents,
}

impl OscillatingLaw {
    pub fn new(
        gamma: f64,
        beta: Vec<f64>,
        amplitude: f64,
        frequency: f64,
        region: AdmissibleRegion,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(Error::Config(format!(
                "oscillation amplitude must lie in [0, 1), got {amplitude}"
            )));
        }
        if beta.len() != region.species() {
            return Err(Error::Config("one beta per species required".into()));
        }
        let alpha = beta.iter().copied().fold(gamma, f64::min);
        let lipschitz = beta.iter().copied().fold(gamma, f64::max);
        Ok(Self {
            amplitude,
            frequency,
            region,
            exponents: Exponents {
                gamma,
                beta,
                alpha,
                lipschitz,
            },
        })
    }
}

impl PressureLaw for OscillatingLaw {
    fn name(&self) -> String {
        format!(
            "oscillating(gamma={}, amplitude={}, frequency={})",
            self.exponents.gamma, self.amplitude, self.frequency
        )
    }

    fn region(&self) -> &AdmissibleRegion {
        &self.region
    }

    fn exponents(&self) -> &Exponents {
        &self.exponents
    }

    fn pressure(&self, rho: f64, z: &[f64]) -> f64 {
        let g = self.exponents.gamma;
        let base = if rho > 0.0 {
            rho.powf(g) * (1.0 + self.amplitude * (self.frequency * rho.ln()).sin())
        } else {
            0.0
        };
        base + z
            .iter()
            .zip(&self.exponents.beta)
            .map(|(zi, b)| zi.powf(*b))
            .sum::<f64>()
    }

    fn d_rho(&self, rho: f64, _z: &[f64]) -> f64 {
        let g = self.exponents.gamma;
        let phase = self.frequency * rho.ln();
        rho.powf(g - 1.0)
            * (g * (1.0 + self.amplitude * phase.sin())
                + self.amplitude * self.frequency * phase.cos())
    }

    fn d_z(&self, _rho: f64, z: &[f64], i: usize) -> f64 {
        let b = self.exponents.beta[i];
        b * z[i].powf(b - 1.0)
    }
}

/// Serializable law selection for run and audit configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    /// `ρ^γ`
    Power { gamma: f64 },
    /// `ρ^γ + Σ Z_i^{β_i} + Σ F_m`
    Separable {
        gamma: f64,
        beta: Vec<f64>,
        #[serde(default)]
        terms: Vec<Term>,
    },
    /// `(ρ + Σ Z_i)^γ + Σ F_m`
    TotalDensity {
        gamma: f64,
        #[serde(default)]
        terms: Vec<Term>,
    },
    Oscillating {
        gamma: f64,
        beta: Vec<f64>,
        amplitude: f64,
        frequency: f64,
    },
    /// Effective pressure of a two-phase mixture with pressure equilibrium.
    Bifluid {
        plus: PhaseSpec,
        minus: PhaseSpec,
        #[serde(default)]
        root_tolerance: Option<f64>,
    },
}

impl LawSpec {
    pub fn build(&self, region: AdmissibleRegion) -> Result<Arc<dyn PressureLaw>> {
        Ok(match self {
            LawSpec::Power { gamma } => Arc::new(HomogeneousLaw::power(*gamma, region)?),
            LawSpec::Separable { gamma, beta, terms } => Arc::new(HomogeneousLaw::separable(
                *gamma,
                beta.clone(),
                terms.clone(),
                region,
            )?),
            LawSpec::TotalDensity { gamma, terms } => Arc::new(HomogeneousLaw::total_density(
                *gamma,
                terms.clone(),
                region,
            )?),
            LawSpec::Oscillating {
                gamma,
                beta,
                amplitude,
                frequency,
            } => Arc::new(OscillatingLaw::new(
                *gamma,
                beta.clone(),
                *amplitude,
                *frequency,
                region,
            )?),
            LawSpec::Bifluid {
                plus,
                minus,
                root_tolerance,
            } => {
                let system = self.bifluid_system(region)?.expect("bifluid variant");
                let _ = (plus, minus, root_tolerance);
                Arc::new(EffectivePressure::new(Arc::new(system))?)
            }
        })
    }

    /// The two-phase system behind a `bifluid` law, `None` otherwise.
    pub fn bifluid_system(&self, region: AdmissibleRegion) -> Result<Option<BiFluidSystem>> {
        match self {
            LawSpec::Bifluid {
                plus,
                minus,
                root_tolerance,
            } => {
                if region.species() != 1 {
                    return Err(Error::Config(
                        "bi-fluid laws are defined for a single partial density".into(),
                    ));
                }
                let mut sys = BiFluidSystem::new(plus.build()?, minus.build()?, region)?;
                if let Some(tol) = root_tolerance {
                    sys = sys.with_root_tolerance(*tol)?;
                }
                Ok(Some(sys))
            }
            _ => Ok(None),
        }
    }
}
