//! The academic pressure `P(ρ, Z) = 𝔓₊(ρ₊(ρ, Z))` of a bi-fluid system.

use std::sync::Arc;

use super::system::BiFluidSystem;
use crate::constitutive::law::{Decomposed, Exponents, PressureLaw};
use crate::constitutive::region::AdmissibleRegion;
use crate::error::Result;

/// `q̲ = inf_s q(s)/(s q'(s) + q(s))` over a log grid `1e-8 ..= 1e8`.
pub fn uniform_fraction_bound(sys: &BiFluidSystem) -> Result<(f64, f64)> {
    let mut best = (f64::INFINITY, 1.0);
    for j in -160..=160 {
        let s = 10f64.powf(j as f64 / 20.0);
        let q = sys.q(s)?;
        let v = q / (s * sys.q_prime(s)? + q);
        if v < best.0 || v.is_nan() {
            best = (v, s);
        }
    }
    Ok(best)
}

/// Smooth plateau: 1 on `[0, R)`, 0 on `[3R, ∞)`, with `|ζ'| ≤ 1/R`.
fn plateau(z: f64, r: f64) -> f64 {
    if z <= r {
        1.0
    } else if z >= 3.0 * r {
        0.0
    } else {
        let x = (z - r) / (2.0 * r);
        1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

#[derive(Debug, Clone)]
pub struct EffectivePressure {
    sys: Arc<BiFluidSystem>,
    exponents: Exponents,
    q_lower: f64,
    a_plus: f64,
    b_plus: f64,
    r_lower: f64,
    r_support: f64,
}

impl EffectivePressure {
    pub fn new(sys: Arc<BiFluidSystem>) -> Result<Self> {
        let (plus, minus) = (sys.plus(), sys.minus());
        let gamma = plus.gamma();
        let exponents = Exponents {
            gamma,
            beta: vec![minus.gamma()],
            alpha: plus.alpha().min(minus.alpha()),
            lipschitz: gamma.max(minus.gamma()),
        };
        let (q_lower, _) = uniform_fraction_bound(&sys)?;
        let (a_plus, b_plus) = plus.derivative_lower_bound();
        let (r_lower, r_support) = if b_plus > 0.0 && a_plus > 0.0 {
            let rl = (2.0 * b_plus / a_plus).powf(1.0 / (gamma - 1.0));
            let r = (2.0 * rl).max((2.0 * b_plus / a_plus).powf(1.0 / gamma));
            (rl, r)
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            sys,
            exponents,
            q_lower,
            a_plus,
            b_plus,
            r_lower,
            r_support,
        })
    }

    pub fn system(&self) -> &Arc<BiFluidSystem> {
        &self.sys
    }

    /// `q̲` from the sampled infimum.
    pub fn q_lower(&self) -> f64 {
        self.q_lower
    }

    /// `ℛ(ρ) = q̲ b₊ ζ(ρ) min{r̲, ρ}`.
    pub fn remainder(&self, rho: f64) -> f64 {
        if self.b_plus == 0.0 {
            return 0.0;
        }
        self.q_lower * self.b_plus * plateau(rho, self.r_support) * self.r_lower.min(rho)
    }
}

impl PressureLaw for EffectivePressure {
    fn name(&self) -> String {
        format!(
            "bifluid(plus = {}, minus = {})",
            self.sys.plus().name(),
            self.sys.minus().name()
        )
    }

    fn region(&self) -> &AdmissibleRegion {
        self.sys.region()
    }

    fn exponents(&self) -> &Exponents {
        &self.exponents
    }

    fn evaluation_noise(&self) -> f64 {
        // relative error of ρ₊ amplified by the phase law's elasticity
        16.0 * self.sys.root_options().rtol
    }

    fn pressure(&self, rho: f64, z: &[f64]) -> f64 {
        match self.sys.solve_rho_plus(rho, z[0]) {
            Ok(rp) => self.sys.plus().pressure(rp),
            Err(_) => f64::NAN,
        }
    }

    fn d_rho(&self, rho: f64, z: &[f64]) -> f64 {
        if rho == 0.0 && z[0] == 0.0 {
            return self.sys.plus().derivative(0.0);
        }
        let Ok(rp) = self.sys.solve_rho_plus(rho, z[0]) else {
            return f64::NAN;
        };
        match self.sys.partials_at(rho, rp) {
            Ok((dr, _)) => self.sys.plus().derivative(rp) * dr,
            Err(_) => f64::NAN,
        }
    }

    fn d_z(&self, rho: f64, z: &[f64], _i: usize) -> f64 {
        if rho == 0.0 && z[0] == 0.0 {
            return self.sys.minus().derivative(0.0);
        }
        let Ok(rp) = self.sys.solve_rho_plus(rho, z[0]) else {
            return f64::NAN;
        };
        match self.sys.partials_at(rho, rp) {
            Ok((_, dz)) => self.sys.plus().derivative(rp) * dz,
            Err(_) => f64::NAN,
        }
    }

    fn decompose(&self, rho: f64, s: &[f64]) -> Option<Decomposed> {
        if !(self.q_lower > 0.0) {
            return None;
        }
        let r = self.remainder(rho);
        Some(Decomposed {
            monotone: self.pressure(rho, &[rho * s[0]]) + r,
            remainder: r,
        })
    }

    fn remainder_support(&self) -> Option<f64> {
        (self.q_lower > 0.0).then_some(3.0 * self.r_support)
    }

    fn leading_coefficient(&self, _s: &[f64]) -> Option<f64> {
        let f = self.q_lower * self.a_plus / (2.0 * self.exponents.gamma);
        (f > 0.0).then_some(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifluid::phase::PowerPhase;
    use crate::numerics::central_derivative;

    fn law(gp: f64, gm: f64) -> EffectivePressure {
        let sys = BiFluidSystem::new(
            Arc::new(PowerPhase::pure(gp).unwrap()),
            Arc::new(PowerPhase::pure(gm).unwrap()),
            AdmissibleRegion::bi(0.0, 2.0).unwrap(),
        )
        .unwrap();
        EffectivePressure::new(Arc::new(sys)).unwrap()
    }

    #[test]
    fn linear_laws() {
        let p = law(1.0, 1.0);
        assert!((p.pressure(1.0, &[1.0]) - 2.0).abs() < 1e-14);
        assert_eq!(p.pressure(0.0, &[0.0]), 0.0);
        assert!((p.q_lower() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn analytic_partials_match_differences() {
        let p = law(2.0, 1.4);
        for &(r, z) in &[(0.5, 0.3), (2.0, 1.0), (7.0, 0.1)] {
            let fr = central_derivative(|x| p.pressure(x, &[z]), r, 1e-5);
            let fz = central_derivative(|x| p.pressure(r, &[x]), z, 1e-5);
            assert!((p.d_rho(r, &[z]) - fr).abs() < 1e-7 * fr.abs(), "{r} {z}");
            assert!((p.d_z(r, &[z], 0) - fz).abs() < 1e-7 * fz.abs(), "{r} {z}");
        }
    }

    #[test]
    fn power_phases_have_closed_form_fraction_bound() {
        // q(s) = s^{γ⁺/γ⁻} gives q̲ = 1/(1 + γ⁺/γ⁻)
        let p = law(2.0, 1.25);
        assert!((p.q_lower() - 1.0 / (1.0 + 1.6)).abs() < 1e-12);
    }
}
