//! δ-regularization of pressure and energy.
//!
//! ```text
//! Π_δ = (1 − η_δ(|(ρ, Z⃗)|)) P + δ Σ_i (ρ^B + Z_i^B + ½ρ²Z_i^{B−2} + ½Z_i²ρ^{B−2})
//! ℋ_δ = H_{P_δ} + δ/(B − 1) · (same polynomial)
//! ```
//!
//! with `η_δ(z) = η(z/δ)` and `P_δ` the cut-off part of `Π_δ`. Each species
//! contributes its own convex pair term so that the penalty stays convex for
//! any number of species.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::helmholtz::{helmholtz_dz_of, helmholtz_of};
use super::law::{check_point, Exponents, PressureLaw};
use super::region::{fractions, AdmissibleRegion};
use crate::error::{finite, Error, Result};
use crate::numerics::QuadratureOptions;

/// Smooth cut-off: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, quintic smoothstep in
/// between.
pub fn cutoff(z: f64) -> f64 {
    if z <= 0.5 {
        1.0
    } else if z >= 1.0 {
        0.0
    } else {
        let x = 2.0 * z - 1.0;
        1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// `η'(z)`; its magnitude never exceeds 15/4.
pub fn cutoff_slope(z: f64) -> f64 {
    if z <= 0.5 || z >= 1.0 {
        0.0
    } else {
        let x = 2.0 * z - 1.0;
        -60.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizedPressureParams {
    /// Regularization strength, also the cut-off radius.
    pub delta: f64,
    /// High exponent `B` of the artificial pressure.
    pub b_exponent: f64,
}

impl RegularizedPressureParams {
    pub fn new(delta: f64, b_exponent: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        if !(b_exponent > 2.0 && b_exponent.is_finite()) {
            return Err(Error::Config(format!(
                "B must be a finite exponent above 2, got {b_exponent}"
            )));
        }
        Ok(Self { delta, b_exponent })
    }

    pub fn cutoff_width(&self) -> f64 {
        self.delta
    }

    /// Requires `B > max{9/2, γ, β_i, A}`.
    pub fn validate_for(&self, exponents: &Exponents) -> Result<()> {
        let needed = exponents.max_growth().max(exponents.lipschitz).max(4.5);
        if self.b_exponent > needed {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "B = {} must exceed max{{9/2, gamma, beta, A}} = {needed}",
                self.b_exponent
            )))
        }
    }

    /// `Σ_i (ρ^B + Z_i^B + ½ρ²Z_i^{B−2} + ½Z_i²ρ^{B−2})`, without the δ factor.
    pub fn penalty(&self, rho: f64, z: &[f64]) -> f64 {
        let b = self.b_exponent;
        let rb = rho.powf(b);
        let rb2 = rho.powf(b - 2.0);
        z.iter()
            .map(|&zi| rb + zi.powf(b) + 0.5 * rho * rho * zi.powf(b - 2.0) + 0.5 * zi * zi * rb2)
            .sum()
    }

    /// Gradient of [`Self::penalty`].
    pub fn penalty_gradient(&self, rho: f64, z: &[f64]) -> (f64, Vec<f64>) {
        let b = self.b_exponent;
        let rb1 = rho.powf(b - 1.0);
        let rb3 = if b == 3.0 { 1.0 } else { rho.powf(b - 3.0) };
        let mut d_rho = 0.0;
        let d_z = z
            .iter()
            .map(|&zi| {
                let zb3 = if b == 3.0 { 1.0 } else { zi.powf(b - 3.0) };
                let zb2 = zi.powf(b - 2.0);
                d_rho += b * rb1 + rho * zb2 + 0.5 * (b - 2.0) * zi * zi * rb3;
                b * zi.powf(b - 1.0) + 0.5 * (b - 2.0) * rho * rho * zb3 + zi * rho.powf(b - 2.0)
            })
            .collect();
        (d_rho, d_z)
    }

    /// `δ·penalty`, the artificial pressure.
    pub fn artificial_pressure(&self, rho: f64, z: &[f64]) -> f64 {
        self.delta * self.penalty(rho, z)
    }

    /// `h_δ = δ/(B − 1)·penalty`, the artificial energy.
    pub fn artificial_energy(&self, rho: f64, z: &[f64]) -> f64 {
        self.delta / (self.b_exponent - 1.0) * self.penalty(rho, z)
    }
}

/// `P_δ = (1 − η_δ(|(ρ, Z⃗)|)) P`.
#[derive(Debug, Clone)]
pub struct CutoffPressure {
    law: Arc<dyn PressureLaw>,
    delta: f64,
}

impl CutoffPressure {
    pub fn new(law: Arc<dyn PressureLaw>, delta: f64) -> Self {
        Self { law, delta }
    }

    pub fn inner(&self) -> &Arc<dyn PressureLaw> {
        &self.law
    }

    fn radius(rho: f64, z: &[f64]) -> f64 {
        (rho * rho + z.iter().map(|zi| zi * zi).sum::<f64>()).sqrt()
    }

    /// True when the characteristic from 1 to ρ never enters the cut-off
    /// ball, so that `H_{P_δ} = H_P`.
    pub fn inactive_along_path(&self, rho: f64, z: &[f64]) -> bool {
        let s = fractions(rho, z);
        let slope = (1.0 + s.iter().map(|si| si * si).sum::<f64>()).sqrt();
        rho.min(1.0) * slope >= self.delta
    }

    /// Quadrature breakpoints `τ = ln t` where `t·|(1, s⃗)|` crosses `δ/2`, `δ`.
    pub(crate) fn breakpoints(&self, rho: f64, z: &[f64]) -> [f64; 2] {
        let s = fractions(rho, z);
        let slope = (1.0 + s.iter().map(|si| si * si).sum::<f64>()).sqrt();
        [(0.5 * self.delta / slope).ln(), (self.delta / slope).ln()]
    }
}

impl PressureLaw for CutoffPressure {
    fn name(&self) -> String {
        format!("cutoff(delta={}, {})", self.delta, self.law.name())
    }

    fn region(&self) -> &AdmissibleRegion {
        self.law.region()
    }

    fn exponents(&self) -> &Exponents {
        self.law.exponents()
    }

    fn pressure(&self, rho: f64, z: &[f64]) -> f64 {
        let w = 1.0 - cutoff(Self::radius(rho, z) / self.delta);
        if w == 0.0 {
            0.0
        } else {
            w * self.law.pressure(rho, z)
        }
    }

    fn d_rho(&self, rho: f64, z: &[f64]) -> f64 {
        let r = Self::radius(rho, z);
        let w = 1.0 - cutoff(r / self.delta);
        if w == 0.0 {
            return 0.0;
        }
        let mut d = w * self.law.d_rho(rho, z);
        let slope = cutoff_slope(r / self.delta);
        if slope != 0.0 {
            d -= slope / self.delta * rho / r * self.law.pressure(rho, z);
        }
        d
    }

    fn d_z(&self, rho: f64, z: &[f64], i: usize) -> f64 {
        let r = Self::radius(rho, z);
        let w = 1.0 - cutoff(r / self.delta);
        if w == 0.0 {
            return 0.0;
        }
        let mut d = w * self.law.d_z(rho, z, i);
        let slope = cutoff_slope(r / self.delta);
        if slope != 0.0 {
            d -= slope / self.delta * z[i] / r * self.law.pressure(rho, z);
        }
        d
    }

    fn helmholtz_closed_form(&self, rho: f64, z: &[f64]) -> Option<f64> {
        if self.inactive_along_path(rho, z) {
            self.law.helmholtz_closed_form(rho, z)
        } else {
            None
        }
    }

    fn helmholtz_gradient_closed_form(&self, rho: f64, z: &[f64]) -> Option<(f64, Vec<f64>)> {
        if self.inactive_along_path(rho, z) {
            self.law.helmholtz_gradient_closed_form(rho, z)
        } else {
            None
        }
    }
}

/// A law together with its δ-regularization; evaluates `Π_δ`, `ℋ_δ` and
/// their gradients.
#[derive(Debug, Clone)]
pub struct RegularizedLaw {
    cut: CutoffPressure,
    params: RegularizedPressureParams,
    opts: QuadratureOptions,
}

impl RegularizedLaw {
    pub fn new(law: Arc<dyn PressureLaw>, params: RegularizedPressureParams) -> Self {
        Self {
            cut: CutoffPressure::new(law, params.delta),
            params,
            opts: QuadratureOptions::default(),
        }
    }

    pub fn params(&self) -> &RegularizedPressureParams {
        &self.params
    }

    pub fn law(&self) -> &Arc<dyn PressureLaw> {
        self.cut.inner()
    }

    pub fn cutoff_law(&self) -> &CutoffPressure {
        &self.cut
    }

    pub fn species(&self) -> usize {
        self.cut.species()
    }

    /// `Π_δ`, unchecked.
    pub fn pressure(&self, rho: f64, z: &[f64]) -> f64 {
        self.cut.pressure(rho, z) + self.params.artificial_pressure(rho, z)
    }

    /// `(∂_ρ Π_δ, ∂_Z Π_δ)`, unchecked.
    pub fn pressure_gradient(&self, rho: f64, z: &[f64]) -> (f64, Vec<f64>) {
        let (pr, pz) = self.params.penalty_gradient(rho, z);
        let d = self.params.delta;
        let d_rho = self.cut.d_rho(rho, z) + d * pr;
        let d_z = pz
            .iter()
            .enumerate()
            .map(|(i, g)| self.cut.d_z(rho, z, i) + d * g)
            .collect();
        (d_rho, d_z)
    }

    /// `H_{P_δ}`: closed form when the cut-off never acts along the path and
    /// the law has one, adaptive quadrature otherwise.
    pub fn cutoff_helmholtz(&self, rho: f64, z: &[f64]) -> Result<f64> {
        if rho == 0.0 {
            return helmholtz_of(|_, _| 0.0, 0.0, z, &[], self.opts);
        }
        if let Some(h) = self.cut.helmholtz_closed_form(rho, z) {
            return Ok(h);
        }
        let breaks = self.cut.breakpoints(rho, z);
        helmholtz_of(|r, zz| self.cut.pressure(r, zz), rho, z, &breaks, self.opts)
    }

    /// `ℋ_δ`, unchecked apart from quadrature failures.
    pub fn energy(&self, rho: f64, z: &[f64]) -> Result<f64> {
        Ok(self.cutoff_helmholtz(rho, z)? + self.params.artificial_energy(rho, z))
    }

    /// `(∂_ρ ℋ_δ, ∂_Z ℋ_δ)` at `ρ > 0`.
    pub fn energy_gradient(&self, rho: f64, z: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (mut d_rho, mut d_z) = match self.cut.helmholtz_gradient_closed_form(rho, z) {
            Some(g) => g,
            None => {
                let breaks = self.cut.breakpoints(rho, z);
                let h = helmholtz_of(|r, zz| self.cut.pressure(r, zz), rho, z, &breaks, self.opts)?;
                let dz = helmholtz_dz_of(
                    |r, zz, i| self.cut.d_z(r, zz, i),
                    rho,
                    z,
                    &breaks,
                    self.opts,
                )?;
                let p = self.cut.pressure(rho, z);
                let zdz: f64 = z.iter().zip(&dz).map(|(a, b)| a * b).sum();
                ((h + p - zdz) / rho, dz)
            }
        };
        let (pr, pz) = self.params.penalty_gradient(rho, z);
        let c = self.params.delta / (self.params.b_exponent - 1.0);
        d_rho += c * pr;
        for (d, g) in d_z.iter_mut().zip(pz) {
            *d += c * g;
        }
        Ok((d_rho, d_z))
    }
}

/// Validated `Π_δ(ρ, Z⃗)`.
pub fn regularized_pressure(
    params: &RegularizedPressureParams,
    law: Arc<dyn PressureLaw>,
    rho: f64,
    z: &[f64],
) -> Result<f64> {
    check_point(rho, z, law.species())?;
    let name = law.name();
    let reg = RegularizedLaw::new(law, *params);
    finite(reg.pressure(rho, z), || {
        format!("regularized {name} at rho = {rho}, Z = {z:?}")
    })
}

/// Validated `ℋ_δ(ρ, Z⃗)`.
pub fn regularized_helmholtz(
    params: &RegularizedPressureParams,
    law: Arc<dyn PressureLaw>,
    rho: f64,
    z: &[f64],
) -> Result<f64> {
    check_point(rho, z, law.species())?;
    let name = law.name();
    let reg = RegularizedLaw::new(law, *params);
    let h = reg.energy(rho, z)?;
    finite(h, || format!("regularized energy of {name} at rho = {rho}, Z = {z:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::catalog::HomogeneousLaw;
    use crate::constitutive::helmholtz::helmholtz;
    use crate::numerics::central_derivative;

    fn e1() -> Arc<dyn PressureLaw> {
        Arc::new(
            HomogeneousLaw::separable(2.0, vec![2.0], vec![], AdmissibleRegion::bi(0.0, 2.0).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(0.3), 1.0);
        assert_eq!(cutoff(1.0), 0.0);
        assert!((cutoff(0.75) - 0.5).abs() < 1e-15);
        let max_slope = (0..=1000)
            .map(|j| -cutoff_slope(0.5 + 0.0005 * j as f64))
            .fold(0.0, f64::max);
        assert!((max_slope - 3.75).abs() < 1e-12);
        let d = central_derivative(cutoff, 0.6, 1e-4);
        assert!((d - cutoff_slope(0.6)).abs() < 1e-8);
    }

    #[test]
    fn penalty_gradient_matches_differences() {
        let p = RegularizedPressureParams::new(1.0, 10.0).unwrap();
        let (r, z) = (1.3, [0.7, 0.4]);
        let (gr, gz) = p.penalty_gradient(r, &z);
        let fr = central_derivative(|x| p.penalty(x, &z), r, 1e-4);
        assert!((gr - fr).abs() < 1e-7 * fr.abs());
        for i in 0..2 {
            let mut zz = z;
            let fz = central_derivative(
                |x| {
                    zz[i] = x;
                    p.penalty(r, &zz)
                },
                z[i],
                1e-4,
            );
            assert!((gz[i] - fz).abs() < 1e-7 * fz.abs());
        }
    }

    #[test]
    fn pressure_gradient_inside_annulus() {
        let reg = RegularizedLaw::new(e1(), RegularizedPressureParams::new(1.0, 5.0).unwrap());
        let (r, z) = (0.5, [0.3]);
        let (gr, gz) = reg.pressure_gradient(r, &z);
        let fr = central_derivative(|x| reg.pressure(x, &z), r, 1e-5);
        let fz = central_derivative(|x| reg.pressure(r, &[x]), z[0], 1e-5);
        assert!((gr - fr).abs() < 1e-8);
        assert!((gz[0] - fz).abs() < 1e-8);
    }

    #[test]
    fn energy_gradient_satisfies_pde_across_cutoff() {
        let reg = RegularizedLaw::new(e1(), RegularizedPressureParams::new(0.8, 5.0).unwrap());
        let (r, z) = (0.6, [0.2]);
        let h = reg.energy(r, &z).unwrap();
        let (gr, gz) = reg.energy_gradient(r, &z).unwrap();
        // h_δ is homogeneous of degree B, so ℋ_δ solves the PDE with Π_δ
        let res = r * gr + z[0] * gz[0] - h - reg.pressure(r, &z);
        assert!(res.abs() < 1e-10, "{res}");
        let fr = central_derivative(|x| reg.energy(x, &z).unwrap(), r, 1e-4);
        assert!((gr - fr).abs() < 1e-7, "{gr} vs {fr}");
    }

    #[test]
    fn inactive_cutoff_reduces_to_plain_energy() {
        let law = e1();
        let p = RegularizedPressureParams::new(1e-2, 10.0).unwrap();
        let reg = RegularizedLaw::new(law.clone(), p);
        let h = reg.energy(2.0, &[1.0]).unwrap();
        let plain = helmholtz(law.as_ref(), 2.0, &[1.0]).unwrap() + p.artificial_energy(2.0, &[1.0]);
        assert!((h - plain).abs() < 1e-12 * plain.abs());
    }
}
