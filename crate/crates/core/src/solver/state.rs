use serde::Serialize;

use crate::constitutive::AdmissibleRegion;
use crate::spectral::{Field, ModeBasis, VectorField};

/// Densities on the grid plus Galerkin velocity coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    pub rho: Field,
    pub z: Vec<Field>,
    /// Component-major: `u_coeffs[a·N + j]` multiplies mode `j` of component `a`.
    pub u_coeffs: Vec<f64>,
    pub time: f64,
    pub step: usize,
}

impl MixtureState {
    pub fn velocity(&self, basis: &ModeBasis) -> VectorField {
        basis.synthesize_vector(&self.u_coeffs, "L/T")
    }

    /// `ρ + Σ Z_i`.
    pub fn inertial_density(&self) -> Field {
        let mut r = self.rho.clone();
        for z in &self.z {
            for (a, b) in r.data_mut().iter_mut().zip(z.data()) {
                *a += b;
            }
        }
        r
    }

    pub fn masses(&self) -> (f64, Vec<f64>) {
        (self.rho.integral(), self.z.iter().map(Field::integral).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite()
            && self.z.iter().all(Field::is_finite)
            && self.u_coeffs.iter().all(|c| c.is_finite())
    }
}

/// Positivity and band monitor for one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinPrincipleRecord {
    pub inf_rho: f64,
    /// `sup_x max(0, a̲_i ρ − Z_i, Z_i − ā_i ρ)` per species.
    pub band_defect_sup: Vec<f64>,
    /// The same defect in L¹.
    pub band_defect_l1: Vec<f64>,
    /// Flat grid index of the largest defect, if any is positive.
    pub worst_cell: Option<usize>,
    pub pass: bool,
}

impl MinPrincipleRecord {
    pub fn max_sup_defect(&self) -> f64 {
        self.band_defect_sup.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_l1_defect(&self) -> f64 {
        self.band_defect_l1.iter().copied().fold(0.0, f64::max)
    }
}

/// Reports `inf ρ` and the band defects; passes iff `inf ρ > 0` and every
/// defect is at most `threshold`.
pub fn check_min_principle(
    state: &MixtureState,
    region: &AdmissibleRegion,
    threshold: f64,
) -> MinPrincipleRecord {
    let rho = state.rho.data();
    let cell = state.rho.grid().cell_volume();
    let mut sup = Vec::with_capacity(state.z.len());
    let mut l1 = Vec::with_capacity(state.z.len());
    let mut worst = (0.0, None);
    for (i, z) in state.z.iter().enumerate() {
        let (lo, hi) = (region.a_lower()[i], region.a_upper()[i]);
        let mut s = 0.0f64;
        let mut total = 0.0;
        for (x, (&r, &zi)) in rho.iter().zip(z.data()).enumerate() {
            let d = (lo * r - zi).max(zi - hi * r).max(0.0);
            total += d;
            if d > s {
                s = d;
            }
            if d > worst.0 {
                worst = (d, Some(x));
            }
        }
        sup.push(s);
        l1.push(total * cell);
    }
    let inf_rho = state.rho.min();
    let pass = inf_rho > 0.0 && sup.iter().all(|&d| d <= threshold);
    MinPrincipleRecord {
        inf_rho,
        band_defect_sup: sup,
        band_defect_l1: l1,
        worst_cell: worst.1,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn single_cell_band_violation() {
        let g = TorusGrid::new(2, 8).unwrap();
        let region = AdmissibleRegion::bi(0.0, 0.8).unwrap();
        let rho = Field::constant(&g, 2.0, "1");
        let mut z = Field::constant(&g, 1.0, "1");
        z.data_mut()[9] = 1.1 * 0.8 * 2.0;
        let state = MixtureState {
            rho,
            z: vec![z],
            u_coeffs: vec![],
            time: 0.0,
            step: 0,
        };
        let rec = check_min_principle(&state, &region, 1e-10);
        assert!((rec.band_defect_sup[0] - 0.1 * 0.8 * 2.0).abs() < 1e-14);
        assert_eq!(rec.worst_cell, Some(9));
        assert!(!rec.pass);
        assert!((rec.band_defect_l1[0] - 0.16 * g.cell_volume()).abs() < 1e-14);
    }
}
