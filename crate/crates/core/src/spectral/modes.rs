use rustfft::num_complex::Complex64;

use super::field::{Field, VectorField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Constant,
    Cos,
    Sin,
}

/// One real, L²-normalized trigonometric mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Signed wavevector (lexicographically positive, or zero).
    pub k: [i64; 3],
    pub kind: ModeKind,
    flat: usize,
    neg: usize,
}

impl Mode {
    pub fn k_sq(&self) -> i64 {
        self.k.iter().map(|k| k * k).sum()
    }
}

/// The first `N` real modes ordered by `|ξ|`, ties broken by the signed
/// wavevector in lexicographic order, cosine before sine. Nyquist
/// wavevectors are excluded since their sine partner vanishes on the grid.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    grid: TorusGrid,
    modes: Vec<Mode>,
}

fn ordered_modes(grid: &TorusGrid) -> Vec<Mode> {
    let d = grid.dim();
    let mut reps: Vec<([i64; 3], usize)> = Vec::new();
    for flat in 0..grid.len() {
        if grid.touches_nyquist(flat) {
            continue;
        }
        let idx = grid.multi_index(flat);
        let mut k = [0i64; 3];
        for a in 0..d {
            k[a] = grid.wavenumber(idx[a]);
        }
        let positive = k.iter().find(|&&c| c != 0).map_or(true, |&c| c > 0);
        if positive {
            reps.push((k, flat));
        }
    }
    reps.sort_by_key(|(k, _)| (k.iter().map(|c| c * c).sum::<i64>(), *k));
    let mut modes = Vec::with_capacity(2 * reps.len());
    for (k, flat) in reps {
        let neg = grid.negate(flat);
        if flat == 0 {
            modes.push(Mode { k, kind: ModeKind::Constant, flat, neg });
        } else {
            modes.push(Mode { k, kind: ModeKind::Cos, flat, neg });
            modes.push(Mode { k, kind: ModeKind::Sin, flat, neg });
        }
    }
    modes
}

impl ModeBasis {
    pub fn new(grid: &TorusGrid, n_modes: usize) -> Result<Self> {
        let mut modes = ordered_modes(grid);
        if n_modes > modes.len() {
            return Err(Error::Config(format!(
                "{n_modes} modes requested, the grid carries {}",
                modes.len()
            )));
        }
        modes.truncate(n_modes);
        Ok(Self {
            grid: grid.clone(),
            modes,
        })
    }

    /// Every representable real mode, `(n − 1)^d` of them.
    pub fn full(grid: &TorusGrid) -> Self {
        Self {
            grid: grid.clone(),
            modes: ordered_modes(grid),
        }
    }

    pub fn total_modes(grid: &TorusGrid) -> usize {
        (grid.n() - 1).pow(grid.dim() as u32)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Largest `|k_a|` over the retained modes.
    pub fn max_wavenumber(&self) -> i64 {
        self.modes
            .iter()
            .flat_map(|m| m.k.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    fn norms(&self) -> (f64, f64) {
        let vol = self.grid.volume();
        (vol.sqrt(), (2.0 * vol).sqrt())
    }

    pub(crate) fn coefficients_of_spectrum(&self, spec: &[Complex64]) -> Vec<f64> {
        let l = self.grid.len() as f64;
        let (c0, c1) = self.norms();
        self.modes
            .iter()
            .map(|m| match m.kind {
                ModeKind::Constant => c0 * spec[m.flat].re / l,
                ModeKind::Cos => c1 * spec[m.flat].re / l,
                ModeKind::Sin => -c1 * spec[m.flat].im / l,
            })
            .collect()
    }

    pub(crate) fn spectrum_of(&self, coeffs: &[f64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.modes.len(), "coefficient count");
        let l = self.grid.len() as f64;
        let vol = self.grid.volume();
        let a0 = l / vol.sqrt();
        let a1 = (2.0 / vol).sqrt() * l / 2.0;
        let mut spec = vec![Complex64::default(); self.grid.len()];
        for (m, &c) in self.modes.iter().zip(coeffs) {
            match m.kind {
                ModeKind::Constant => spec[m.flat] += c * a0,
                ModeKind::Cos => {
                    spec[m.flat] += c * a1;
                    spec[m.neg] += c * a1;
                }
                ModeKind::Sin => {
                    spec[m.flat] += Complex64::new(0.0, -c * a1);
                    spec[m.neg] += Complex64::new(0.0, c * a1);
                }
            }
        }
        spec
    }

    /// `⟨f, φ_j⟩` for every retained mode.
    pub fn coefficients(&self, f: &Field) -> Vec<f64> {
        self.coefficients_of_spectrum(&self.grid.forward(f.data()))
    }

    /// `Σ_j c_j φ_j`.
    pub fn synthesize(&self, coeffs: &[f64], units: &str) -> Field {
        Field::raw(&self.grid, self.grid.inverse(self.spectrum_of(coeffs)), units)
    }

    /// Orthogonal L² projection onto the retained modes.
    pub fn project(&self, f: &Field) -> Field {
        self.synthesize(&self.coefficients(f), f.units())
    }

    pub fn project_vector(&self, v: &VectorField) -> VectorField {
        v.map_components(|c| self.project(c))
    }

    /// Coefficients of each component, concatenated component-major.
    pub fn vector_coefficients(&self, v: &VectorField) -> Vec<f64> {
        v.components().iter().flat_map(|c| self.coefficients(c)).collect()
    }

    pub fn synthesize_vector(&self, coeffs: &[f64], units: &str) -> VectorField {
        let n = self.len();
        VectorField::raw(
            coeffs
                .chunks(n)
                .map(|c| self.synthesize(c, units))
                .collect(),
        )
    }
}

/// `𝒫_N f` onto the first `N` modes of the fixed ordering.
pub fn project_modes(f: &Field, n_modes: usize) -> Result<Field> {
    Ok(ModeBasis::new(f.grid(), n_modes)?.project(f))
}
