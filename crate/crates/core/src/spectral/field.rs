use std::ops::{Add, Mul, Sub};

use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Real samples on a [`TorusGrid`] with a unit label.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: TorusGrid,
    data: Vec<f64>,
    units: String,
}

impl Field {
    pub fn new(grid: &TorusGrid, data: Vec<f64>, units: impl Into<String>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "field has {} samples, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                location: format!("field sample {i}"),
                value: data[i],
            });
        }
        Ok(Self::raw(grid, data, units))
    }

    pub(crate) fn raw(grid: &TorusGrid, data: Vec<f64>, units: impl Into<String>) -> Self {
        Self {
            grid: grid.clone(),
            data,
            units: units.into(),
        }
    }

    pub fn constant(grid: &TorusGrid, value: f64, units: impl Into<String>) -> Self {
        Self::raw(grid, vec![value; grid.len()], units)
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::constant(grid, 0.0, "1")
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: &TorusGrid, units: impl Into<String>, f: F) -> Self {
        let d = grid.dim();
        let data = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self::raw(grid, data, units)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Self::raw(&self.grid, self.data.iter().map(|&v| f(v)).collect(), self.units.clone())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self::raw(&self.grid, data, self.units.clone())
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// `∫_Ω f` by the grid rule (exact for trigonometric polynomials below Nyquist).
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn l1(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cyclic shift by whole cells along each axis.
    pub fn shift(&self, cells: &[usize]) -> Field {
        let g = &self.grid;
        let n = g.n();
        let mut out = vec![0.0; self.data.len()];
        for (flat, &v) in self.data.iter().enumerate() {
            let mut idx = g.multi_index(flat);
            for (a, c) in cells.iter().enumerate().take(g.dim()) {
                idx[a] = (idx[a] + c) % n;
            }
            out[g.flat_index(&idx)] = v;
        }
        Self::raw(g, out, self.units.clone())
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &Field {
    type Output = Field;
    /// Pointwise (aliased) product.
    fn mul(self, rhs: &Field) -> Field {
        let mut out = self.zip_map(rhs, |a, b| a * b);
        out.units = format!("{}*{}", self.units, rhs.units);
        out
    }
}

/// `d` scalar components on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Field>,
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Mismatch("vector field needs components".into()));
        };
        let grid = first.grid().clone();
        if components.len() != grid.dim() {
            return Err(Error::Mismatch(format!(
                "{} components on a {}-d grid",
                components.len(),
                grid.dim()
            )));
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::Mismatch("components on different grids".into()));
        }
        Ok(Self { components })
    }

    pub(crate) fn raw(components: Vec<Field>) -> Self {
        Self { components }
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::raw((0..grid.dim()).map(|_| Field::zeros(grid)).collect())
    }

    pub fn from_fn<F: Fn(&[f64]) -> Vec<f64>>(grid: &TorusGrid, units: &str, f: F) -> Self {
        let d = grid.dim();
        let values: Vec<Vec<f64>> = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self::raw(
            (0..d)
                .map(|a| Field::raw(grid, values.iter().map(|v| v[a]).collect(), units))
                .collect(),
        )
    }

    pub fn grid(&self) -> &TorusGrid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Field {
        &self.components[a]
    }

    pub fn components_mut(&mut self) -> &mut [Field] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<Field> {
        self.components
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(Field::is_finite)
    }

    /// Pointwise `|v|²`.
    pub fn norm_sq(&self) -> Field {
        let grid = self.grid();
        let mut out = vec![0.0; grid.len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.data()) {
                *o += v * v;
            }
        }
        Field::raw(grid, out, "1")
    }

    pub fn l2(&self) -> f64 {
        self.components.iter().map(|c| c.l2().powi(2)).sum::<f64>().sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.norm_sq().sup().sqrt()
    }

    /// `∫ u·v`.
    pub fn dot(&self, other: &VectorField) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum::<f64>())
            .sum::<f64>()
            * self.grid().cell_volume()
    }

    pub fn map_components(&self, f: impl Fn(&Field) -> Field) -> VectorField {
        Self::raw(self.components.iter().map(f).collect())
    }

    pub fn zip_components(&self, other: &VectorField, f: impl Fn(&Field, &Field) -> Field) -> VectorField {
        Self::raw(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    pub fn shift(&self, cells: &[usize]) -> VectorField {
        self.map_components(|c| c.shift(cells))
    }
}
