use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable grid description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: usize,
    pub points_per_axis: usize,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

struct Inner {
    dim: usize,
    n: usize,
    plans: Plans,
    padded: Mutex<BTreeMap<usize, TorusGrid>>,
}

/// Uniform grid on `(0, 2π)^d` with cached FFT plans. Cheap to clone.
#[derive(Clone)]
pub struct TorusGrid {
    inner: Arc<Inner>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dimension", &self.inner.dim)
            .field("points_per_axis", &self.inner.n)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.dim == other.inner.dim && self.inner.n == other.inner.n
    }
}

impl TorusGrid {
    /// `d ∈ {1, 2, 3}`, `n` a power of two, at least 4.
    pub fn new(dimension: usize, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::Config(format!(
                "grid dimension must be 1, 2 or 3, got {dimension}"
            )));
        }
        if points_per_axis < 4 || !points_per_axis.is_power_of_two() {
            return Err(Error::Config(format!(
                "points per axis must be a power of two >= 4, got {points_per_axis}"
            )));
        }
        Ok(Self::unchecked(dimension, points_per_axis))
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        Self::new(spec.dimension, spec.points_per_axis)
    }

    fn unchecked(dim: usize, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Self {
            inner: Arc::new(Inner {
                dim,
                n,
                plans,
                padded: Mutex::new(BTreeMap::new()),
            }),
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            dimension: self.inner.dim,
            points_per_axis: self.inner.n,
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn len(&self) -> usize {
        self.inner.n.pow(self.inner.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.inner.n as f64
    }

    /// `|Ω| = (2π)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.inner.dim as i32)
    }

    /// Quadrature weight of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Per-axis multi-index of a flat (row-major, last axis fastest) index.
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let n = self.inner.n;
        let mut out = [0; 3];
        let mut rest = flat;
        for a in (0..self.inner.dim).rev() {
            out[a] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.inner.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.inner.n + i)
    }

    /// Physical coordinates of a grid point.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.inner.dim {
            x[a] = idx[a] as f64 * h;
        }
        x
    }

    /// Signed wavenumber of a per-axis index; the Nyquist index maps to `−n/2`.
    pub fn wavenumber(&self, m: usize) -> i64 {
        let n = self.inner.n;
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    pub fn is_nyquist(&self, m: usize) -> bool {
        m == self.inner.n / 2
    }

    /// Differentiation symbol along one axis; zero on the Nyquist index,
    /// whose sine partner vanishes on the grid.
    pub fn xi(&self, m: usize) -> f64 {
        if self.is_nyquist(m) {
            0.0
        } else {
            self.wavenumber(m) as f64
        }
    }

    /// Effective wavevector of a flat spectral index.
    pub fn xi_vec(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut k = [0.0; 3];
        for a in 0..self.inner.dim {
            k[a] = self.xi(idx[a]);
        }
        k
    }

    pub fn xi_sq(&self, flat: usize) -> f64 {
        self.xi_vec(flat).iter().map(|k| k * k).sum()
    }

    /// True if any axis sits on the Nyquist index.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        idx[..self.inner.dim].iter().any(|&m| self.is_nyquist(m))
    }

    /// Flat index of `−k`.
    pub fn negate(&self, flat: usize) -> usize {
        let n = self.inner.n;
        let idx = self.multi_index(flat);
        let mut neg = [0; 3];
        for a in 0..self.inner.dim {
            neg[a] = (n - idx[a]) % n;
        }
        self.flat_index(&neg)
    }

    /// Unnormalized forward transform `F_k = Σ_x f(x) e^{−ik·x}`.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(f.len(), self.len());
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.inner.plans.forward);
        buf
    }

    /// Inverse of [`forward`](Self::forward); returns the real part.
    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inverse_complex(&mut spec);
        spec.into_iter().map(|c| c.re).collect()
    }

    pub(crate) fn inverse_complex(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.inner.plans.inverse);
        let scale = 1.0 / self.len() as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.inner.n;
        let dim = self.inner.dim;
        let len = buf.len();
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        if dim == 1 {
            return;
        }
        let mut line = vec![Complex64::default(); n];
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..len).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (j, c) in line.iter_mut().enumerate() {
                        *c = buf[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, c) in line.iter().enumerate() {
                        buf[base + j * stride] = *c;
                    }
                }
            }
        }
    }

    /// Grid with `m` points per axis (any even `m`), used for zero padding.
    pub(crate) fn padded(&self, m: usize) -> TorusGrid {
        if m == self.inner.n {
            return self.clone();
        }
        let mut cache = self.inner.padded.lock().expect("padded grid cache");
        cache
            .entry(m)
            .or_insert_with(|| TorusGrid::unchecked(self.inner.dim, m))
            .clone()
    }

    /// Copies a spectrum onto a grid with `m` points per axis, dropping
    /// Nyquist and out-of-band indices. Scales so that sample values match.
    pub(crate) fn resample_spectrum(&self, spec: &[Complex64], target: &TorusGrid) -> Vec<Complex64> {
        let dim = self.inner.dim;
        let (n, m) = (self.inner.n, target.n());
        let mut out = vec![Complex64::default(); target.len()];
        let scale = target.len() as f64 / self.len() as f64;
        let half = n.min(m) / 2;
        for (flat, &c) in spec.iter().enumerate() {
            let idx = self.multi_index(flat);
            let mut dst = [0usize; 3];
            let mut keep = true;
            for a in 0..dim {
                let k = self.wavenumber(idx[a]);
                if k.unsigned_abs() as usize >= half {
                    keep = false;
                    break;
                }
                dst[a] = k.rem_euclid(m as i64) as usize;
            }
            if keep {
                out[target.flat_index(&dst)] = c * scale;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(2, 12).is_err());
        assert!(TorusGrid::new(4, 8).is_err());
        assert!(TorusGrid::new(2, 8).is_ok());
    }

    #[test]
    fn round_trip_3d() {
        let g = TorusGrid::new(3, 8).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let back = g.inverse(g.forward(&f));
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13 * 5.0);
        }
    }

    #[test]
    fn single_mode_lands_on_its_index() {
        let g = TorusGrid::new(2, 8).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| g.point(i)[1].cos()).collect();
        let spec = g.forward(&f);
        let k = g.flat_index(&[0, 1]);
        assert!((spec[k].re - 32.0).abs() < 1e-12);
        assert!((spec[g.negate(k)].re - 32.0).abs() < 1e-12);
        assert!(spec[0].norm() < 1e-12);
    }
}
