use rustfft::num_complex::Complex64;

use super::field::{Field, VectorField};
use super::grid::TorusGrid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn per_length(units: &str) -> String {
    format!("{units}/L")
}

fn spectral_map(f: &Field, units: String, symbol: impl Fn(usize) -> Complex64) -> Field {
    let g = f.grid();
    let mut spec = g.forward(f.data());
    for (k, c) in spec.iter_mut().enumerate() {
        *c *= symbol(k);
    }
    Field::raw(g, g.inverse(spec), units)
}

/// Spectral gradient.
pub fn grad(f: &Field) -> VectorField {
    let g = f.grid();
    let spec = g.forward(f.data());
    let comps = (0..g.dim())
        .map(|a| {
            let s: Vec<Complex64> = spec
                .iter()
                .enumerate()
                .map(|(k, &c)| c * I * g.xi_vec(k)[a])
                .collect();
            Field::raw(g, g.inverse(s), per_length(f.units()))
        })
        .collect();
    VectorField::raw(comps)
}

/// Spectral divergence. The mean mode of the result is exactly zero.
pub fn div(v: &VectorField) -> Field {
    let g = v.grid();
    let mut acc = vec![Complex64::default(); g.len()];
    for (a, c) in v.components().iter().enumerate() {
        let spec = g.forward(c.data());
        for (k, (o, s)) in acc.iter_mut().zip(spec).enumerate() {
            *o += s * I * g.xi_vec(k)[a];
        }
    }
    acc[0] = Complex64::default();
    Field::raw(g, g.inverse(acc), per_length(v.component(0).units()))
}

/// Laplacian with symbol `−|ξ|²` (Nyquist axes contribute zero).
pub fn laplacian(f: &Field) -> Field {
    let g = f.grid();
    spectral_map(f, format!("{}/L^2", f.units()), |k| {
        Complex64::new(-g.xi_sq(k), 0.0)
    })
}

/// `Δ⁻¹` on the mean-free part; returns a mean-free field.
pub fn lap_inv(f: &Field) -> Field {
    let g = f.grid();
    spectral_map(f, format!("{}*L^2", f.units()), |k| {
        let s = g.xi_sq(k);
        if s == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(-1.0 / s, 0.0)
        }
    })
}

/// `∇Δ⁻¹(f − f̄)`: a right inverse of the divergence with zero-mean components.
pub fn inv_div(f: &Field) -> VectorField {
    grad(&lap_inv(f)).map_components(|c| c.clone().with_units(format!("{}*L", f.units())))
}

/// Projection with symbol `ξ ⊗ ξ / |ξ|²` onto gradient fields; kills the mean.
pub fn riesz(v: &VectorField) -> VectorField {
    let g = v.grid();
    let d = g.dim();
    let specs: Vec<Vec<Complex64>> = v.components().iter().map(|c| g.forward(c.data())).collect();
    let mut out = vec![vec![Complex64::default(); g.len()]; d];
    for k in 0..g.len() {
        let s = g.xi_sq(k);
        if s == 0.0 {
            continue;
        }
        let xi = g.xi_vec(k);
        let mut dot = Complex64::default();
        for a in 0..d {
            dot += specs[a][k] * xi[a];
        }
        for a in 0..d {
            out[a][k] = dot * (xi[a] / s);
        }
    }
    VectorField::raw(
        out.into_iter()
            .enumerate()
            .map(|(a, s)| Field::raw(g, g.inverse(s), v.component(a).units()))
            .collect(),
    )
}

/// Drops every spectral index with `|k_a| > n/3` on some axis (2/3 rule).
pub fn dealias(f: &Field) -> Field {
    let g = f.grid();
    let cut = (g.n() / 3) as i64;
    spectral_map(f, f.units().to_string(), |k| {
        let idx = g.multi_index(k);
        let keep = idx[..g.dim()]
            .iter()
            .all(|&m| !g.is_nyquist(m) && g.wavenumber(m).abs() <= cut);
        if keep {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        }
    })
}

/// Number of points per axis that makes a product of `p` factors alias-free.
pub fn padded_size(n: usize, factors: usize) -> usize {
    let m = (n * (factors + 1)).div_ceil(2);
    m + m % 2
}

/// Alias-free product of band-limited factors by zero padding to
/// [`padded_size`], truncated back to the original grid. Nyquist content
/// of the inputs is discarded.
pub fn padded_product(factors: &[&Field]) -> Field {
    assert!(!factors.is_empty(), "padded product of nothing");
    let g = factors[0].grid();
    if factors.len() == 1 {
        return factors[0].clone();
    }
    let big = g.padded(padded_size(g.n(), factors.len()));
    let mut prod = vec![1.0; big.len()];
    for f in factors {
        assert_eq!(f.grid(), g, "padded product across grids");
        let up = g.resample_spectrum(&g.forward(f.data()), &big);
        for (p, v) in prod.iter_mut().zip(big.inverse(up)) {
            *p *= v;
        }
    }
    let down = big.resample_spectrum(&big.forward(&prod), g);
    let units = factors.iter().map(|f| f.units()).collect::<Vec<_>>().join("*");
    Field::raw(g, g.inverse(down), units)
}

/// `‖f‖₂` computed from the spectrum.
pub fn spectral_l2(f: &Field) -> f64 {
    let g = f.grid();
    let spec = g.forward(f.data());
    let sum: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
    (sum * g.cell_volume() / g.len() as f64).sqrt()
}

/// A band-limited trigonometric polynomial with seeded random coefficients
/// on modes `|k_a| ≤ kmax`.
pub fn random_band_limited(grid: &TorusGrid, kmax: usize, seed: u64) -> Field {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let kmax = kmax.min(grid.n() / 2 - 1) as i64;
    let mut spec = vec![Complex64::default(); grid.len()];
    for k in 0..grid.len() {
        let idx = grid.multi_index(k);
        let inside = idx[..grid.dim()]
            .iter()
            .all(|&m| !grid.is_nyquist(m) && grid.wavenumber(m).abs() <= kmax);
        let nk = grid.negate(k);
        if inside && k <= nk {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spec[k] = c;
            spec[nk] = c.conj();
            if k == nk {
                spec[k] = Complex64::new(c.re, 0.0);
            }
        }
    }
    for c in spec.iter_mut() {
        *c *= grid.len() as f64 * 0.25;
    }
    Field::raw(grid, grid.inverse(spec), "1")
}
