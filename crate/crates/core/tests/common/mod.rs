//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use bifluid_lab::cli::RunConfig;
use bifluid_lab::spectral::GridSpec;

/// Adaptive Simpson on `[a, b]`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `ρ ∫₁^ρ P(t, t Z/ρ)/t² dt`, integrated in `u = ln t`.
pub fn helmholtz_oracle(p: &dyn Fn(f64, &[f64]) -> f64, rho: f64, z: &[f64]) -> f64 {
    let s: Vec<f64> = z.iter().map(|zi| zi / rho).collect();
    let g = |u: f64| {
        let t = u.exp();
        let zz: Vec<f64> = s.iter().map(|si| si * t).collect();
        p(t, &zz) / t
    };
    rho * simpson(&g, 0.0, rho.ln(), 1e-14)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// The reference problem shrunk for fast tests.
pub fn small_problem(n: usize, n_modes: usize, t_end: f64) -> RunConfig {
    let mut c = RunConfig::default_problem();
    c.grid = GridSpec {
        dimension: 2,
        points_per_axis: n,
    };
    c.n_modes = n_modes;
    c.t_end = t_end;
    c
}
