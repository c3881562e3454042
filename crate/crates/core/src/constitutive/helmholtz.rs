//! Helmholtz free energy `H_P(ρ, Z⃗) = ρ ∫₁^ρ P(t, t s⃗)/t² dt`, `s⃗ = Z⃗/ρ`.
//!
//! The integral is evaluated in the variable `τ = ln t`, which turns the
//! `t^{α−2}` behaviour of the integrand near vacuum into an exponentially
//! decaying tail:
//!
//! ```text
//! H       = ρ ∫_0^{ln ρ} P(e^τ, e^τ s⃗) e^{−τ} dτ
//! ∂_{Z_i}H =   ∫_0^{ln ρ} ∂_{Z_i}P(e^τ, e^τ s⃗) dτ
//! ∂_ρ H    = (H + P − Σ Z_i ∂_{Z_i}H) / ρ
//! ```
//!
//! The last line is the first-order PDE solved by `H_P`, read at the point.

use super::law::{check_point, PressureLaw};
use super::region::fractions;
use crate::error::{finite, Error, Result};
use crate::numerics::{integrate, richardson_derivative, QuadratureOptions};

/// Splits `[0, ln ρ]` at the given interior breakpoints before integrating.
fn integrate_log_path<F>(
    mut f: F,
    rho: f64,
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let end = rho.ln();
    let (lo, hi) = if end < 0.0 { (end, 0.0) } else { (0.0, end) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut nodes = vec![lo];
    nodes.extend(cuts);
    nodes.push(hi);
    let mut total = 0.0;
    for w in nodes.windows(2) {
        total += integrate(&mut f, w[0], w[1], opts)?.value;
    }
    Ok(if end < 0.0 { -total } else { total })
}

/// Helmholtz energy of an arbitrary pressure function by quadrature.
///
/// `breaks` are values of `τ = ln t` where the integrand loses smoothness.
pub(crate) fn helmholtz_of<P>(
    pressure: P,
    rho: f64,
    z: &[f64],
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<f64>
where
    P: Fn(f64, &[f64]) -> f64,
{
    if rho == 0.0 {
        return vacuum(z).map(|_| 0.0);
    }
    let s = fractions(rho, z);
    let mut buf = vec![0.0; s.len()];
    let integral = integrate_log_path(
        |tau| {
            let t = tau.exp();
            for (b, si) in buf.iter_mut().zip(&s) {
                *b = t * si;
            }
            pressure(t, &buf) / t
        },
        rho,
        breaks,
        opts,
    )?;
    Ok(rho * integral)
}

/// `∂_{Z_i} H` along the characteristic, for all species.
pub(crate) fn helmholtz_dz_of<D>(
    d_z: D,
    rho: f64,
    z: &[f64],
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<Vec<f64>>
where
    D: Fn(f64, &[f64], usize) -> f64,
{
    let s = fractions(rho, z);
    let mut buf = vec![0.0; s.len()];
    (0..z.len())
        .map(|i| {
            integrate_log_path(
                |tau| {
                    let t = tau.exp();
                    for (b, si) in buf.iter_mut().zip(&s) {
                        *b = t * si;
                    }
                    d_z(t, &buf, i)
                },
                rho,
                breaks,
                opts,
            )
        })
        .collect()
}

fn vacuum(z: &[f64]) -> Result<()> {
    if z.iter().all(|&zi| zi == 0.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Helmholtz energy is defined at rho = 0 only for Z = 0, got Z = {z:?}"
        )))
    }
}

/// `H_P(ρ, Z⃗)` by adaptive quadrature, regardless of any closed form the
/// law may carry.
pub fn helmholtz(law: &dyn PressureLaw, rho: f64, z: &[f64]) -> Result<f64> {
    helmholtz_with(law, rho, z, QuadratureOptions::default())
}

pub fn helmholtz_with(
    law: &dyn PressureLaw,
    rho: f64,
    z: &[f64],
    opts: QuadratureOptions,
) -> Result<f64> {
    check_point(rho, z, law.species())?;
    let h = helmholtz_of(|r, zz| law.pressure(r, zz), rho, z, &[], opts)?;
    finite(h, || format!("H_P of {} at rho = {rho}, Z = {z:?}", law.name()))
}

/// `H_P` from the closed form when the law provides one, by quadrature
/// otherwise.
pub fn helmholtz_fast(law: &dyn PressureLaw, rho: f64, z: &[f64]) -> Result<f64> {
    check_point(rho, z, law.species())?;
    if rho == 0.0 {
        return vacuum(z).map(|_| 0.0);
    }
    match law.helmholtz_closed_form(rho, z) {
        Some(h) => finite(h, || format!("H_P of {} at rho = {rho}, Z = {z:?}", law.name())),
        None => helmholtz(law, rho, z),
    }
}

/// `(∂_ρ H_P, ∂_Z H_P)` at an interior point, closed form when available.
pub fn helmholtz_gradient(law: &dyn PressureLaw, rho: f64, z: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_point(rho, z, law.species())?;
    if !(rho > 0.0) {
        return Err(Error::Domain(
            "Helmholtz gradient requires rho > 0".to_string(),
        ));
    }
    if let Some(g) = law.helmholtz_gradient_closed_form(rho, z) {
        return Ok(g);
    }
    let opts = QuadratureOptions::default();
    let h = helmholtz_of(|r, zz| law.pressure(r, zz), rho, z, &[], opts)?;
    let dz = helmholtz_dz_of(|r, zz, i| law.d_z(r, zz, i), rho, z, &[], opts)?;
    let p = law.pressure(rho, z);
    let d_rho = (h + p - z.iter().zip(&dz).map(|(zi, di)| zi * di).sum::<f64>()) / rho;
    Ok((d_rho, dz))
}

/// `|ρ ∂_ρH + Σ Z_i ∂_{Z_i}H − H − P|` with the partials of the quadrature
/// energy taken by Richardson-extrapolated central differences.
pub fn helmholtz_pde_residual(law: &dyn PressureLaw, rho: f64, z: &[f64]) -> Result<f64> {
    check_point(rho, z, law.species())?;
    let h0 = helmholtz(law, rho, z)?;
    let mut err = None;
    let mut eval = |r: f64, zz: &[f64]| match helmholtz(law, r, zz) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let step = |x: f64| 1e-3 * x.abs().max(1e-3);
    let d_rho = richardson_derivative(|r| eval(r, z), rho, step(rho).min(0.2 * rho));
    let mut lhs = rho * d_rho;
    for i in 0..z.len() {
        if z[i] == 0.0 {
            continue;
        }
        let mut zz = z.to_vec();
        let d = richardson_derivative(
            |zi| {
                zz[i] = zi;
                eval(rho, &zz)
            },
            z[i],
            step(z[i]).min(0.2 * z[i]),
        );
        lhs += z[i] * d;
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok((lhs - h0 - law.pressure(rho, z)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::catalog::{HomogeneousLaw, OscillatingLaw};
    use crate::constitutive::region::AdmissibleRegion;

    #[test]
    fn quadrature_matches_power_closed_form() {
        let law = HomogeneousLaw::power(2.0, AdmissibleRegion::bi(0.0, 1.0).unwrap()).unwrap();
        for &rho in &[1e-3, 0.5, 2.0, 1e3] {
            let q = helmholtz(&law, rho, &[0.0]).unwrap();
            let exact = rho * rho - rho;
            assert!((q - exact).abs() <= 1e-10 * exact.abs().max(1e-300), "{rho}: {q} vs {exact}");
        }
    }

    #[test]
    fn energy_vanishes_at_unit_density_and_vacuum() {
        let law = HomogeneousLaw::separable(2.0, vec![2.0], vec![], AdmissibleRegion::bi(0.0, 2.0).unwrap())
            .unwrap();
        assert_eq!(helmholtz(&law, 1.0, &[1.0]).unwrap(), 0.0);
        assert_eq!(helmholtz(&law, 0.0, &[0.0]).unwrap(), 0.0);
        assert!(helmholtz(&law, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn quadrature_gradient_satisfies_pde() {
        let law = OscillatingLaw::new(2.0, vec![1.5], 0.3, 2.0, AdmissibleRegion::bi(0.0, 1.0).unwrap())
            .unwrap();
        let (rho, z) = (3.0, [1.2]);
        let (d_rho, d_z) = helmholtz_gradient(&law, rho, &z).unwrap();
        let h = |r: f64, zz: f64| helmholtz(&law, r, &[zz]).unwrap();
        let fd_rho = richardson_derivative(|r| h(r, z[0]), rho, 1e-3);
        let fd_z = richardson_derivative(|zz| h(rho, zz), z[0], 1e-3);
        assert!((d_rho - fd_rho).abs() < 1e-8 * (1.0 + fd_rho.abs()));
        assert!((d_z[0] - fd_z).abs() < 1e-8 * (1.0 + fd_z.abs()));
    }

    #[test]
    fn residual_is_small_for_oscillating_law() {
        let law = OscillatingLaw::new(2.0, vec![2.0], 0.5, 6.0, AdmissibleRegion::bi(0.0, 1.0).unwrap())
            .unwrap();
        let r = helmholtz_pde_residual(&law, 5.0, &[2.0]).unwrap();
        assert!(r < 1e-8 * (1.0 + law.pressure(5.0, &[2.0])), "{r}");
    }
}
