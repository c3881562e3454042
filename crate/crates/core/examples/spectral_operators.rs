//! Spectral calculus on the torus: derivatives, the Bogovskii-type inverse
//! divergence, Riesz transforms and the real Fourier mode basis.

use bifluid_lab::spectral::{
    div, grad, inv_div, lap_inv, laplacian, padded_product, project_modes, random_band_limited, riesz, Field,
    ModeBasis, TorusGrid,
};

fn main() -> bifluid_lab::Result<()> {
    let grid = TorusGrid::new(2, 32)?;
    let f = Field::from_fn(&grid, "1", |x| (2.0 * x[0]).sin() * x[1].cos());

    let lap = laplacian(&f);
    let err = (&lap + &f.scale(5.0)).sup();
    println!("laplacian of sin 2x cos y = -5 sin 2x cos y: max error {err:.1e}");

    let back = laplacian(&lap_inv(&f));
    println!("lap(lap_inv f) = f:        max error {:.1e}", (&back - &f).sup());

    // inv_div is a right inverse of div on mean-free data
    let v = inv_div(&f);
    println!("div(inv_div f) = f:        max error {:.1e}", (&div(&v) - &f).sup());

    // the Riesz projector fixes gradients
    let g = grad(&f);
    let r = riesz(&g);
    let err = r.zip_components(&g, |a, b| a - b).sup();
    println!("riesz(grad f) = grad f:    max error {err:.1e}");

    let basis = ModeBasis::new(&grid, 12)?;
    println!("\nfirst modes of the real basis:");
    for m in basis.modes().iter().take(6) {
        println!("  k = {:?} {:?}", &m.k[..2], m.kind);
    }
    let noisy = random_band_limited(&grid, 6, 7);
    let p = project_modes(&noisy, 12)?;
    let pp = project_modes(&p, 12)?;
    println!("projector idempotence: {:.1e}", (&pp - &p).sup());

    let prod = padded_product(&[&f, &f]);
    let direct = &f * &f;
    println!("dealiased product vs pointwise: {:.1e}", (&prod - &direct).sup());
    Ok(())
}
