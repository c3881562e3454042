use bifluid_lab::spectral::{
    dealias, div, grad, inv_div, lap_inv, laplacian, padded_product, project_modes, random_band_limited, read_field,
    riesz, spectral_l2, write_field, Field, ModeBasis, ModeKind, TorusGrid, VectorField,
};
use proptest::prelude::*;

fn close(a: &Field, b: &Field, tol: f64) -> bool {
    (a - b).sup() <= tol * (1.0 + b.sup())
}

fn vclose(a: &VectorField, b: &VectorField, tol: f64) -> bool {
    a.components().iter().zip(b.components()).all(|(x, y)| close(x, y, tol))
}

fn grids() -> Vec<TorusGrid> {
    vec![
        TorusGrid::new(1, 64).unwrap(),
        TorusGrid::new(2, 32).unwrap(),
        TorusGrid::new(3, 16).unwrap(),
    ]
}

#[test]
fn single_mode_identities() {
    for g in grids() {
        let d = g.dim();
        let cos1 = Field::from_fn(&g, "1", |x| x[0].cos());
        let sin1 = Field::from_fn(&g, "1", |x| x[0].sin());

        let v = inv_div(&cos1);
        let mut expect = vec![Field::zeros(&g); d];
        expect[0] = sin1.clone();
        assert!(vclose(&v, &VectorField::new(expect.clone()).unwrap(), 1e-12));

        assert!(close(&lap_inv(&cos1), &cos1.scale(-1.0), 1e-12));

        let mut gexp = vec![Field::zeros(&g); d];
        gexp[0] = cos1.clone();
        assert!(vclose(&grad(&sin1), &VectorField::new(gexp).unwrap(), 1e-12));

        assert!(inv_div(&Field::constant(&g, 3.0, "1")).sup() == 0.0);

        if d >= 2 {
            // φ = sin(x₁ + x₂): gradient fields are fixed by the projection
            let phi = Field::from_fn(&g, "1", |x| (x[0] + x[1]).sin());
            let gp = grad(&phi);
            assert!(vclose(&riesz(&gp), &gp, 1e-12));
            // (sin x₂, 0, …) is divergence free
            let mut comps = vec![Field::zeros(&g); d];
            comps[0] = Field::from_fn(&g, "1", |x| x[1].sin());
            let w = VectorField::new(comps).unwrap();
            assert!(riesz(&w).sup() <= 1e-12);
        }
    }
}

#[test]
fn operator_round_trips_on_band_limited_fields() {
    for (i, g) in grids().into_iter().enumerate() {
        let kmax = g.n() / 2 - 1;
        let f = random_band_limited(&g, kmax, 11 + i as u64);
        let mean_free = f.map(|v| v - f.mean());
        assert!(close(&div(&inv_div(&f)), &mean_free, 1e-12));
        assert!(close(&div(&grad(&f)), &laplacian(&f), 1e-12));
        assert!(close(&laplacian(&lap_inv(&f)), &mean_free, 1e-12));
        let v = VectorField::new((0..g.dim()).map(|a| random_band_limited(&g, kmax, 100 + a as u64)).collect()).unwrap();
        let p = riesz(&v);
        assert!(vclose(&riesz(&p), &p, 1e-12));
        for c in inv_div(&f).components() {
            assert!(c.mean().abs() <= 1e-13);
        }
    }
}

#[test]
fn parseval() {
    for (i, g) in grids().into_iter().enumerate() {
        let f = random_band_limited(&g, g.n() / 2 - 1, 7 + i as u64);
        let (a, b) = (f.l2(), spectral_l2(&f));
        assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
    }
}

#[test]
fn projection_properties() {
    let g = TorusGrid::new(2, 16).unwrap();
    let total = ModeBasis::total_modes(&g);
    assert_eq!(total, 15 * 15);
    let f = random_band_limited(&g, 7, 3);
    assert!(close(&project_modes(&f, total).unwrap(), &f, 1e-12));

    let high = Field::from_fn(&g, "1", |x| (6.0 * x[0]).cos() * (5.0 * x[1]).sin());
    assert!(project_modes(&high, 9).unwrap().sup() <= 1e-13);

    for n in [1, 5, 40, 200] {
        let p = project_modes(&f, n).unwrap();
        assert!(p.l2() <= f.l2() * (1.0 + 1e-14));
        assert!(close(&project_modes(&p, n).unwrap(), &p, 1e-12));
    }
    assert!(project_modes(&f, total + 1).is_err());
}

#[test]
fn mode_basis_is_orthonormal() {
    // Gram matrix by direct pointwise quadrature of the synthesized modes
    let g = TorusGrid::new(2, 8).unwrap();
    let basis = ModeBasis::new(&g, 20).unwrap();
    let fields: Vec<Field> = (0..basis.len())
        .map(|j| {
            let mut c = vec![0.0; basis.len()];
            c[j] = 1.0;
            basis.synthesize(&c, "1")
        })
        .collect();
    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate() {
            let ip = (a * b).integral();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-13, "<{i},{j}> = {ip}");
        }
    }
    let m = basis.modes();
    assert_eq!(m[0].kind, ModeKind::Constant);
    assert!(m.windows(2).all(|w| w[0].k_sq() <= w[1].k_sq()));
}

#[test]
fn padded_product_is_exact_for_resolved_products() {
    let g = TorusGrid::new(2, 32).unwrap();
    let a = random_band_limited(&g, 5, 1);
    let b = random_band_limited(&g, 5, 2);
    let c = random_band_limited(&g, 5, 3);
    // degree-15 product fits on the grid, so pointwise equals dealiased
    assert!(close(&padded_product(&[&a, &b, &c]), &(&(&a * &b) * &c), 1e-12));
    assert!(close(&dealias(&a), &a, 1e-12));
}

#[test]
fn field_files_round_trip() {
    let g = TorusGrid::new(3, 8).unwrap();
    let f = random_band_limited(&g, 3, 9).with_units("M/L^d");
    let dir = tempfile::tempdir().unwrap();
    let path = write_field(dir.path(), "rho_000000", &f, Some(0.5)).unwrap();
    let (header, back) = read_field(&path).unwrap();
    assert_eq!(back.data(), f.data());
    assert_eq!(header.units, "M/L^d");
    assert_eq!(header.time, Some(0.5));
    assert_eq!(header.points_per_axis, 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn operators_commute_with_translation(seed in 0u64..1000, s0 in 0usize..16, s1 in 0usize..16) {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = random_band_limited(&g, 7, seed);
        let sh = [s0, s1];
        prop_assert!(close(&lap_inv(&f.shift(&sh)), &lap_inv(&f).shift(&sh), 1e-12));
        prop_assert!(close(&laplacian(&f.shift(&sh)), &laplacian(&f).shift(&sh), 1e-12));
        prop_assert!(vclose(&grad(&f.shift(&sh)), &grad(&f).shift(&sh), 1e-12));
        prop_assert!(vclose(&inv_div(&f.shift(&sh)), &inv_div(&f).shift(&sh), 1e-12));
        let v = grad(&f);
        prop_assert!(close(&div(&v.shift(&sh)), &div(&v).shift(&sh), 1e-12));
        prop_assert!(vclose(&riesz(&v.shift(&sh)), &riesz(&v).shift(&sh), 1e-12));
    }

    #[test]
    fn bessel_inequality(seed in 0u64..1000, n in 1usize..225) {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = random_band_limited(&g, 7, seed);
        let p = project_modes(&f, n).unwrap();
        prop_assert!(p.l2() <= f.l2() * (1.0 + 1e-14));
    }
}
