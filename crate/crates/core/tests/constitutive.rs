mod common;

use std::sync::Arc;

use bifluid_lab::constitutive::{
    audit_hypotheses, decompose_pressure, eval_pressure, helmholtz, helmholtz_pde_residual, regularized_helmholtz,
    regularized_pressure, AdmissibleRegion, Exponents, HomogeneousLaw, PressureLaw, RegularizedPressureParams,
    SamplingSpec, Term, TruncationKit, Verdict,
};
use bifluid_lab::Error;
use common::helmholtz_oracle;
use proptest::prelude::*;

fn band() -> AdmissibleRegion {
    AdmissibleRegion::bi(0.0, 1.0).unwrap()
}

fn separable(terms: Vec<Term>) -> Arc<dyn PressureLaw> {
    Arc::new(HomogeneousLaw::separable(2.0, vec![2.0], terms, band()).unwrap())
}

fn cross_term() -> Vec<Term> {
    vec![Term::Monomial {
        coeff: 0.5,
        rho_exp: 1.0,
        z_exps: vec![0.5],
    }]
}

/// Identically zero pressure, for isolating the artificial part.
#[derive(Debug)]
struct Zero {
    region: AdmissibleRegion,
    exponents: Exponents,
}

impl PressureLaw for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn region(&self) -> &AdmissibleRegion {
        &self.region
    }
    fn exponents(&self) -> &Exponents {
        &self.exponents
    }
    fn pressure(&self, _rho: f64, _z: &[f64]) -> f64 {
        0.0
    }
}

/// `ρ² (1 + 0.9 sin(4 ln ρ)) + Z²`: dips at every scale, so no compactly
/// supported remainder can restore monotonicity.
#[derive(Debug)]
struct Dip {
    region: AdmissibleRegion,
    exponents: Exponents,
}

impl PressureLaw for Dip {
    fn name(&self) -> String {
        "dip".into()
    }
    fn region(&self) -> &AdmissibleRegion {
        &self.region
    }
    fn exponents(&self) -> &Exponents {
        &self.exponents
    }
    fn pressure(&self, rho: f64, z: &[f64]) -> f64 {
        if rho == 0.0 {
            return z[0] * z[0];
        }
        rho * rho * (1.0 + 0.9 * (4.0 * rho.ln()).sin()) + z[0] * z[0]
    }
}

fn exps(gamma: f64) -> Exponents {
    Exponents {
        gamma,
        beta: vec![gamma],
        alpha: gamma,
        lipschitz: gamma,
    }
}

#[test]
fn pressure_examples() {
    let e1 = separable(vec![]);
    assert_eq!(eval_pressure(e1.as_ref(), 0.0, &[0.0]).unwrap(), 0.0);
    assert_eq!(eval_pressure(e1.as_ref(), 1.0, &[1.0]).unwrap(), 2.0);
    let e2 = HomogeneousLaw::total_density(2.0, vec![], band()).unwrap();
    assert_eq!(eval_pressure(&e2, 1.0, &[2.0]).unwrap(), 9.0);
    assert!(matches!(eval_pressure(&e2, -1.0, &[0.0]), Err(Error::Domain(_))));
}

#[test]
fn helmholtz_examples_match_oracle() {
    let pure = HomogeneousLaw::power(2.0, band()).unwrap();
    let h = helmholtz(&pure, 2.0, &[0.0]).unwrap();
    assert!((h - 2.0).abs() < 1e-13);
    assert!((helmholtz_oracle(&|r, z| pure.pressure(r, z), 2.0, &[0.0]) - 2.0).abs() < 1e-12);

    let e1 = separable(vec![]);
    assert!((helmholtz(e1.as_ref(), 2.0, &[2.0]).unwrap() - 4.0).abs() < 1e-13);
    assert_eq!(helmholtz(e1.as_ref(), 1.0, &[1.0]).unwrap(), 0.0);

    let law = separable(cross_term());
    for (rho, z) in [(0.3, 0.1), (2.0, 1.5), (40.0, 3.0)] {
        let h = helmholtz(law.as_ref(), rho, &[z]).unwrap();
        let o = helmholtz_oracle(&|r, zz| law.pressure(r, zz), rho, &[z]);
        assert!((h - o).abs() <= 1e-11 * (1.0 + o.abs()), "({rho}, {z}): {h} vs {o}");
    }
}

#[test]
fn regularized_pressure_examples() {
    let e1 = separable(vec![]);
    let p = RegularizedPressureParams::new(1.0, 10.0).unwrap();
    let v = regularized_pressure(&p, e1.clone(), 2.0, &[2.0]).unwrap();
    let oracle = 8.0 + 1024.0 + 1024.0 + 0.5 * 4.0 * 256.0 + 0.5 * 4.0 * 256.0;
    assert_eq!(oracle, 3080.0);
    assert!((v - oracle).abs() < 1e-10);
    assert_eq!(regularized_pressure(&p, e1.clone(), 0.0, &[0.0]).unwrap(), 0.0);

    // inside the inner disc only the artificial part survives
    let p = RegularizedPressureParams::new(0.5, 6.0).unwrap();
    let (rho, z) = (0.1f64, 0.2f64);
    let pure_penalty = 0.5 * (rho.powi(6) + z.powi(6) + 0.5 * rho * rho * z.powi(4) + 0.5 * z * z * rho.powi(4));
    let v = regularized_pressure(&p, e1, rho, &[z]).unwrap();
    assert!((v - pure_penalty).abs() <= 1e-15 * pure_penalty, "{v} vs {pure_penalty}");
}

#[test]
fn regularized_helmholtz_examples() {
    let zero: Arc<dyn PressureLaw> = Arc::new(Zero {
        region: band(),
        exponents: exps(2.0),
    });
    let p = RegularizedPressureParams::new(1.0, 3.0).unwrap();
    let v = regularized_helmholtz(&p, zero, 2.0, &[2.0]).unwrap();
    assert!((v - 12.0).abs() < 1e-12);

    // far from vacuum: H of the law plus h_δ, up to the cut-off annulus, whose
    // contribution the oracle integrates directly
    let law = separable(cross_term());
    let delta = 0.1;
    let p = RegularizedPressureParams::new(delta, 6.0).unwrap();
    let (rho, z) = (2.0f64, 1.0f64);
    let reg = regularized_helmholtz(&p, law.clone(), rho, &[z]).unwrap();
    let cut = |r: f64, zz: &[f64]| {
        let n = (r * r + zz[0] * zz[0]).sqrt() / delta;
        let eta = if n <= 0.5 {
            1.0
        } else if n >= 1.0 {
            0.0
        } else {
            let x = (1.0 - n) / 0.5;
            x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
        };
        (1.0 - eta) * law.pressure(r, zz)
    };
    let h_cut = helmholtz_oracle(&cut, rho, &[z]);
    let h_delta = delta / 5.0 * (rho.powi(6) + z.powi(6) + 0.5 * rho * rho * z.powi(4) + 0.5 * z * z * rho.powi(4));
    assert!((reg - (h_cut + h_delta)).abs() < 1e-10, "{reg} vs {}", h_cut + h_delta);
}

#[test]
fn truncation_examples() {
    let t = TruncationKit::new(2.0).unwrap();
    assert_eq!(t.t(1.0), 1.0);
    assert_eq!(t.t(10.0), 4.0);
    assert_eq!(t.l(1.0).unwrap(), 0.0);
    assert!(TruncationKit::new(1.0).is_err());
}

#[test]
fn decomposition_examples() {
    let e1 = separable(vec![]);
    let d = decompose_pressure(e1.as_ref(), 1.5, &[0.4]).unwrap();
    assert_eq!(d.remainder, 0.0);
    assert!((d.monotone - e1.pressure(1.5, &[0.6])).abs() < 1e-14);
    let d0 = decompose_pressure(e1.as_ref(), 0.0, &[0.4]).unwrap();
    assert_eq!(d0.monotone - d0.remainder, 0.0);

    let dip = Dip {
        region: band(),
        exponents: exps(2.0),
    };
    assert!(matches!(decompose_pressure(&dip, 1.0, &[0.5]), Err(Error::Capability { .. })));
}

#[test]
fn audits_of_example_laws() {
    let spec = SamplingSpec::default();
    let e1 = separable(cross_term());
    let r = audit_hypotheses(e1.as_ref(), &spec);
    assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_json());
    let e2 = HomogeneousLaw::total_density(2.0, vec![], band()).unwrap();
    assert_eq!(audit_hypotheses(&e2, &spec).verdict, Verdict::Pass);
}

#[test]
fn non_monotone_law_fails_with_witness() {
    let dip = Dip {
        region: band(),
        exponents: exps(2.0),
    };
    // dense 1-D scan: decreasing stretches persist in every decade
    let p = |r: f64| dip.pressure(r, &[0.5 * r]);
    for decade in 0..4 {
        let lo = 10f64.powi(decade);
        let drops = (0..10_000).any(|j| {
            let r = lo * (1.0 + 9.0 * j as f64 / 10_000.0);
            p(r * 1.0001) < p(r)
        });
        assert!(drops, "no dip in decade {lo}");
    }

    let r = audit_hypotheses(&dip, &SamplingSpec::default());
    assert_eq!(r.verdict, Verdict::Fail);
    let fail = r.failures().find(|c| c.id.starts_with("decomposition.")).expect("monotonicity failure");
    let w = &fail.witness;
    assert_eq!(w.coordinates[0], "rho");
    // the witness sits on a decreasing stretch
    let (r, sfrac) = (w.point[0], w.point[1]);
    let q = |x: f64| dip.pressure(x, &[x * sfrac]);
    let h = 1e-3 * r;
    assert!(q(r + h) < q(r) || q(r) < q(r - h), "witness {:?} is not on a dip", w.point);
}

#[test]
fn helmholtz_pde_residual_on_interior_points() {
    let law = separable(cross_term());
    for &rho in &[0.05, 0.7, 3.0, 20.0] {
        for &s in &[0.1, 0.5, 0.9] {
            let z = [s * rho];
            let res = helmholtz_pde_residual(law.as_ref(), rho, &z).unwrap();
            assert!(res <= 1e-8 * (1.0 + law.pressure(rho, &z)), "rho {rho}, s {s}: {res:e}");
        }
    }
}

#[test]
fn regularization_converges_as_delta_shrinks() {
    let law = separable(cross_term());
    let (rho, z) = (1.3f64, 0.4f64);
    let exact = law.pressure(rho, &[z]);
    let errs: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&d| {
            let p = RegularizedPressureParams::new(d, 6.0).unwrap();
            (regularized_pressure(&p, law.clone(), rho, &[z]).unwrap() - exact).abs()
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn artificial_part_is_midpoint_convex(
        r1 in 0.0f64..5.0, z1 in 0.0f64..5.0, r2 in 0.0f64..5.0, z2 in 0.0f64..5.0, b in 3.0f64..12.0,
    ) {
        let p = RegularizedPressureParams::new(0.3, b).unwrap();
        let (rm, zm) = (0.5 * (r1 + r2), 0.5 * (z1 + z2));
        for f in [
            |p: &RegularizedPressureParams, r: f64, z: f64| p.artificial_energy(r, &[z]),
            |p: &RegularizedPressureParams, r: f64, z: f64| p.artificial_pressure(r, &[z]),
        ] {
            let mid = f(&p, rm, zm);
            let avg = 0.5 * (f(&p, r1, z1) + f(&p, r2, z2));
            prop_assert!(mid <= avg * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn truncation_sandwich(k in 1.01f64..50.0, z in 0.0f64..1e3) {
        let t = TruncationKit::new(k).unwrap();
        let v = t.t(z);
        prop_assert!(v >= 0.0 && v <= z.min(2.0 * k) + 1e-12 * z);
        if z <= k {
            prop_assert_eq!(v, z);
        }
        // nondecreasing and concave along a short chord
        let h = 1e-3 * (1.0 + z);
        prop_assert!(t.t(z + h) >= v);
        prop_assert!(t.t(z + h) + t.t((z - h).max(0.0)) <= 2.0 * v + 1e-9 * (1.0 + z) || z < h);
    }

    #[test]
    fn decomposition_is_exact(rho in 0.0f64..1e3, s in 0.0f64..1.0) {
        let law = separable(cross_term());
        let d = decompose_pressure(law.as_ref(), rho, &[s]).unwrap();
        let p = law.pressure(rho, &[rho * s]);
        prop_assert!((d.monotone - d.remainder - p).abs() <= 1e-12 * p.abs().max(1e-300));
    }

    #[test]
    fn power_law_helmholtz_matches_closed_form(gamma in 1.2f64..4.0, lr in -3.0f64..3.0) {
        let rho = 10f64.powf(lr);
        let law = HomogeneousLaw::power(gamma, band()).unwrap();
        let h = helmholtz(&law, rho, &[0.3 * rho]).unwrap();
        let exact = (rho.powf(gamma) - rho) / (gamma - 1.0);
        prop_assert!((h - exact).abs() <= 1e-10 * exact.abs().max(1e-300) || (h - exact).abs() < 1e-300);
    }
}
