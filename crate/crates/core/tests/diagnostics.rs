mod common;

use std::f64::consts::PI;

use bifluid_lab::cli::{PartialInit, Profile, RunConfig};
use bifluid_lab::diagnostics::{
    covariance, flux_correlation_series, oscillation_defect, oscillation_k_grid, pressure_integrability,
    renorm_residual, renorm_residual_pair, s_transport_defect, LadderAxis, LadderRun, RefinementStudy,
    Renormalization,
};
use bifluid_lab::solver::{max_mass_drift, run, RunOptions, RunOutput, Snapshot, Trajectory, TrajectoryMeta};
use bifluid_lab::spectral::{Field, TorusGrid, VectorField};
use bifluid_lab::Error;
use common::{loglog_slope, small_problem};

fn run_every_step(c: &RunConfig) -> RunOutput {
    let s = c.solver().unwrap();
    let opts = RunOptions {
        checkpoint_every: 1,
        ..Default::default()
    };
    run(&s, c.initial_state(&s).unwrap(), &opts).unwrap()
}

fn homogeneous(rho: f64, frac: f64) -> RunConfig {
    let mut c = small_problem(16, 30, 0.05);
    c.initial.rho = Profile::Constant { value: rho };
    c.initial.z = vec![PartialInit::Fraction(Profile::Constant { value: frac })];
    c.initial.u = vec![];
    c
}

/// A trajectory of constant-in-time fields at the given times.
fn frozen(grid: &TorusGrid, rho: &Field, z: &Field, times: &[f64]) -> Trajectory {
    Trajectory {
        meta: TrajectoryMeta {
            grid: grid.spec(),
            dt: times[1] - times[0],
            cadence: 1,
            epsilon: 0.01,
            mu: 0.1,
            lambda: 0.0,
            delta: 1e-3,
            b_exponent: 6.0,
            n_modes: 10,
            species: 1,
        },
        snapshots: times
            .iter()
            .enumerate()
            .map(|(step, &time)| Snapshot {
                step,
                time,
                rho: rho.clone(),
                z: vec![z.clone()],
                u: VectorField::zeros(grid),
            })
            .collect(),
    }
}

#[test]
fn constant_renormalization_has_no_residual() {
    let out = run_every_step(&small_problem(16, 60, 0.05));
    for r in renorm_residual(&out.trajectory, Renormalization::Constant { value: 2.0 }, true).unwrap() {
        assert!(r.l1 <= 1e-10, "t = {}: {:e}", r.time, r.l1);
    }
}

#[test]
fn truncation_above_the_range_matches_the_identity() {
    let out = run_every_step(&small_problem(16, 60, 0.05));
    let top = out
        .trajectory
        .snapshots
        .iter()
        .map(|s| s.rho.max())
        .fold(0.0, f64::max);
    let id = renorm_residual(&out.trajectory, Renormalization::Identity, true).unwrap();
    let tk = renorm_residual(&out.trajectory, Renormalization::Truncation { k: 2.0 * top }, true).unwrap();
    for (a, b) in id.iter().zip(&tk) {
        assert_eq!(a.l1, b.l1);
    }
}

#[test]
fn continuity_residual_is_first_order_in_dt() {
    let h = 1e-3;
    let dts = [4.0 * h, 2.0 * h, h];
    let res: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let mut c = small_problem(32, 120, 0.1);
            c.dt = dt;
            let out = run_every_step(&c);
            renorm_residual(&out.trajectory, Renormalization::Identity, true)
                .unwrap()
                .iter()
                .map(|r| r.l1)
                .fold(0.0, f64::max)
        })
        .collect();
    let slope = loglog_slope(&dts, &res);
    assert!(slope >= 1.0 - 0.05, "slope {slope} from {res:?}");
}

#[test]
fn pair_renormalization_of_z_alone_matches_the_scalar_form_for_twins() {
    // with Z = cρ, b(ρ, Z) = Z² is c² ρ², so both residuals scale alike
    let c = 0.3;
    let mut cfg = small_problem(16, 60, 0.05);
    cfg.initial.z = vec![PartialInit::Fraction(Profile::Constant { value: c })];
    let out = run_every_step(&cfg);
    let pair = renorm_residual_pair(&out.trajectory, 0, |_, z| Ok((z * z, 0.0, 2.0 * z)), true).unwrap();
    let single = renorm_residual(&out.trajectory, Renormalization::Power { theta: 2.0 }, true).unwrap();
    for (p, s) in pair.iter().zip(&single) {
        assert!((p.l1 - c * c * s.l1).abs() <= 1e-9 * s.l1.max(1e-12), "{} vs {}", p.l1, c * c * s.l1);
    }
}

#[test]
fn fraction_transport_defects() {
    let out = run_every_step(&small_problem(16, 60, 0.05));
    for p in [1, 2] {
        for d in s_transport_defect(&out.trajectory, &out.trajectory, 0, p).unwrap() {
            assert_eq!(d.value, 0.0);
        }
    }
    assert!(matches!(
        s_transport_defect(&out.trajectory, &out.trajectory, 0, 3),
        Err(Error::Domain(_))
    ));

    // twins: both runs keep Z = cρ, so the fractions agree
    let mut a = small_problem(16, 60, 0.05);
    a.initial.z = vec![PartialInit::Fraction(Profile::Constant { value: 0.3 })];
    let ta = run_every_step(&a).trajectory;
    let mut b = a.clone();
    b.initial.rho = Profile::Constant { value: 1.0 };
    let tb = run_every_step(&b).trajectory;
    for d in s_transport_defect(&ta, &tb, 0, 2).unwrap() {
        assert!(d.value <= 1e-10, "t = {}: {:e}", d.time, d.value);
    }
}

#[test]
fn homogeneous_pressure_integrals_are_exact() {
    let (rho0, frac) = (1.3, 0.5);
    let c = homogeneous(rho0, frac);
    let s = c.solver().unwrap();
    let out = run_every_step(&c);
    let exps = s.config().law.exponents().clone();
    let theta = 0.25;
    let res = pressure_integrability(&out.trajectory, &exps, theta).unwrap();
    let t_end = out.trajectory.snapshots.last().unwrap().time;
    let vol = (2.0 * PI).powi(2);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    assert!(rel(res.rho, t_end * vol * rho0.powf(exps.gamma + theta)) <= 1e-12);
    assert!(rel(res.z[0], t_end * vol * (frac * rho0).powf(exps.beta[0] + theta)) <= 1e-12);
    assert!(rel(res.penalty, c.delta * t_end * vol * rho0.powf(c.b_exponent + theta)) <= 1e-12);

    // Θ beyond the Bogovskii gain is refused
    let err = pressure_integrability(&out.trajectory, &exps, exps.gamma).unwrap_err();
    assert!(err.to_string().contains("gamma_BOG"), "{err}");
    assert!(pressure_integrability(&out.trajectory, &exps, 0.0).is_err());
}

#[test]
fn flux_covariance_identities() {
    let c = homogeneous(1.2, 0.4);
    let s = c.solver().unwrap();
    let out = run_every_step(&c);
    for f in flux_correlation_series(&out.trajectory, s.law(), 2.0).unwrap() {
        assert!(f.correlation.abs() <= 1e-14);
    }

    let g = TorusGrid::new(2, 16).unwrap();
    let a = Field::from_fn(&g, "1", |x| x[0].cos());
    let b = Field::from_fn(&g, "1", |x| (2.0 * x[0]).cos() + x[1].sin());
    assert!(covariance(&a, &b).abs() <= 1e-14);
    assert!((covariance(&a, &a) - 0.5).abs() <= 1e-14);

    let h = Field::from_fn(&g, "1", |x| (x[0] + x[1]).sin() + 0.3 * x[0].cos());
    let base = covariance(&h, &a);
    let shifted = covariance(&h.map(|v| v + 7.0), &a.map(|v| v - 3.0));
    assert!((base - shifted).abs() <= 1e-13, "{base} vs {shifted}");
}

#[test]
fn oscillation_defect_of_a_constant_shift() {
    let g = TorusGrid::new(2, 8).unwrap();
    let times = [0.0, 0.1, 0.2, 0.3];
    let z = Field::constant(&g, 0.2, "M/L^d");
    let fine = frozen(&g, &Field::constant(&g, 1.5, "M/L^d"), &z, &times);
    assert_eq!(oscillation_defect(&fine, &fine, 4.0, 2.0).unwrap(), 0.0);

    let shift = 0.25;
    let coarse = frozen(&g, &Field::constant(&g, 1.5 + shift, "M/L^d"), &z, &times);
    let got = oscillation_defect(&fine, &coarse, 4.0, 2.0).unwrap();
    let want = shift.powf(3.0) * 0.3 * (2.0 * PI).powi(2);
    assert!((got - want).abs() <= 1e-13 * want, "{got} vs {want}");

    // above the level both sides truncate to the same plateau
    let high = frozen(&g, &Field::constant(&g, 13.0, "M/L^d"), &z, &times);
    let higher = frozen(&g, &Field::constant(&g, 15.0, "M/L^d"), &z, &times);
    assert_eq!(oscillation_defect(&high, &higher, 4.0, 2.0).unwrap(), 0.0);

    // median 1.5: levels 3, 6, 12, 24 (1.5 itself survives as > 1)
    assert_eq!(oscillation_k_grid(&fine), vec![1.5, 3.0, 6.0, 12.0, 24.0]);
    let light = frozen(&g, &Field::constant(&g, 0.2, "M/L^d"), &z, &times);
    assert_eq!(oscillation_k_grid(&light), vec![1.6, 3.2]);

    let short = frozen(&g, &Field::constant(&g, 1.5, "M/L^d"), &z, &times[..3]);
    assert!(matches!(oscillation_defect(&fine, &short, 4.0, 2.0), Err(Error::Mismatch(_))));
}

#[test]
fn single_value_study_has_no_slopes() {
    let c = small_problem(16, 30, 0.05);
    let s = c.solver().unwrap();
    let opts = RunOptions {
        checkpoint_every: 5,
        ..Default::default()
    };
    let out = run(&s, c.initial_state(&s).unwrap(), &opts).unwrap();
    let runs = vec![LadderRun {
        value: c.delta,
        max_mass_drift: max_mass_drift(&out.rows),
        trajectory: out.trajectory,
        rows: out.rows,
        law: s.law().clone(),
        exponents: s.config().law.exponents().clone(),
    }];
    let study = RefinementStudy::from_runs(LadderAxis::Delta, 0.25, 2.0, &runs).unwrap();
    assert!(study.residual_slope.is_none() && study.penalty_slope.is_none());
    assert_eq!(study.rows[0].osc_defect, Some(0.0));
    let mut buf = Vec::new();
    study.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let line = text.lines().nth(1).unwrap();
    assert!(line.ends_with(",,"), "{line}");
}
