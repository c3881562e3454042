mod common;

use bifluid_lab::cli::{PartialInit, Profile, RunConfig};
use bifluid_lab::solver::{check_min_principle, run, RunOptions, Solver};
use bifluid_lab::spectral::{random_band_limited, Field, GridSpec, VectorField};
use bifluid_lab::Error;
use common::{loglog_slope, small_problem};

fn homogeneous(n: usize) -> RunConfig {
    let mut c = small_problem(n, 30, 0.05);
    c.initial.rho = Profile::Constant { value: 1.0 };
    c.initial.z = vec![PartialInit::Fraction(Profile::Constant { value: 0.5 })];
    c.initial.u = vec![];
    c
}

#[test]
fn homogeneous_rest_state_is_a_fixed_point() {
    let c = homogeneous(16);
    let s = c.solver().unwrap();
    let init = c.initial_state(&s).unwrap();
    let out = run(&s, init.clone(), &RunOptions::default()).unwrap();
    assert_eq!(out.final_state.rho.data(), init.rho.data());
    assert_eq!(out.final_state.z[0].data(), init.z[0].data());
    assert!(out.final_state.u_coeffs.iter().all(|&c| c == 0.0));
    for row in &out.rows {
        assert!(row.ledger.residual.abs() <= 1e-12);
        assert_eq!(row.ledger.dissipation_cum, 0.0);
        assert_eq!(row.ledger.kinetic, 0.0);
    }
}

#[test]
fn prepare_initial_accepts_and_rejects() {
    let c = homogeneous(16);
    let s = c.solver().unwrap();
    let g = &s.config().grid;
    let rho = Field::constant(g, 1.0, "M/L^d");
    let z = Field::constant(g, 0.5, "M/L^d");
    let st = s.prepare_initial(&rho, &[z.clone()], &VectorField::zeros(g)).unwrap();
    assert_eq!(st.rho, rho);
    assert_eq!(st.z[0], z);

    // Z = 2ρ leaves the band [0, 1]
    let err = s
        .prepare_initial(&rho, &[rho.scale(2.0)], &VectorField::zeros(g))
        .unwrap_err();
    assert!(matches!(err, Error::Rejected(ref m) if m.contains("grid point")), "{err}");

    // smoothing band-limited data with many modes changes nothing
    let mut c2 = homogeneous(16);
    c2.initial_smoothing = Some(200);
    let s2 = c2.solver().unwrap();
    let bumpy = random_band_limited(g, 3, 5).map(|v| 1.0 + 0.2 * v / 3.0);
    let frac = random_band_limited(g, 3, 6).map(|v| 0.5 + 0.1 * v / 3.0);
    let zb = frac.zip_map(&bumpy, |s, r| s * r);
    let st = s2.prepare_initial(&bumpy, &[zb.clone()], &VectorField::zeros(g)).unwrap();
    assert!((&st.rho - &bumpy).sup() < 1e-13);
    assert!((&st.z[0] - &zb).sup() < 1e-13);
}

#[test]
fn proportional_partial_density_stays_proportional() {
    let mut c = small_problem(32, 120, 0.25);
    let frac = 0.3;
    c.initial.z = vec![PartialInit::Fraction(Profile::Constant { value: frac })];
    let s = c.solver().unwrap();
    let mut st = c.initial_state(&s).unwrap();
    for _ in 0..100 {
        st = s.step(&st).unwrap().0;
    }
    let defect = st.z[0].zip_map(&st.rho, |z, r| (z - frac * r).abs()).max();
    assert!(defect <= 1e-10, "sup |Z - c rho| = {defect:e}");
}

#[test]
fn masses_are_conserved_each_step() {
    let c = small_problem(32, 120, 0.25);
    let s = c.solver().unwrap();
    let out = run(&s, c.initial_state(&s).unwrap(), &RunOptions::default()).unwrap();
    assert!(out.max_mass_drift <= 1e-12, "{:e}", out.max_mass_drift);
    let (m0, m1) = (out.rows[0].mass_rho, out.rows.last().unwrap().mass_rho);
    assert!(((m1 - m0) / m0).abs() <= 1e-12);
}

#[test]
fn galerkin_residual_is_at_solver_tolerance() {
    let c = small_problem(16, 60, 0.05);
    let s = c.solver().unwrap();
    let mut st = c.initial_state(&s).unwrap();
    for _ in 0..10 {
        let (next, rep) = s.step(&st).unwrap();
        assert!(rep.galerkin_residual <= 1e-9, "{:e}", rep.galerkin_residual);
        st = next;
    }
}

#[test]
fn shear_mode_dissipation_increment() {
    let mut c = homogeneous(16);
    c.mu = 1.0;
    c.lambda = 0.0;
    c.dt = 1e-3;
    c.t_end = 1e-3;
    c.initial.u = vec![
        Profile::Modes {
            mean: 0.0,
            terms: vec![bifluid_lab::cli::ModeTerm {
                amplitude: 1.0,
                k: vec![0, 1],
                phase: -std::f64::consts::FRAC_PI_2,
            }],
        },
        Profile::Constant { value: 0.0 },
    ];
    let s = c.solver().unwrap();
    let out = run(&s, c.initial_state(&s).unwrap(), &RunOptions::default()).unwrap();
    let inc = out.rows[1].ledger.dissipation_cum;
    let expect = c.dt * (2.0 * std::f64::consts::PI).powi(2) / 2.0;
    assert!(((inc - expect) / expect).abs() < 2e-3, "{inc} vs {expect}");
}

#[test]
fn min_principle_monitor_on_hand_built_state() {
    let c = homogeneous(16);
    let s = c.solver().unwrap();
    let mut st = c.initial_state(&s).unwrap();
    let rec = check_min_principle(&st, s.region(), 1e-10);
    assert!(rec.pass && rec.band_defect_sup[0] == 0.0);
    // Z = 1.1·ā·ρ in one cell with ā = 1, ρ = 1
    st.z[0].data_mut()[37] = 1.1;
    let rec = check_min_principle(&st, s.region(), 1e-10);
    assert!(!rec.pass);
    assert!((rec.band_defect_sup[0] - 0.1).abs() < 1e-15);
    assert_eq!(rec.worst_cell, Some(37));
}

#[test]
fn epsilon_consistency() {
    // ‖ρ_ε − ρ_{ε/2}‖ = O(ε) at a fixed time
    let eps = [0.04, 0.02, 0.01];
    let finals: Vec<Field> = eps
        .iter()
        .chain(std::iter::once(&0.005))
        .map(|&e| {
            let mut c = small_problem(32, 120, 0.25);
            c.epsilon = e;
            let s = c.solver().unwrap();
            run(&s, c.initial_state(&s).unwrap(), &RunOptions::default()).unwrap().final_state.rho
        })
        .collect();
    let diffs: Vec<f64> = finals.windows(2).map(|w| (&w[0] - &w[1]).l2()).collect();
    let slope = loglog_slope(&eps, &diffs);
    assert!(slope >= 0.8, "slope {slope}, diffs {diffs:?}");
}

#[test]
fn blow_up_reports_time_and_keeps_partial_ledger() {
    let mut c = small_problem(16, 60, 20.0);
    c.dt = 0.5;
    c.mu = 0.01;
    c.epsilon = 1e-4;
    c.initial.u = vec![
        Profile::Modes {
            mean: 0.0,
            terms: vec![bifluid_lab::cli::ModeTerm {
                amplitude: 20.0,
                k: vec![1, 0],
                phase: 0.0,
            }],
        },
        Profile::Constant { value: 0.0 },
    ];
    let s: Solver = c.solver().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    let err = run(&s, c.initial_state(&s).unwrap(), &opts).unwrap_err();
    let Error::BlowUp { time, .. } = err else { panic!("expected blow-up, got {err}") };
    assert!(time > 0.0 && time < 20.0);
    let ledger = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert!(ledger.lines().count() >= 2);
}

#[test]
fn three_dimensional_run_conserves_mass() {
    let mut c = small_problem(8, 40, 0.05);
    c.grid = GridSpec {
        dimension: 3,
        points_per_axis: 8,
    };
    c.initial.rho = Profile::Random {
        mean: 1.0,
        amplitude: 0.2,
        kmax: 2,
    };
    c.initial.z = vec![PartialInit::Fraction(Profile::Random {
        mean: 0.5,
        amplitude: 0.2,
        kmax: 2,
    })];
    c.initial.u = (0..3)
        .map(|_| Profile::Random {
            mean: 0.0,
            amplitude: 0.3,
            kmax: 2,
        })
        .collect();
    let s = c.solver().unwrap();
    let out = run(&s, c.initial_state(&s).unwrap(), &RunOptions::default()).unwrap();
    assert!(out.max_mass_drift <= 1e-12);
    assert!(out.final_ledger().kinetic > 0.0);
}
