//! Audit of the bi-fluid hypotheses: exponent arithmetic in exact
//! rationals, sampled conditions on `q` near zero and uniformly, and the
//! properties of `ρ₊` the change of variables relies on.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::effective::uniform_fraction_bound;
use super::system::BiFluidSystem;
use crate::constitutive::report::{
    log_grid, lower_verdict, slope_upper_verdict, strict_upper_verdict, upper_verdict, Check, HypothesisReport,
    SamplingSpec, Verdict, Witness,
};
use crate::numerics::{
    bogovskii_gain_exact, central_derivative, decimal_rational, fd_step, log_log_slope, show,
};

pub fn audit_bifluid(sys: &BiFluidSystem, spec: &SamplingSpec) -> HypothesisReport {
    let subject = format!(
        "bifluid(plus = {}, minus = {})",
        sys.plus().name(),
        sys.minus().name()
    );
    let mut report = HypothesisReport::new(subject, spec.clone());
    exponent_arithmetic(sys, &mut report);
    isentropic(sys, &mut report);
    phase_shape(sys, spec, &mut report);
    near_zero_condition(sys, spec, &mut report);
    uniform_fraction(sys, &mut report);
    rho_plus_properties(sys, spec, &mut report);
    report
}

fn rational(x: f64) -> BigRational {
    decimal_rational(x).unwrap_or_else(BigRational::zero)
}

fn max_r(a: BigRational, b: BigRational) -> BigRational {
    if a > b {
        a
    } else {
        b
    }
}

fn to_f64(r: &BigRational) -> f64 {
    show(r)
        .split_once('/')
        .map(|(n, d)| n.parse::<f64>().unwrap_or(f64::NAN) / d.parse::<f64>().unwrap_or(f64::NAN))
        .unwrap_or_else(|| show(r).parse().unwrap_or(f64::NAN))
}

/// `γ⁺ ≥ 9/5`, `γ⁻ > 0` and `Γ̄ < G`, decided exactly.
fn exponent_arithmetic(sys: &BiFluidSystem, report: &mut HypothesisReport) {
    let (gp_f, gm_f) = (sys.plus().gamma(), sys.minus().gamma());
    let a_lower = sys.region().a_lower()[0];
    let (gp, gm) = (rational(gp_f), rational(gm_f));
    let one = BigRational::from_integer(1.into());
    let nine_fifths = BigRational::new(9.into(), 5.into());
    let w = Witness::exponents(&["gamma_plus", "gamma_minus", "a_lower"], &[gp_f, gm_f, a_lower], gp_f);

    let ok = gp >= nine_fifths && gm > BigRational::zero();
    report.push(Check::new(
        "bifluid.exponents",
        format!(
            "gamma_plus = {} >= 9/5 and gamma_minus = {} > 0",
            show(&gp),
            show(&gm)
        ),
        if ok { Verdict::Pass } else { Verdict::Fail },
        gp_f,
        1.8,
        w.clone(),
    ));
    if gm <= BigRational::zero() {
        return;
    }

    let first = &gp - &gp / &gm + &one;
    let (gamma_bar, g) = if a_lower == 0.0 {
        (
            max_r(first, &gm + &gm / &gp - &gp / &gm),
            &gp + bogovskii_gain_exact(&gp),
        )
    } else {
        (
            max_r(first, &gm + &gm / &gp - &one),
            max_r(
                &gp + bogovskii_gain_exact(&gp),
                &gm + bogovskii_gain_exact(&gm),
            ),
        )
    };
    let holds = gamma_bar < g;
    let relation = if holds { "<" } else { ">= (violated)" };
    report.constant("Gamma_bar", to_f64(&gamma_bar));
    report.constant("G", to_f64(&g));
    report.push(Check::new(
        "bifluid.gamma_bar",
        format!(
            "Gamma_bar = {} {relation} G = {} (a_lower {})",
            show(&gamma_bar),
            show(&g),
            if a_lower == 0.0 { "= 0" } else { "> 0" }
        ),
        if holds { Verdict::Pass } else { Verdict::Fail },
        to_f64(&gamma_bar),
        to_f64(&g),
        w,
    ));
}

/// Sufficient conditions for power-like phases; a miss is indeterminate
/// rather than a failure since the hypotheses themselves may still hold.
fn isentropic(sys: &BiFluidSystem, report: &mut HypothesisReport) {
    let (ap_f, am_f) = (sys.plus().alpha(), sys.minus().alpha());
    let (ap, am) = (rational(ap_f), rational(am_f));
    let one = BigRational::from_integer(1.into());
    // α⁻ > α⁺/√(α⁺ + 1), squared
    let holds = am > BigRational::zero() && &am * &am * (&ap + &one) > &ap * &ap;
    let threshold = ap_f / (ap_f + 1.0).sqrt();
    report.push(Check::new(
        "isentropic.alpha",
        format!("alpha_minus = {} > alpha_plus / sqrt(alpha_plus + 1) ~ {threshold:.6}", show(&am)),
        if holds { Verdict::Pass } else { Verdict::Indeterminate },
        am_f,
        threshold,
        Witness::exponents(&["alpha_plus", "alpha_minus"], &[ap_f, am_f], am_f),
    ));

    if sys.region().a_lower()[0] != 0.0 {
        return;
    }
    let (gp_f, gm_f) = (sys.plus().gamma(), sys.minus().gamma());
    let (gp, gm) = (rational(gp_f), rational(gm_f));
    if gm <= BigRational::zero() || gp <= BigRational::zero() {
        return;
    }
    let three = BigRational::from_integer(3.into());
    let six = BigRational::from_integer(6.into());
    let two = BigRational::from_integer(2.into());
    let cap_ok = gp >= three || gm < &three * &gp / (&six - &two * &gp);
    let g = &gp + bogovskii_gain_exact(&gp);
    let lhs = &gm + (&gm * &gm - &gp * &gp) / (&gm * &gp);
    let holds = cap_ok && lhs < g;
    report.push(Check::new(
        "isentropic.upper",
        format!(
            "gamma_minus < 3 gamma_plus/(6 - 2 gamma_plus) when gamma_plus < 3, and \
             gamma_minus + (gamma_minus^2 - gamma_plus^2)/(gamma_minus gamma_plus) = {} < G = {}",
            show(&lhs),
            show(&g)
        ),
        if holds { Verdict::Pass } else { Verdict::Indeterminate },
        to_f64(&lhs),
        to_f64(&g),
        Witness::exponents(&["gamma_plus", "gamma_minus"], &[gp_f, gm_f], to_f64(&lhs)),
    ));
}

/// Strict monotonicity, convexity of `𝔓₊` and the growth exponents of
/// both derivatives.
fn phase_shape(sys: &BiFluidSystem, spec: &SamplingSpec, report: &mut HypothesisReport) {
    let grid = spec.rho_grid();
    let (plus, minus) = (sys.plus(), sys.minus());
    let (mut min_d, mut at_d) = (f64::INFINITY, grid[0]);
    let (mut min_dd, mut at_dd) = (f64::INFINITY, grid[0]);
    for &s in &grid {
        let d = plus.derivative(s).min(minus.derivative(s));
        if !(d >= min_d) {
            (min_d, at_d) = (d, s);
        }
        // relative curvature so the verdict does not depend on scale
        let dd = plus.second_derivative(s) * s / plus.derivative(s);
        if !(dd >= min_dd) {
            (min_dd, at_dd) = (dd, s);
        }
    }
    report.push(Check::new(
        "phases.increasing",
        "both phase pressures have positive derivative",
        if min_d > 0.0 { Verdict::Pass } else { Verdict::Fail },
        min_d,
        0.0,
        Witness::scalar("s", at_d, min_d),
    ));
    report.push(Check::new(
        "phases.convex_plus",
        "the + phase pressure is convex (s P'' / P' >= 0)",
        lower_verdict(min_dd, 0.0, Some(0.0)),
        min_dd,
        0.0,
        Witness::scalar("s", at_dd, min_dd),
    ));
    let tail: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&s| s >= spec.rho_max / 10.0)
        .collect();
    for (id, law, what) in [("phases.growth_plus", plus, "+"), ("phases.growth_minus", minus, "-")] {
        let ys: Vec<f64> = tail.iter().map(|&s| law.derivative(s)).collect();
        let slope = log_log_slope(&tail, &ys).unwrap_or(f64::NAN);
        let target = law.gamma() - 1.0;
        let dev = (slope - target).abs();
        report.push(Check::new(
            id,
            format!("derivative of the {what} phase grows like s^(gamma - 1)"),
            slope_upper_verdict(dev, 0.0),
            slope,
            target,
            Witness::scalar("s", spec.rho_max, *ys.last().unwrap_or(&f64::NAN)),
        ));
    }
}

/// `sup_{s∈(0,1)} s^Γ̲ 𝔓₊'(x) x²/(s q(s)) < ∞`, `x = s + q⁻¹(ā s)`, for
/// some `Γ̲ < 1`; the smallest admissible `Γ̲` is read off the slope of
/// the expression near zero.
fn near_zero_condition(sys: &BiFluidSystem, spec: &SamplingSpec, report: &mut HypothesisReport) {
    let a_upper = sys.region().a_upper()[0];
    let grid: Vec<f64> = log_grid(spec.rho_min, 1.0, spec.points_per_decade)
        .into_iter()
        .filter(|&s| s < 1.0)
        .collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&s| {
            let q = sys.q(s).ok()?;
            let x = s + sys.q_inv(a_upper * s).ok()?;
            Some(sys.plus().derivative(x) * x * x / (s * q))
        })
        .map(|v| v.unwrap_or(f64::NAN))
        .collect();
    let near_hi = spec.rho_min * 10.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .zip(&values)
        .filter(|(s, _)| **s <= near_hi * (1.0 + 1e-12))
        .map(|(s, v)| (*s, *v))
        .unzip();
    let slope = if ys.iter().all(|v| v.is_finite()) {
        log_log_slope(&xs, &ys).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let gamma_lower = (-slope).max(0.0);
    let c_bar = grid
        .iter()
        .zip(&values)
        .map(|(s, v)| s.powf(gamma_lower) * v)
        .fold(0.0, f64::max);
    report.constant("phases.near_zero.Gamma_lower", gamma_lower);
    report.constant("phases.near_zero.c_bar", c_bar);
    let main = strict_upper_verdict(gamma_lower, 1.0, None);
    report.push(Check::new(
        "phases.near_zero",
        "near-zero blow-up exponent Gamma_lower of P+'(x) x^2 / (s q(s)) stays below 1",
        main,
        gamma_lower,
        1.0,
        Witness::scalar("s", xs[0], ys[0]),
    ));

    if sys.plus().derivative(0.0) > 0.0 {
        let qs: Vec<f64> = xs.iter().map(|&s| sys.q(s).unwrap_or(f64::NAN)).collect();
        let a = log_log_slope(&xs, &qs).unwrap_or(f64::NAN);
        let alt = strict_upper_verdict(a, 2.0, None);
        report.constant("phases.near_zero_alt.A", a);
        report.push(Check::new(
            "phases.near_zero_alt",
            "alternate form for P+'(0) > 0: q(s) >= C s^A near zero with A < 2",
            alt,
            a,
            2.0,
            Witness::scalar("s", xs[0], qs[0]),
        ));
        if alt != main {
            report.notes.push(format!(
                "the two forms of the near-zero condition disagree: direct {main:?}, alternate {alt:?}"
            ));
        }
    }
}

fn uniform_fraction(sys: &BiFluidSystem, report: &mut HypothesisReport) {
    match uniform_fraction_bound(sys) {
        Ok((q_lower, at)) => {
            report.constant("q_lower", q_lower);
            report.push(Check::new(
                "phases.derivative_floor",
                "q_lower = inf q(s) / (s q'(s) + q(s)) > 0 on s in [1e-8, 1e8]",
                if q_lower > 1e-6 {
                    Verdict::Pass
                } else if q_lower > 0.0 {
                    Verdict::Indeterminate
                } else {
                    Verdict::Fail
                },
                q_lower,
                0.0,
                Witness::scalar("s", at, q_lower),
            ));
        }
        Err(e) => {
            report.notes.push(format!("q could not be evaluated: {e}"));
            report.push(Check::new(
                "phases.derivative_floor",
                "q_lower = inf q(s) / (s q'(s) + q(s)) > 0",
                Verdict::Fail,
                f64::NAN,
                0.0,
                Witness::scalar("s", f64::NAN, f64::NAN),
            ));
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    rho: f64,
    z: f64,
    rho_plus: f64,
    residual: f64,
    ratio: f64,
    it3: f64,
    d_rho: f64,
    round_trip: f64,
}

fn sample(sys: &BiFluidSystem, rho: f64, z: f64) -> Sample {
    let nan = Sample {
        rho,
        z,
        rho_plus: f64::NAN,
        residual: f64::NAN,
        ratio: f64::NAN,
        it3: f64::NAN,
        d_rho: f64::NAN,
        round_trip: f64::NAN,
    };
    let Ok(rp) = sys.solve_rho_plus(rho, z) else {
        return nan;
    };
    let (Ok(q), Ok(qi)) = (sys.q(rp), sys.q_inv(z)) else {
        return nan;
    };
    let residual = (rp * q - q * rho - z * rp).abs() / (rp * q + 1.0);
    let ratio = rp / (rho + qi);
    let (it3, d_rho) = match (sys.partials_at(rho, rp), sys.q(rho)) {
        (Ok((dr, dz)), Ok(q_rho)) if rho > 0.0 && z > 0.0 => (dz * rho * q_rho / (rp * rp), dr),
        (Ok((dr, _)), _) => (0.0, dr),
        _ => (f64::NAN, f64::NAN),
    };
    let round_trip = match sys.recover_phases(rho, z) {
        Ok(ph) => {
            let r = ph.a_frac * ph.rho_plus;
            let zz = (1.0 - ph.a_frac) * ph.rho_minus;
            ((r - rho).abs() / rho.max(f64::MIN_POSITIVE))
                .max((zz - z).abs() / z.max(f64::MIN_POSITIVE))
        }
        Err(_) => f64::NAN,
    };
    Sample {
        rho,
        z,
        rho_plus: rp,
        residual,
        ratio,
        it3,
        d_rho,
        round_trip,
    }
}

fn extreme(samples: &[Sample], key: impl Fn(&Sample) -> f64, take_max: bool) -> (f64, Sample) {
    let mut best = (key(&samples[0]), samples[0]);
    for s in &samples[1..] {
        if best.0.is_nan() {
            break;
        }
        let v = key(s);
        if v.is_nan() || (take_max && v > best.0) || (!take_max && v < best.0) {
            best = (v, *s);
        }
    }
    best
}

fn rho_plus_properties(sys: &BiFluidSystem, spec: &SamplingSpec, report: &mut HypothesisReport) {
    let (lo, hi) = (sys.region().a_lower()[0], sys.region().a_upper()[0]);
    let m = spec.s_points.max(2);
    let fractions: Vec<f64> = (0..m)
        .map(|j| lo + (hi - lo) * j as f64 / (m - 1) as f64)
        .collect();
    let grid = spec.rho_grid();
    let mut points: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&r| fractions.iter().map(move |&s| (r, r * s)))
        .collect();
    // the vacuum axis ρ = 0 is only reached by the band when a_lower = 0
    if lo == 0.0 {
        points.extend(grid.iter().map(|&z| (0.0, z)));
    }
    let samples: Vec<Sample> = points.par_iter().map(|&(r, z)| sample(sys, r, z)).collect();
    let rz = |s: &Sample| Witness::rho_z(s.rho, &[s.z], s.rho_plus);

    let (res, w) = extreme(&samples, |s| s.residual, true);
    report.push(Check::new(
        "rho_plus.residual",
        "|rho+ q - q rho - Z rho+| <= tol (rho+ q + 1)",
        upper_verdict(res, sys.root_tolerance(), Some(0.0)),
        res,
        sys.root_tolerance(),
        rz(&w),
    ));

    let (c_lo, w_lo) = extreme(&samples, |s| s.ratio, false);
    let (c_hi, w_hi) = extreme(&samples, |s| s.ratio, true);
    let (below, w_below) = extreme(&samples, |s| (s.rho - s.rho_plus) / s.rho.max(1.0), true);
    report.constant("rho_plus.c_lower", c_lo);
    report.constant("rho_plus.c_upper", c_hi);
    let sandwich = if !(c_lo > 0.0) || !c_hi.is_finite() || below > 1e-12 {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let witness = if below > 1e-12 {
        rz(&w_below)
    } else if !(c_lo > 0.0) {
        rz(&w_lo)
    } else {
        rz(&w_hi)
    };
    report.push(Check::new(
        "rho_plus.sandwich",
        "max{rho, c (rho + q^-1(Z))} <= rho+ <= C (rho + q^-1(Z)) with fitted 0 < c <= C < inf",
        sandwich,
        c_hi,
        f64::NAN,
        witness,
    ));

    let (it3, w) = extreme(&samples, |s| s.it3, true);
    report.push(Check::new(
        "rho_plus.dz_bound",
        "d_Z rho+ <= rho+^2 / (rho q(rho)) pointwise",
        upper_verdict(it3, 1.0, Some(0.0)),
        it3,
        1.0,
        rz(&w),
    ));

    let (rt, w) = extreme(&samples, |s| s.round_trip, true);
    report.push(Check::new(
        "recover.round_trip",
        "(a rho+, (1 - a) rho-) reproduces (rho, Z)",
        upper_verdict(rt, 1e-10, Some(0.0)),
        rt,
        1e-10,
        rz(&w),
    ));

    // ∂_ρ ρ₊ ≤ 1 follows when s ↦ q(s)/s is nondecreasing
    let q_over_s_monotone = grid.windows(2).all(|w| {
        let a = sys.q(w[0]).map(|q| q / w[0]).unwrap_or(f64::NAN);
        let b = sys.q(w[1]).map(|q| q / w[1]).unwrap_or(f64::NAN);
        b >= a * (1.0 - 1e-12)
    });
    if q_over_s_monotone {
        let (d, w) = extreme(&samples, |s| s.d_rho, true);
        report.push(Check::new(
            "rho_plus.d_rho_le_one",
            "d_rho rho+ <= 1 (q(s)/s is nondecreasing for this system)",
            upper_verdict(d, 1.0, Some(0.0)),
            d,
            1.0,
            rz(&w),
        ));
    } else {
        report
            .notes
            .push("q(s)/s decreases somewhere; the bound d_rho rho+ <= 1 is not expected".into());
    }

    partial_consistency(sys, spec, report);
    monotonicity(sys, spec, report);
}

fn partial_consistency(sys: &BiFluidSystem, spec: &SamplingSpec, report: &mut HypothesisReport) {
    let (lo, hi) = (sys.region().a_lower()[0], sys.region().a_upper()[0]);
    let rhos = log_grid(spec.r_floor, 1.0 / spec.r_floor, spec.points_per_decade.div_ceil(3).max(1));
    let points: Vec<(f64, f64)> = rhos
        .iter()
        .flat_map(|&r| {
            [0.25, 0.5, 0.75]
                .into_iter()
                .map(move |t| (r, r * (lo + t * (hi - lo))))
        })
        .collect();
    let rtol = sys.root_options().rtol;
    let errs: Vec<(f64, (f64, f64))> = points
        .par_iter()
        .map(|&(r, z)| {
            let Ok((dr, dz)) = sys.rho_plus_partials(r, z) else {
                return (f64::INFINITY, (r, z));
            };
            let f = |a: f64, b: f64| sys.solve_rho_plus(a, b).unwrap_or(f64::NAN);
            let (hr, hz) = (fd_step(r), fd_step(z).min(0.25 * z));
            let fr = central_derivative(|x| f(x, z), r, hr);
            let fz = central_derivative(|x| f(r, x), z, hz);
            // the differences cannot resolve below the root solver's precision
            let scale = f(r, z).abs() * 2.0 * rtol / 1e-6;
            let rel = |exact: f64, fd: f64, h: f64| (exact - fd).abs() / (fd.abs() + scale / h);
            let e = rel(dr, fr, hr).max(rel(dz, fz, hz));
            (if e.is_nan() { f64::INFINITY } else { e }, (r, z))
        })
        .collect();
    let (e, (r, z)) = errs
        .into_iter()
        .fold((0.0, (1.0, 1.0)), |a, b| if b.0 > a.0 { b } else { a });
    report.push(Check::new(
        "rho_plus.partials",
        "implicit-function partials of rho+ agree with central differences",
        upper_verdict(e, 1e-6, None),
        e,
        1e-6,
        Witness::rho_z(r, &[z], e),
    ));
}

/// Increase of `ρ₊` in each argument on a tensor grid, up to the root precision.
fn monotonicity(sys: &BiFluidSystem, spec: &SamplingSpec, report: &mut HypothesisReport) {
    let slack = 1.0 - 4.0 * sys.root_options().rtol;
    let g = log_grid(spec.rho_min, spec.rho_max, spec.points_per_decade.div_ceil(2).max(1));
    let table: Vec<Vec<f64>> = g
        .par_iter()
        .map(|&r| {
            g.iter()
                .map(|&z| sys.solve_rho_plus(r, z).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let mut violations = 0usize;
    let mut witness = Witness::rho_z(g[0], &[g[0]], 0.0);
    for i in 0..g.len() {
        for j in 0..g.len() {
            let v = table[i][j];
            let up_r = i + 1 < g.len() && !(table[i + 1][j] > v * slack);
            let up_z = j + 1 < g.len() && !(table[i][j + 1] > v * slack);
            if up_r || up_z {
                if violations == 0 {
                    witness = Witness::rho_z(g[i], &[g[j]], v);
                }
                violations += 1;
            }
        }
    }
    report.push(Check::new(
        "rho_plus.monotone",
        "rho+ increasing in rho and in Z on the sampled grid, to root precision",
        if violations == 0 { Verdict::Pass } else { Verdict::Fail },
        violations as f64,
        0.0,
        witness,
    ));
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bifluid::phase::PowerPhase;
    use crate::constitutive::AdmissibleRegion;

    fn sys(gp: f64, gm: f64, lo: f64) -> BiFluidSystem {
        BiFluidSystem::new(
            Arc::new(PowerPhase::pure(gp).unwrap()),
            Arc::new(PowerPhase::pure(gm).unwrap()),
            AdmissibleRegion::bi(lo, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn quick() -> SamplingSpec {
        SamplingSpec {
            points_per_decade: 4,
            s_points: 4,
            ..SamplingSpec::default()
        }
    }

    #[test]
    fn moderate_exponents_pass() {
        let r = audit_bifluid(&sys(1.8, 1.2, 0.0), &quick());
        let c = r.check("bifluid.gamma_bar").unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!((c.measured.unwrap() - 1.3).abs() < 1e-12);
        assert_eq!(r.check("isentropic.alpha").unwrap().verdict, Verdict::Pass);
        let bad: Vec<_> = r.checks.iter().filter(|c| c.verdict == Verdict::Fail).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn huge_minus_exponent_fails_exactly() {
        let r = audit_bifluid(&sys(2.0, 10.0, 0.0), &quick());
        let c = r.check("bifluid.gamma_bar").unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.description.contains("74/5") && c.description.contains("7/3"));
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn identical_phases_have_half_fraction_bound() {
        let r = audit_bifluid(&sys(2.0, 2.0, 0.0), &quick());
        assert!((r.constants["q_lower"] - 0.5).abs() < 1e-12);
    }
}
