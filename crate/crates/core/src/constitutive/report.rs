//! Hypothesis audit reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Indeterminate,
    Fail,
}

impl Verdict {
    /// The worse of two verdicts.
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

/// Relative width of the indeterminate band around a declared bound.
pub const INDETERMINATE_BAND: f64 = 0.05;

fn band(bound: f64, absolute: Option<f64>) -> f64 {
    absolute.unwrap_or(INDETERMINATE_BAND * bound.abs())
}

/// `measured ≤ bound`, with an indeterminate band above the bound of
/// `absolute` (or 5% of the bound).
pub fn upper_verdict(measured: f64, bound: f64, absolute: Option<f64>) -> Verdict {
    if !measured.is_finite() {
        return Verdict::Fail;
    }
    if measured <= bound + 1e-6 * bound.abs() + 1e-9 {
        Verdict::Pass
    } else if measured <= bound + band(bound, absolute) {
        Verdict::Indeterminate
    } else {
        Verdict::Fail
    }
}

/// `measured ≥ bound`, mirrored from [`upper_verdict`].
pub fn lower_verdict(measured: f64, bound: f64, absolute: Option<f64>) -> Verdict {
    if !measured.is_finite() {
        return Verdict::Fail;
    }
    if measured >= bound - 1e-6 * bound.abs() - 1e-9 {
        Verdict::Pass
    } else if measured >= bound - band(bound, absolute) {
        Verdict::Indeterminate
    } else {
        Verdict::Fail
    }
}

/// `measured < bound`; anything within the band on either side is
/// indeterminate.
pub fn strict_upper_verdict(measured: f64, bound: f64, absolute: Option<f64>) -> Verdict {
    if !measured.is_finite() {
        return Verdict::Fail;
    }
    let b = band(bound, absolute);
    if measured < bound - b {
        Verdict::Pass
    } else if measured < bound + b {
        Verdict::Indeterminate
    } else {
        Verdict::Fail
    }
}

/// Fitted slopes carry discretization bias from lower-order terms; they
/// pass within this distance of the claimed exponent.
pub const SLOPE_TOLERANCE: f64 = 0.01;
/// Width of the indeterminate zone for fitted slopes.
pub const SLOPE_BAND: f64 = 0.05;

/// Fitted slope `≤ bound`.
pub fn slope_upper_verdict(measured: f64, bound: f64) -> Verdict {
    if !measured.is_finite() {
        Verdict::Fail
    } else if measured <= bound + SLOPE_TOLERANCE {
        Verdict::Pass
    } else if measured <= bound + SLOPE_BAND {
        Verdict::Indeterminate
    } else {
        Verdict::Fail
    }
}

/// Fitted slope `≥ bound`.
pub fn slope_lower_verdict(measured: f64, bound: f64) -> Verdict {
    if !measured.is_finite() {
        return Verdict::Fail;
    }
    slope_upper_verdict(-measured, -bound)
}

/// Sample point attached to a check: the worst point for passing checks,
/// the violating point for failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Coordinates in the order named by `coordinates`.
    pub point: Vec<f64>,
    /// Names such as `rho`, `s_1`, `Z_1`.
    pub coordinates: Vec<String>,
    /// The sampled quantity at the point.
    pub value: f64,
}

impl Witness {
    pub fn rho_s(rho: f64, s: &[f64], value: f64) -> Self {
        let mut coordinates = vec!["rho".to_string()];
        coordinates.extend((1..=s.len()).map(|i| format!("s_{i}")));
        let mut point = vec![rho];
        point.extend_from_slice(s);
        Self {
            point,
            coordinates,
            value,
        }
    }

    pub fn rho_z(rho: f64, z: &[f64], value: f64) -> Self {
        let mut w = Self::rho_s(rho, z, value);
        for (i, c) in w.coordinates.iter_mut().enumerate().skip(1) {
            *c = format!("Z_{i}");
        }
        w
    }

    pub fn scalar(name: &str, at: f64, value: f64) -> Self {
        Self {
            point: vec![at],
            coordinates: vec![name.to_string()],
            value,
        }
    }

    /// For checks decided by arithmetic on exponents alone.
    pub fn exponents(names: &[&str], values: &[f64], value: f64) -> Self {
        Self {
            point: values.to_vec(),
            coordinates: names.iter().map(|s| s.to_string()).collect(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub verdict: Verdict,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub witness: Witness,
}

impl Check {
    pub fn new(
        id: &str,
        description: impl Into<String>,
        verdict: Verdict,
        measured: f64,
        bound: f64,
        witness: Witness,
    ) -> Self {
        Self {
            id: id.to_string(),
            description: description.into(),
            verdict,
            measured: measured.is_finite().then_some(measured),
            bound: bound.is_finite().then_some(bound),
            witness,
        }
    }
}

/// The sampling box of an audit. Verdicts are a deterministic function of
/// the law and these settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub points_per_decade: usize,
    /// Samples per fraction axis across `[a_lower, a_upper]`.
    pub s_points: usize,
    /// Lower density cut for checks that only hold away from vacuum.
    pub r_floor: f64,
    /// Seed for the randomized interior points of the partial-derivative check.
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            rho_min: 1e-4,
            rho_max: 1e4,
            points_per_decade: 12,
            s_points: 9,
            r_floor: 1e-2,
            seed: 0x5eed,
        }
    }
}

impl SamplingSpec {
    /// Log-spaced densities from `rho_min` to `rho_max`, inclusive.
    pub fn rho_grid(&self) -> Vec<f64> {
        log_grid(self.rho_min, self.rho_max, self.points_per_decade)
    }
}

pub(crate) fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|j| lo * 10f64.powf(decades * j as f64 / n as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub subject: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    /// Fitted constants keyed by name.
    pub constants: BTreeMap<String, f64>,
    pub sampling: SamplingSpec,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn new(subject: impl Into<String>, sampling: SamplingSpec) -> Self {
        Self {
            subject: subject.into(),
            verdict: Verdict::Pass,
            checks: Vec::new(),
            constants: BTreeMap::new(),
            sampling,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.verdict = self.verdict.and(check.verdict);
        self.checks.push(check);
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.constants.insert(name.to_string(), value);
        }
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
