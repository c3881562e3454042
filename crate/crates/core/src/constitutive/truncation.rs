//! Truncations `T_k(z) = k T(z/k)` and `L_k(z) = z ∫₁^z T_k(t)/t² dt`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureOptions};

/// Concave profile: identity below 1, the constant 2 above 3, and
/// `1 + x − x³/4 + x⁴/16` with `x = z − 1` in between (C², slope 1 → 0).
pub fn profile(z: f64) -> f64 {
    if z < 1.0 {
        z
    } else if z >= 3.0 {
        2.0
    } else {
        let x = z - 1.0;
        1.0 + x - x * x * x / 4.0 + x * x * x * x / 16.0
    }
}

pub fn profile_slope(z: f64) -> f64 {
    if z < 1.0 {
        1.0
    } else if z >= 3.0 {
        0.0
    } else {
        let x = z - 1.0;
        1.0 - 0.75 * x * x + 0.25 * x * x * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationKit {
    k: f64,
}

impl TruncationKit {
    pub fn new(k: f64) -> Result<Self> {
        if k > 1.0 && k.is_finite() {
            Ok(Self { k })
        } else {
            Err(Error::Domain(format!("truncation level must exceed 1, got {k}")))
        }
    }

    pub fn level(&self) -> f64 {
        self.k
    }

    /// `T_k(z)`.
    pub fn t(&self, z: f64) -> f64 {
        // exact identity below the level; k·(z/k) can be off by an ulp
        if z < self.k {
            return z;
        }
        self.k * profile(z / self.k)
    }

    /// `T_k'(z)`.
    pub fn dt(&self, z: f64) -> f64 {
        profile_slope(z / self.k)
    }

    /// `L_k(z)` by quadrature in `ln t`; `L_k(0) = 0`.
    pub fn l(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Domain(format!("L_k needs z >= 0, got {z}")));
        }
        if z == 0.0 {
            return Ok(0.0);
        }
        let end = z.ln();
        // kinks of the profile at z = k and z = 3k
        let mut nodes = vec![0.0, end];
        for b in [self.k.ln(), (3.0 * self.k).ln()] {
            if b > end.min(0.0) && b < end.max(0.0) {
                nodes.push(b);
            }
        }
        nodes.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in nodes.windows(2) {
            total += integrate(
                |tau| {
                    let t = tau.exp();
                    self.t(t) / t
                },
                w[0],
                w[1],
                QuadratureOptions::default(),
            )?
            .value;
        }
        Ok(z * if end < 0.0 { -total } else { total })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_derivative;

    #[test]
    fn profile_values() {
        let kit = TruncationKit::new(2.0).unwrap();
        assert_eq!(kit.t(1.0), 1.0);
        assert_eq!(kit.t(10.0), 4.0);
        assert_eq!(kit.l(1.0).unwrap(), 0.0);
        assert!((profile(3.0 - 1e-12) - 2.0).abs() < 1e-10);
        assert!(TruncationKit::new(1.0).is_err());
    }

    #[test]
    fn l_matches_closed_form_below_k() {
        // T_k(t) = t for t <= k gives L_k(z) = z ln z
        let kit = TruncationKit::new(4.0).unwrap();
        for z in [0.1, 0.5, 2.0, 3.9] {
            let l: f64 = kit.l(z).unwrap();
            assert!((l - z * z.ln()).abs() < 1e-13, "{z}");
        }
    }

    #[test]
    fn l_renormalizes_to_truncation() {
        // z L_k'(z) − L_k(z) = T_k(z)
        let kit = TruncationKit::new(1.5).unwrap();
        for z in [0.7, 2.0, 3.3, 6.0] {
            let d = central_derivative(|x| kit.l(x).unwrap(), z, 1e-3);
            assert!((z * d - kit.l(z).unwrap() - kit.t(z)).abs() < 1e-8, "{z}");
        }
    }
}
