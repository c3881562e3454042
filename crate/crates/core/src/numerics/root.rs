//! Bracketing root finders.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub xtol: f64,
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            xtol: 0.0,
            rtol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
///
/// Combines inverse quadratic interpolation and secant steps with a
/// bisection safeguard, so each iteration at least halves the bracket
/// every two steps.
pub fn brent<F>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut xpre, mut xcur) = (a, b);
    let (mut fpre, mut fcur) = (f(xpre), f(xcur));
    if fpre == 0.0 {
        return Ok(xpre);
    }
    if fcur == 0.0 {
        return Ok(xcur);
    }
    if !fpre.is_finite() || !fcur.is_finite() || fpre.signum() == fcur.signum() {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fpre,
            f_hi: fcur,
        });
    }
    let (mut xblk, mut fblk) = (0.0, 0.0);
    let (mut spre, mut scur) = (0.0, 0.0);

    for _ in 0..opts.max_iter {
        if fpre != 0.0 && fcur != 0.0 && fpre.signum() != fcur.signum() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = 0.5 * (opts.xtol + opts.rtol * xcur.abs());
        let sbis = 0.5 * (xblk - xcur);
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(xcur);
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // secant
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // inverse quadratic interpolation
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
        if !fcur.is_finite() {
            return Err(Error::NonFinite {
                location: format!("root iterate x = {xcur}"),
                value: fcur,
            });
        }
    }
    Err(Error::NoConvergence {
        solver: "brent",
        iterations: opts.max_iter,
        state: format!("bracket [{}, {}]", xcur.min(xblk), xcur.max(xblk)),
    })
}

/// Grows `hi` geometrically (doubling its distance from `lo`) until `f`
/// changes sign on `[lo, hi]`. Returns the bracket.
pub fn expand_bracket<F>(mut f: F, lo: f64, hi: f64, max_doublings: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let mut width = (hi - lo).max(f64::MIN_POSITIVE);
    let mut upper = lo + width;
    let mut f_hi = f(upper);
    for _ in 0..max_doublings {
        if f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() != f_hi.signum() {
            return Ok((lo, upper));
        }
        width *= 2.0;
        upper = lo + width;
        f_hi = f(upper);
    }
    Err(Error::Bracket {
        lo,
        hi: upper,
        f_lo,
        f_hi,
    })
}
