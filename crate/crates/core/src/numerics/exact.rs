//! Exact rational images of decimal parameters.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The rational number written by the shortest decimal representation of
/// `x`, so that `1.8` becomes exactly `9/5`. `None` for non-finite input.
pub fn decimal_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    // Display for f64 never uses exponent notation
    let text = format!("{x}");
    let (neg, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let mut numer: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    if neg {
        numer = -numer;
    }
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(numer, denom))
}

/// `min{2g/3 − 1, g/2}` in exact arithmetic.
pub fn bogovskii_gain_exact(g: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    let a = &two * g / &three - BigRational::one();
    let b = g / &two;
    if a < b {
        a
    } else {
        b
    }
}

/// Formats a rational as `p/q`, or `p` for integers.
pub fn show(r: &BigRational) -> String {
    if r.denom().is_one() || r.numer().is_zero() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_become_exact_fractions() {
        let r = decimal_rational(1.8).unwrap();
        assert_eq!(show(&r), "9/5");
        assert_eq!(show(&decimal_rational(-0.25).unwrap()), "-1/4");
        assert_eq!(show(&decimal_rational(10.0).unwrap()), "10");
        assert!(decimal_rational(f64::NAN).is_none());
        assert_eq!(show(&decimal_rational(1e-7).unwrap()), "1/10000000");
    }

    #[test]
    fn gain_at_two() {
        let g = bogovskii_gain_exact(&decimal_rational(2.0).unwrap());
        assert_eq!(show(&g), "1/3");
    }
}
