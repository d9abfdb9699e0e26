//! Arbitrary-precision rational scalars and small helpers shared crate-wide.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::Result;

/// Exact scalar type used for all probabilities, rewards, costs and payments.
pub type Rat = num_rational::BigRational;

/// Shorthand for a rational from an integer pair, reduced on construction.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"num/den"` or a bare integer, with an optional leading minus.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Formats a rational canonically: bare integer when the denominator is one,
/// `"num/den"` otherwise. `parse_rat(&format_rat(x)) == x` for every `x`.
pub fn format_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Six-significant-digit decimal rendering, prefixed to mark it approximate.
pub fn format_approx(x: &Rat) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "~0".to_string();
    }
    let s = if v.abs() >= 1e-3 && v.abs() < 1e9 {
        let digits = (5 - v.abs().log10().floor() as i32).max(0) as usize;
        format!("{v:.digits$}")
    } else {
        format!("{v:.5e}")
    };
    format!("~{s}")
}

/// Smallest granularity used when rounding irrational square roots upward.
const SQRT_SCALE: u64 = 10_000_000_000;

/// A rational upper bound on the square root of a nonnegative rational.
///
/// Perfect rational squares are returned exactly; otherwise the result
/// overshoots the true root by less than `1e-9`.
pub fn sqrt_upper(x: &Rat) -> Result<Rat> {
    if x.is_negative() {
        return Err(Error::NegativeSqrt(format_rat(x)));
    }
    if x.is_zero() {
        return Ok(Rat::zero());
    }
    let (num, den) = (x.numer().clone(), x.denom().clone());
    let prod = &num * &den;
    let root = prod.sqrt();
    if &root * &root == prod {
        return Ok(Rat::new(root, den));
    }
    let scale = BigInt::from(SQRT_SCALE);
    let scaled = &prod * &scale * &scale;
    Ok(Rat::new(scaled.sqrt() + 1, den * scale))
}

/// Parses a whole vector of rational strings.
pub fn parse_rat_vec(items: &[String]) -> Result<Vec<Rat>> {
    items.iter().map(|s| parse_rat(s)).collect()
}

/// Formats a whole vector of rationals.
pub fn format_rat_vec(items: &[Rat]) -> Vec<String> {
    items.iter().map(format_rat).collect()
}
