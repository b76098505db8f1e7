//! Exact rational arithmetic for welfare values.
//!
//! All welfare computation in this crate is exact: optima from different
//! algorithms are compared with `==`, never with a tolerance. `BigRational`
//! keeps values in lowest terms with a positive denominator, which is exactly
//! the invariant the welfare comparisons rely on.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{FhgError, Result};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `p/q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses an integer or `p/q` literal, e.g. `-3` or `5/2`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let make_err = || FhgError::domain(format!("invalid rational literal `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let p: BigInt = num.parse().map_err(|_| make_err())?;
    let q: BigInt = match den {
        Some(q) => q.parse().map_err(|_| make_err())?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(make_err());
    }
    Ok(Rational::new(p, q))
}

/// Renders `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering for `--approx` output; never used in comparisons.
pub fn approx_f64(r: &Rational) -> f64 {
    let digits = 15;
    let scale = BigInt::from(10u8).pow(digits);
    let scaled = (r.numer() * &scale) / r.denom();
    let sign = if scaled.is_negative() { -1.0 } else { 1.0 };
    let mag: f64 = scaled.abs().to_string().parse().unwrap_or(f64::INFINITY);
    sign * mag / 1e15
}
