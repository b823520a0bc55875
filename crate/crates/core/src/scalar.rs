//! The ground field: exact rationals with arbitrary-precision integers.
//!
//! Everything in this crate computes over Q. `BigRational` keeps values in
//! canonical reduced form (gcd 1, positive denominator), which is exactly the
//! invariant we need, so we use it directly rather than wrapping it.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Scalar = BigRational;

/// Integer as a scalar.
pub fn qi(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Fraction n/d as a scalar. Panics on d = 0.
pub fn q(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(x: &Scalar) -> bool {
    x.is_zero()
}

pub fn is_one(x: &Scalar) -> bool {
    x.is_one()
}

/// Canonical text form: `p` when the denominator is 1, otherwise `p/q`.
pub fn fmt_q(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p` or `p/q` with optional sign. Returns None on malformed input.
pub fn parse_q(s: &str) -> Option<Scalar> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// (-1)^k as a scalar.
pub fn sign_pow(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        qi(1)
    } else {
        qi(-1)
    }
}

/// Sign of a product of two degrees under the Koszul rule.
pub fn koszul(a: i32, b: i32) -> Scalar {
    sign_pow((a as i64) * (b as i64))
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}
