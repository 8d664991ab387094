//! Exact rational scalars. Thin aliases and constructors around
//! `num_rational::BigRational`; nothing in the kernel touches floating point.

use num_bigint::BigInt;

pub type Rat = num_rational::BigRational;

/// Integer as a rational.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics on `d = 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact conversion to `i64` if the rational is an integer in range.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    let n = r.to_integer();
    i64::try_from(n).ok()
}
