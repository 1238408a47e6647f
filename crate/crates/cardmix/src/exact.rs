//! Exact rational arithmetic used by every enumeration backend.
//!
//! All small-deck checks run on arbitrary-precision rationals so that
//! equalities asserted by the verification suite are exact, never
//! tolerance-based. Floating point appears only in Monte Carlo paths.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Exact = BigRational;

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_int(n: i64) -> Exact {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Exact {
    BigRational::zero()
}

pub fn one() -> Exact {
    BigRational::one()
}

/// 1 / n!
pub fn inv_factorial(n: usize) -> Exact {
    BigRational::new(BigInt::one(), factorial_big(n))
}

pub fn factorial_big(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

pub fn to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of lossy conversions for huge terms.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Binomial coefficient as a big integer.
pub fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Render a rational as "p/q" (or "p" when integral).
pub fn display(x: &Exact) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Sum of absolute differences between two rationals.
pub fn abs_diff(a: &Exact, b: &Exact) -> Exact {
    (a - b).abs()
}
