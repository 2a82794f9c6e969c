//! Binomial coefficients and factorials over arbitrary-precision integers.
//!
//! The binomial follows the extended convention used throughout the crate:
//! `binom(a, b) = 0` for `b < 0` or `0 <= a < b`, `binom(a, 0) = 1` for every
//! `a` (including negative `a`), and `binom(a, b) = 0` for `a < 0`, `b >= 1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn binom(a: i64, b: i64) -> BigInt {
    if b < 0 {
        return BigInt::zero();
    }
    if b == 0 {
        return BigInt::one();
    }
    if a < b {
        // covers a < 0 as well
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// `binom(a, b)` as `f64`, for moderate arguments; same conventions as [`binom`].
pub fn binom_f64(a: i64, b: i64) -> f64 {
    if b < 0 {
        return 0.0;
    }
    if b == 0 {
        return 1.0;
    }
    if a < b {
        return 0.0;
    }
    let b = b.min(a - b);
    let mut acc = 1.0;
    for i in 0..b {
        acc *= (a - i) as f64;
        acc /= (i + 1) as f64;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn factorial_f64(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Converts a nonnegative big integer ratio to `f64` without overflowing
/// when both operands exceed the `f64` range.
pub fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(2, 5), BigInt::zero());
        assert_eq!(binom(-1, 0), BigInt::one());
        assert_eq!(binom(-1, 1), BigInt::zero());
        assert_eq!(binom(3, -1), BigInt::zero());
        assert_eq!(binom(0, 0), BigInt::one());
        assert_eq!(binom_f64(10, 3), 120.0);
    }

    #[test]
    fn pascal_rule() {
        for a in 1..30 {
            for b in 1..=a {
                assert_eq!(binom(a, b), binom(a - 1, b) + binom(a - 1, b - 1));
            }
        }
    }

    #[test]
    fn huge_ratio() {
        let a = factorial(400);
        let b = factorial(399);
        assert!((ratio_f64(&a, &b) - 400.0).abs() < 1e-9);
    }
}
