//! Exact coefficient arithmetic: rationals, sparse multivariate polynomials
//! and reduced rational functions.
//!
//! Coefficients always live in `Q`. Rings such as `Z[1/2]` or `Z[1/6]` are
//! modelled by asking whether every denominator is supported on a given set
//! of primes, see [`prime_support_within`].

mod gcd;
mod poly;
mod ratfunc;
pub mod text;

use alloc::string::String;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use poly::{Monomial, MultiPoly};
pub use ratfunc::{identity_assignment, RatFunc};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` has no assignment")]
    UnassignedVariable(String),
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("substitution makes a denominator identically zero")]
    DegenerateSubstitution,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// True when every prime dividing `q`'s denominator is one of `primes`.
pub fn prime_support_within(q: &Rational, primes: &[u64]) -> bool {
    let mut d = q.denom().abs();
    for &p in primes {
        let p = BigInt::from(p);
        while !d.is_one() && d.is_multiple_of(&p) {
            d /= &p;
        }
    }
    d.is_one()
}

/// Lowest common multiple of the denominators of `coeffs` (1 for none).
pub(crate) fn denominator_lcm<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> BigInt {
    coeffs.fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// Greatest common divisor of the numerators of `coeffs` (0 for none).
pub(crate) fn numerator_gcd<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> BigInt {
    coeffs.fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_support() {
        assert!(prime_support_within(&rat(3, 8), &[2]));
        assert!(!prime_support_within(&rat(1, 12), &[2]));
        assert!(prime_support_within(&rat(1, 12), &[2, 3]));
        assert!(prime_support_within(&int(-7), &[]));
        assert!(!prime_support_within(&rat(1, 5), &[2, 3]));
    }

    #[test]
    fn rationals_are_reduced() {
        let q = rat(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(rat(0, 5), int(0));
    }
}
