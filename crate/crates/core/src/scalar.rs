//! Scalar abstraction so every predicate and oracle can run either in
//! exact rational arithmetic or in `f64`.
//!
//! The analysis code is generic over [`Scalar`]; concrete aliases for the
//! two supported backends live at the crate root. Exact mode is the
//! default for stability predicates because several of them compare
//! quantities that can tie exactly (strict vs. weak inequalities decide
//! membership); float mode exists for quick exploration and for the
//! truncated-chain solver where exactness is unattainable anyway.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use std::fmt::Debug;

/// Number type used by the generic analysis code.
///
/// Implementors must behave like a totally ordered field on the values the
/// library produces (probabilities, their sums and products, and small
/// integer multiples thereof).
pub trait Scalar: Num + Signed + PartialOrd + Clone + Debug + Send + Sync + 'static {
    /// Embed a machine integer.
    fn from_int(n: i64) -> Self;

    /// Embed the ratio `num / den`. `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossy conversion for reporting and thresholds.
    fn to_f64(&self) -> f64;

    /// Human-readable rendering: decimal for floats, `num/den` for rationals.
    fn render(&self) -> String;
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// Sum of an iterator of scalars (the `Sum` trait is not available for
/// every backend).
pub fn sum<S: Scalar>(iter: impl IntoIterator<Item = S>) -> S {
    iter.into_iter().fold(S::zero(), |acc, x| acc + x)
}
