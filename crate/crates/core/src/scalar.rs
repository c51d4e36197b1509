//! Probability scalars.
//!
//! Every quantity in this crate is a probability under the uniform measure
//! on profiles. The exact paths produce integer counts over a known
//! denominator; those counts can be read out as any [`Scalar`]: a big
//! rational for exact comparisons, or `f64`/`f32` for display and for the
//! sampled estimators. The inequality predicates are written once against
//! this trait.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: u128, den: u128) -> Self;

    fn from_u32(v: u32) -> Self {
        Self::from_ratio(v as u128, 1)
    }

    fn as_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `lhs <= k * sqrt(rhs)` for nonnegative `k` and `rhs`, decided without
/// square roots.
pub fn le_scaled_sqrt<T: Scalar>(lhs: &T, k: &T, rhs: &T) -> bool {
    if *lhs <= T::zero() {
        return true;
    }
    lhs.clone() * lhs.clone() <= k.clone() * k.clone() * rhs.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_comparison_matches_float() {
        let q = |n, d| BigRational::from_ratio(n, d);
        // 1/2 <= 3 * sqrt(1/36) = 1/2
        assert!(le_scaled_sqrt(&q(1, 2), &q(3, 1), &q(1, 36)));
        assert!(!le_scaled_sqrt(&q(51, 100), &q(3, 1), &q(1, 36)));
        assert!(le_scaled_sqrt(&0.5f64, &3.0, &(1.0 / 36.0)));
        assert!(le_scaled_sqrt(&q(0, 1), &q(0, 1), &q(0, 1)));
    }

    #[test]
    fn ratio_conversions_agree() {
        let exact = BigRational::from_ratio(7, 27);
        assert!((exact.as_f64() - 7.0 / 27.0).abs() < 1e-15);
        assert!((f32::from_ratio(7, 27).as_f64() - 7.0 / 27.0).abs() < 1e-6);
    }
}
