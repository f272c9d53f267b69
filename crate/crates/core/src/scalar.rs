//! Numeric abstractions shared by the clustering and rule-mining stages.
//!
//! K-means runs over any [`Scalar`] (`f32`, `f64`). Rule metrics are built
//! from integer counts, so they can be carried in any [`Measure`], including
//! the exact [`Rational`] type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as a K-means coordinate.
pub trait Scalar: Float + FromPrimitive + Sum + Send + Sync + Debug + Display + 'static {
    /// Lossy conversion used for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize representable as float")
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Sum + Send + Sync + Debug + Display + 'static {}

/// Exact rational with unsigned 64-bit numerator and denominator.
pub type Rational = Ratio<u64>;

/// A quantity built from count ratios: support, confidence and lift.
pub trait Measure: Clone + PartialOrd + Debug + Send + Sync {
    /// `num / den`. `den` is never zero at call sites.
    fn from_counts(num: u64, den: u64) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
}

macro_rules! float_measure {
    ($t:ty) => {
        impl Measure for $t {
            fn from_counts(num: u64, den: u64) -> Self {
                num as $t / den as $t
            }
            fn div(&self, other: &Self) -> Self {
                self / other
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_measure!(f32);
float_measure!(f64);

impl Measure for Rational {
    fn from_counts(num: u64, den: u64) -> Self {
        Ratio::new(num, den)
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_exact() {
        let a = Rational::from_counts(1, 3);
        let b = Rational::from_counts(2, 6);
        assert_eq!(a, b);
        assert_eq!(a.div(&b), Rational::from_integer(1));
    }

    #[test]
    fn float_counts() {
        assert_eq!(<f64 as Measure>::from_counts(1, 4), 0.25);
        assert_eq!(<f32 as Measure>::from_counts(3, 4), 0.75);
    }
}
