//! Scalar abstractions.
//!
//! Geometry, sampling and the quantum reference are written against [`Real`]
//! (any `num_traits::Float`, in practice `f32` or `f64`). The enumeration
//! oracle only needs field arithmetic and is written against [`Probability`],
//! which is implemented for the floats and for exact big rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, Num, ToPrimitive};

/// Floating point scalar used for directions, rotations and spin matrices.
pub trait Real: Float + FloatConst + Debug + Send + Sync + 'static {
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        Self::from(x).expect("f64 is representable in every Float type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Float converts to f64")
    }
}

impl<T: Float + FloatConst + Debug + Send + Sync + 'static> Real for T {}

/// Field scalar for probability tables.
pub trait Probability: Num + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// The value `numer / denom`. `denom` must be non-zero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Sum of many terms. Floating point types use compensated summation.
    fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    /// True when arithmetic on this type is exact.
    fn is_exact() -> bool;
}

macro_rules! float_probability {
    ($t:ty) => {
        impl Probability for $t {
            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self {
                // Kahan-Babuska (Neumaier) summation.
                let mut sum: $t = 0.0;
                let mut comp: $t = 0.0;
                for t in terms {
                    let next = sum + t;
                    if sum.abs() >= t.abs() {
                        comp += (sum - next) + t;
                    } else {
                        comp += (t - next) + sum;
                    }
                    sum = next;
                }
                sum + comp
            }

            fn is_exact() -> bool {
                false
            }
        }
    };
}

float_probability!(f32);
float_probability!(f64);

impl Probability for BigRational {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}
