//! Scalar abstractions shared by the numeric parts of the crate.
//!
//! Everything that needs division (Gromov-Witten values, rational
//! diagonalization of intersection forms, norm-ball geometry) is written
//! against [`Field`]. The exact instantiation used throughout is
//! [`BigRational`]; `f64` also satisfies the bound and is handy for quick
//! sanity checks, but zero tests on floats are only as good as the input.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An ordered field with conversions from machine integers.
pub trait Field:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + FromPrimitive + Send + Sync
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every field in use embeds the integers")
    }

    /// Returns the value as an integer if it is one.
    fn as_integer(&self) -> Option<i64>;

    fn is_integral(&self) -> bool {
        self.as_integer().is_some()
    }
}

/// Marker for fields where equality is exact.
pub trait ExactField: Field {}

impl Field for BigRational {
    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().to_i64()
        } else {
            None
        }
    }
}

impl ExactField for BigRational {}

impl Field for Ratio<i64> {
    fn as_integer(&self) -> Option<i64> {
        self.is_integer().then(|| *self.numer())
    }
}

impl ExactField for Ratio<i64> {}

impl Field for f64 {
    fn as_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && self.is_finite()).then(|| *self as i64)
    }
}

impl Field for f32 {
    fn as_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && self.is_finite()).then(|| *self as i64)
    }
}

/// Builds an exact rational `num / den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Integer power by repeated multiplication.
pub fn pow<F: Field>(base: &F, exp: u32) -> F {
    let mut acc = F::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}
