//! Double-double scalar.
//!
//! Thin wrapper around [`TwoFloat`] whose division is replaced by long
//! division; the upstream quotient loses the low word when `1 - b * (1/b)`
//! rounds to zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Num, One, Signed, Zero};
use twofloat::TwoFloat;

/// About 106 bits of significand, built from a pair of `f64`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn hi(&self) -> f64 {
        self.0.hi()
    }

    pub fn lo(&self) -> f64 {
        self.0.lo()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.hi() + self.0.lo()
    }

    pub fn abs(&self) -> Self {
        DoubleDouble(self.0.abs())
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble(TwoFloat::from(x))
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        DoubleDouble(self.0 + rhs.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        DoubleDouble(self.0 - rhs.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        DoubleDouble(self.0 * rhs.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b = rhs.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        if !(q1.is_finite() && q2.is_finite() && q3.is_finite()) {
            return DoubleDouble(TwoFloat::from(q1));
        }
        DoubleDouble(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = DoubleDouble((self / rhs).0.trunc());
        self - q * rhs
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble(TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble(TwoFloat::from(1.0))
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::from)
    }
}

impl Signed for DoubleDouble {
    fn abs(&self) -> Self {
        DoubleDouble::abs(self)
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if *self <= *other {
            Self::zero()
        } else {
            *self - *other
        }
    }
    fn signum(&self) -> Self {
        if self.0.hi() > 0.0 {
            Self::one()
        } else if self.0.hi() < 0.0 {
            -Self::one()
        } else {
            Self::zero()
        }
    }
    fn is_positive(&self) -> bool {
        self.0.hi() > 0.0
    }
    fn is_negative(&self) -> bool {
        self.0.hi() < 0.0
    }
}
