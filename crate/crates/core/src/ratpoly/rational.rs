use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// Arbitrary-precision rational in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigRat(BigRational);

impl BigRat {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, ArithError> {
        if denom.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(BigRat(BigRational::new(numer, denom)))
    }

    pub fn from_integer(n: BigInt) -> Self {
        BigRat(BigRational::from_integer(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_integer(BigInt::from(n))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::new(BigInt::from(numer), BigInt::from(denom)).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        BigRat(BigRational::zero())
    }

    pub fn one() -> Self {
        BigRat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().clone())
    }

    pub fn abs(&self) -> Self {
        BigRat(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &BigRat) -> Result<BigRat, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(BigRat(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<BigRat, ArithError> {
        BigRat::one().checked_div(self)
    }

    pub fn pow(&self, exp: u32) -> BigRat {
        BigRat(num_traits::pow(self.0.clone(), exp as usize))
    }
}

/// The four field operations, for callers that select one at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rat_arith(a: &BigRat, b: &BigRat, op: RatOp) -> Result<BigRat, ArithError> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => a.checked_div(b)?,
    })
}

impl From<i64> for BigRat {
    fn from(n: i64) -> Self {
        BigRat::from_i64(n)
    }
}

impl From<BigInt> for BigRat {
    fn from(n: BigInt) -> Self {
        BigRat::from_integer(n)
    }
}

impl FromStr for BigRat {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Malformed(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => BigRat::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(BigRat::from_integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl fmt::Display for BigRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigRat> for &BigRat {
            type Output = BigRat;
            fn $method(self, rhs: &BigRat) -> BigRat {
                BigRat($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait for BigRat {
            type Output = BigRat;
            fn $method(self, rhs: BigRat) -> BigRat {
                BigRat($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&BigRat> for BigRat {
            type Output = BigRat;
            fn $method(self, rhs: &BigRat) -> BigRat {
                BigRat($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for BigRat {
    type Output = BigRat;
    fn neg(self) -> BigRat {
        BigRat(-self.0)
    }
}

impl Neg for &BigRat {
    type Output = BigRat;
    fn neg(self) -> BigRat {
        BigRat(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_sum_to_one() {
        let half = BigRat::ratio(1, 2);
        let sum = rat_arith(&half, &half, RatOp::Add).unwrap();
        assert_eq!(sum, BigRat::one());
        assert_eq!(sum.denom(), &BigInt::from(1));
    }

    #[test]
    fn product_of_negative_and_eighth() {
        let p = rat_arith(&BigRat::from_i64(-1), &BigRat::ratio(1, 8), RatOp::Mul).unwrap();
        assert_eq!(p, BigRat::ratio(-1, 8));
        assert_eq!(p.numer(), &BigInt::from(-1));
        assert_eq!(p.denom(), &BigInt::from(8));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            rat_arith(&BigRat::one(), &BigRat::zero(), RatOp::Div),
            Err(ArithError::DivisionByZero)
        );
        assert!(BigRat::new(BigInt::from(1), BigInt::from(0)).is_err());
    }

    #[test]
    fn canonical_sign_and_reduction() {
        let r = BigRat::new(BigInt::from(6), BigInt::from(-4)).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(BigRat::zero().denom(), &BigInt::from(1));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("-3/6".parse::<BigRat>().unwrap().to_string(), "-1/2");
        assert_eq!("12".parse::<BigRat>().unwrap().to_string(), "12");
        assert!("1/0".parse::<BigRat>().is_err());
        assert!("abc".parse::<BigRat>().is_err());
    }
}
