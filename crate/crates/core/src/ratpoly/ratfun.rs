use std::fmt;

use super::poly::{clear_joint_content, fix_sign};
use super::{poly_gcd, ArithError, BigRat, Poly};

/// Reduced quotient of polynomials.
///
/// Canonical form: numerator and denominator are coprime, jointly scaled to
/// integer coefficients with gcd 1, and the denominator's lowest-order
/// coefficient is positive. Zero is `0/1`. Structural equality is therefore
/// mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatFunOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = poly_gcd(&num, &den)?;
        let (num, _) = num.div_rem(&g)?;
        let (den, _) = den.div_rem(&g)?;
        let mut parts = [num, den];
        clear_joint_content(&mut parts);
        fix_sign(&mut parts, 1);
        let [num, den] = parts;
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::new(p, Poly::one()).expect("denominator is one")
    }

    pub fn constant(c: BigRat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial this function equals, if its denominator is constant.
    pub fn to_poly(&self) -> Option<Poly> {
        let c = self.den.coeff(0);
        self.is_polynomial()
            .then(|| self.num.scale(&c.recip().expect("nonzero denominator")))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("product of nonzero denominators")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of nonzero denominators")
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self::new(self.num.pow(exp), self.den.pow(exp)).expect("nonzero denominator")
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    /// Quotient rule.
    pub fn derivative(&self) -> Self {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(top, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn eval(&self, x0: &BigRat) -> Result<BigRat, ArithError> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            return Err(ArithError::Pole(x0.to_string()));
        }
        self.num.eval(x0).checked_div(&d)
    }
}

pub fn ratfun_arith(
    f: &RationalFunction,
    g: &RationalFunction,
    op: RatFunOp,
) -> Result<RationalFunction, ArithError> {
    Ok(match op {
        RatFunOp::Add => f.add(g),
        RatFunOp::Sub => f.sub(g),
        RatFunOp::Mul => f.mul(g),
        RatFunOp::Div => f.div(g)?,
    })
}

pub fn ratfun_derivative(f: &RationalFunction) -> RationalFunction {
    f.derivative()
}

pub fn ratfun_eval(f: &RationalFunction, x0: &BigRat) -> Result<BigRat, ArithError> {
    f.eval(x0)
}

impl fmt::Display for RationalFunction {
    /// `numerator/(denominator)`, or the bare numerator when the denominator
    /// is 1. Powers ascend.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            f.write_str(&self.num.to_string_ascending("x"))
        } else {
            write!(
                f,
                "({})/({})",
                self.num.to_string_ascending("x"),
                self.den.to_string_ascending("x")
            )
        }
    }
}
