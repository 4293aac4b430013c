//! Exact arithmetic: rationals, dense polynomials over Q, and reduced
//! rational functions.

mod poly;
mod ratfun;
mod rational;

pub(crate) use poly::{clear_joint_content, fix_sign};
pub use poly::{poly_arith, poly_gcd, Poly, PolyOp};
pub use ratfun::{ratfun_arith, ratfun_derivative, ratfun_eval, RatFunOp, RationalFunction};
pub use rational::{rat_arith, BigRat, RatOp};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator in rational function")]
    ZeroDenominator,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("pole at x = {0}")]
    Pole(String),
    #[error("malformed rational literal '{0}'")]
    Malformed(String),
}
