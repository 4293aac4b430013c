//! Exponential generating functions of the form `g(x) * exp(h(x))` with
//! rational `g`, `h`, and the first-order ODE they satisfy.
//!
//! For such an `F`, `F'/F = g'/g + h'` is rational. Writing it as `N/D` in
//! lowest terms gives `D * F' - N * F = 0`.

use std::fmt;

use thiserror::Error;

use crate::exprparse::{self, ParseError};
use crate::ratpoly::{clear_joint_content, fix_sign, ArithError, BigRat, Poly, RationalFunction};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EgfError {
    #[error("g must not be the zero function")]
    ZeroPrefactor,
    #[error("{0} has a pole at x = 0, so the series does not exist")]
    PoleAtZero(&'static str),
    #[error("h(0) = {0}, but exp(h) has rational coefficients only when h(0) = 0")]
    NonzeroExponentAtZero(String),
    #[error("ODE must have order at least 1 and a nonzero leading coefficient")]
    InvalidOde,
    #[error("only order-1 ODEs can be verified, got order {0}")]
    UnsupportedOrder(usize),
    #[error("series length must be at least 1")]
    EmptySeries,
    #[error("in {which}: {source}")]
    Parse {
        which: &'static str,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `F(x) = g(x) * exp(h(x))`, with `g != 0`, `g` and `h` regular at 0 and
/// `h(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpRationalEGF {
    g: RationalFunction,
    h: RationalFunction,
}

impl ExpRationalEGF {
    pub fn new(g: RationalFunction, h: RationalFunction) -> Result<Self, EgfError> {
        if g.is_zero() {
            return Err(EgfError::ZeroPrefactor);
        }
        if g.denom().coeff(0).is_zero() {
            return Err(EgfError::PoleAtZero("g"));
        }
        if h.denom().coeff(0).is_zero() {
            return Err(EgfError::PoleAtZero("h"));
        }
        let h0 = h.eval(&BigRat::zero())?;
        if !h0.is_zero() {
            return Err(EgfError::NonzeroExponentAtZero(h0.to_string()));
        }
        Ok(ExpRationalEGF { g, h })
    }

    /// Builds from two expressions in the `exprparse` grammar.
    pub fn parse(g: &str, h: &str) -> Result<Self, EgfError> {
        let g =
            exprparse::parse_ratexpr(g).map_err(|source| EgfError::Parse { which: "g", source })?;
        let h =
            exprparse::parse_ratexpr(h).map_err(|source| EgfError::Parse { which: "h", source })?;
        Self::new(g, h)
    }

    pub fn g(&self) -> &RationalFunction {
        &self.g
    }

    pub fn h(&self) -> &RationalFunction {
        &self.h
    }
}

impl fmt::Display for ExpRationalEGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * exp({})", self.g, self.h)
    }
}

/// `sum_j P_j(x) * F^(j)(x) = 0`, coefficients jointly integer with content
/// 1 and the lowest-order coefficient of `P_r` positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearODE {
    coeffs: Vec<Poly>,
}

impl LinearODE {
    pub fn new(mut coeffs: Vec<Poly>) -> Result<Self, EgfError> {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(EgfError::InvalidOde);
        }
        clear_joint_content(&mut coeffs);
        let top = coeffs.len() - 1;
        fix_sign(&mut coeffs, top);
        Ok(LinearODE { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `P_0 .. P_r`.
    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }
}

fn ode_multiplicand(p: &Poly) -> Option<String> {
    if p.is_one() {
        return None;
    }
    let s = p.to_string_ascending("x");
    Some(if p.coeffs().len() == 1 && !p.coeff(0).is_negative() {
        s
    } else {
        format!("({s})")
    })
}

impl fmt::Display for LinearODE {
    /// Order 1 prints as `P1 * F'(x) = Q * F(x)` with `Q = -P0`; higher
    /// orders as a sum equal to zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |p: &Poly, d: &str| match ode_multiplicand(p) {
            Some(m) => format!("{m} * {d}"),
            None => d.to_string(),
        };
        if self.order() == 1 {
            let rhs = -&self.coeffs[0];
            let rhs = if rhs.is_zero() {
                "0".to_string()
            } else {
                term(&rhs, "F(x)")
            };
            return write!(f, "{} = {}", term(&self.coeffs[1], "F'(x)"), rhs);
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| term(p, &format!("F^({j})(x)")))
            .collect();
        write!(f, "{} = 0", parts.join(" + "))
    }
}

/// `g'/g + h'`.
pub fn log_derivative(e: &ExpRationalEGF) -> RationalFunction {
    let g_log =
        e.g.derivative()
            .div(&e.g)
            .expect("g is nonzero by construction");
    g_log.add(&e.h.derivative())
}

/// The order-1 ODE `D * F' - N * F = 0` where `N/D = F'/F`.
pub fn derive_ode(e: &ExpRationalEGF) -> LinearODE {
    let lg = log_derivative(e);
    LinearODE::new(vec![-lg.numer(), lg.denom().clone()]).expect("denominator is nonzero")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OdeVerdict {
    Pass,
    /// `F'/F + P_0/P_1`, nonzero.
    Fail {
        residual: RationalFunction,
    },
}

impl OdeVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, OdeVerdict::Pass)
    }
}

impl fmt::Display for OdeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeVerdict::Pass => f.write_str("PASS"),
            OdeVerdict::Fail { residual } => write!(f, "FAIL (residual {residual})"),
        }
    }
}

/// Checks an order-1 ODE against `F = g * exp(h)` by exact substitution.
pub fn verify_ode(e: &ExpRationalEGF, ode: &LinearODE) -> Result<OdeVerdict, EgfError> {
    if ode.order() != 1 {
        return Err(EgfError::UnsupportedOrder(ode.order()));
    }
    let lead = RationalFunction::from_poly(ode.coeffs[1].clone());
    let tail = RationalFunction::from_poly(ode.coeffs[0].clone());
    let residual = log_derivative(e).add(&tail.div(&lead)?);
    Ok(if residual.is_zero() {
        OdeVerdict::Pass
    } else {
        OdeVerdict::Fail { residual }
    })
}

/// Maclaurin coefficients of `num/den`, `den(0) != 0`.
fn expand_quotient(f: &RationalFunction, len: usize) -> Vec<BigRat> {
    let den = f.denom();
    let inv_d0 = den.coeff(0).recip().expect("regular at zero");
    let mut out: Vec<BigRat> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = f.numer().coeff(n);
        for (k, d) in den.coeffs().iter().enumerate().skip(1).take(n) {
            acc = acc - d * &out[n - k];
        }
        out.push(acc * &inv_d0);
    }
    out
}

/// `exp(h)` from `E' = h' E`, `E(0) = 1`.
fn expand_exp(h: &[BigRat], len: usize) -> Vec<BigRat> {
    // h'(x) coefficients: (k+1) h_{k+1}
    let dh: Vec<BigRat> = (0..len)
        .map(|k| {
            h.get(k + 1)
                .map_or_else(BigRat::zero, |c| c * &BigRat::from_i64(k as i64 + 1))
        })
        .collect();
    let mut e = Vec::with_capacity(len);
    e.push(BigRat::one());
    for n in 0..len.saturating_sub(1) {
        let mut acc = BigRat::zero();
        for k in 0..=n {
            if !dh[k].is_zero() {
                acc = acc + &dh[k] * &e[n - k];
            }
        }
        e.push(acc * &BigRat::ratio(1, n as i64 + 1));
    }
    e
}

/// The first `len` Maclaurin coefficients `c_0 .. c_{len-1}` of `F`, so that
/// `a(n) = n! * c_n`.
pub fn series(e: &ExpRationalEGF, len: usize) -> Result<Vec<BigRat>, EgfError> {
    if len == 0 {
        return Err(EgfError::EmptySeries);
    }
    let g = expand_quotient(&e.g, len);
    let h = expand_quotient(&e.h, len);
    let ex = expand_exp(&h, len);
    Ok((0..len)
        .map(|n| {
            (0..=n)
                .filter(|&k| !g[k].is_zero())
                .fold(BigRat::zero(), |acc, k| acc + &g[k] * &ex[n - k])
        })
        .collect())
}
