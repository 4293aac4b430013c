use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ArithError, BigRat};

/// Dense univariate polynomial over the rationals, constant term first.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector and has no degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(BigRat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigRat::from_i64(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::from_coeffs(coeffs.iter().cloned().map(BigRat::from_integer).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: BigRat, k: usize) -> Self {
        let mut coeffs = vec![BigRat::zero(); k];
        coeffs.push(c);
        Self::from_coeffs(coeffs)
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Self::monomial(BigRat::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> BigRat {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigRat> {
        self.coeffs.last()
    }

    /// Coefficient of the lowest power with a nonzero coefficient. This is the
    /// first term in ascending-order rendering and fixes canonical signs.
    pub fn lowest_coeff(&self) -> Option<&BigRat> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(BigRat::is_integer)
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &BigRat::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x0: &BigRat) -> BigRat {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRat::zero(), |acc, c| acc * x0 + c)
    }

    /// Evaluates at an integer point. Requires integer coefficients.
    pub fn eval_integer(&self, x0: &BigInt) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x0 + c.to_integer()?;
        }
        Some(acc)
    }

    /// `p(x + delta)`, by Horner's scheme on the shifted indeterminate.
    pub fn taylor_shift(&self, delta: &BigRat) -> Poly {
        let linear = Poly::from_coeffs(vec![delta.clone(), BigRat::one()]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * &linear) + &Poly::constant(c.clone())
        })
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Euclidean division over the rationals.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), ArithError> {
        let lead = divisor.leading_coeff().ok_or(ArithError::DivisionByZero)?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![BigRat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].checked_div(lead)?;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = &rem[k + i] - &(&c * d);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// `(s, q)` with `self = s * q`, `q` integer with content 1 and `s`
    /// positive. Zero yields `(1, 0)`.
    pub fn primitive_part(&self) -> (BigRat, Vec<BigInt>) {
        let mut parts = [self.clone()];
        let s = clear_joint_content(&mut parts);
        let [p] = parts;
        let ints = p.coeffs.iter().map(|c| c.numer().clone()).collect();
        (s.recip().unwrap_or_else(|_| BigRat::one()), ints)
    }

    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            Some(lc) => self.scale(&lc.recip().expect("leading coefficient is nonzero")),
            None => Poly::zero(),
        }
    }

    /// Ascending-power rendering, e.g. `1 - 4*x + 4*x^2`.
    pub fn to_string_ascending(&self, var: &str) -> String {
        render_terms(self.coeffs.iter().enumerate(), var)
    }

    /// Descending-power rendering, e.g. `4*n^2 - 8*n + 4`.
    pub fn to_string_descending(&self, var: &str) -> String {
        render_terms(self.coeffs.iter().enumerate().rev(), var)
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (usize, &'a BigRat)>, var: &str) -> String {
    let mut out = String::new();
    for (power, c) in terms.filter(|(_, c)| !c.is_zero()) {
        let negative = c.is_negative();
        let magnitude = c.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let monomial = match power {
            0 => None,
            1 => Some(var.to_string()),
            k => Some(format!("{var}^{k}")),
        };
        match monomial {
            None => out.push_str(&magnitude.to_string()),
            Some(m) if magnitude.is_one() => out.push_str(&m),
            Some(m) => out.push_str(&format!("{magnitude}*{m}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_ascending("x"))
    }
}

/// Scales every polynomial by one common positive rational so that together
/// they have integer coefficients with gcd 1. Returns the factor applied.
pub(crate) fn clear_joint_content(polys: &mut [Poly]) -> BigRat {
    let mut lcm = BigInt::one();
    let mut gcd = BigInt::zero();
    for c in polys.iter().flat_map(|p| p.coeffs.iter()) {
        lcm = lcm.lcm(c.denom());
    }
    for c in polys.iter().flat_map(|p| p.coeffs.iter()) {
        gcd = gcd.gcd(&(c.numer() * (&lcm / c.denom())));
    }
    if gcd.is_zero() {
        return BigRat::one();
    }
    let factor = BigRat::new(lcm, gcd).expect("gcd is nonzero");
    if !factor.is_one() {
        for p in polys.iter_mut() {
            *p = p.scale(&factor);
        }
    }
    factor
}

/// Negates all polynomials if `lead`'s lowest-order coefficient is negative.
pub(crate) fn fix_sign(polys: &mut [Poly], lead: usize) {
    if polys[lead].lowest_coeff().is_some_and(BigRat::is_negative) {
        for p in polys.iter_mut() {
            *p = -&*p;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(p: &Poly, q: &Poly, op: PolyOp) -> Poly {
    match op {
        PolyOp::Add => p + q,
        PolyOp::Sub => p - q,
        PolyOp::Mul => p * q,
    }
}

fn int_pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while rem.len() > db && !rem.is_empty() {
        let shift = rem.len() - 1 - db;
        let top = rem.pop().expect("nonempty");
        for r in rem.iter_mut() {
            *r *= lead;
        }
        for (i, bc) in b[..db].iter().enumerate() {
            rem[shift + i] -= &top * bc;
        }
        while rem.last().is_some_and(Zero::is_zero) {
            rem.pop();
        }
    }
    rem
}

fn int_primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|c| c / &g).collect()
    }
}

/// Monic greatest common divisor, via the primitive pseudo-remainder sequence
/// over the integers.
pub fn poly_gcd(p: &Poly, q: &Poly) -> Result<Poly, ArithError> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return Err(ArithError::GcdOfZeros),
        (false, true) => return Ok(p.monic()),
        (true, false) => return Ok(q.monic()),
        _ => {}
    }
    let (_, mut a) = p.primitive_part();
    let (_, mut b) = q.primitive_part();
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = int_primitive(int_pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    Ok(Poly::from_bigints(&a).monic())
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                $trait::$method(&self, &rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
