//! P-recursive recurrences: extraction from an EGF's ODE, reindexing, and
//! exact forward evaluation.
//!
//! A recurrence is stored as `sum_{t=0..s} q_t(n) * a(n + lead - t) = 0` for
//! `n >= valid_from`. backward form is `lead = 0`: the highest term is `a(n)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::egfmodel::LinearODE;
use crate::ratpoly::{clear_joint_content, fix_sign, BigRat, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RecurrenceError {
    #[error("recurrence needs nonzero first and last coefficients")]
    Degenerate,
    #[error("recurrence coefficients must be integer polynomials")]
    NonIntegerCoefficients,
    #[error("singular leading coefficient at n = {n}")]
    SingularLeading { n: i64 },
    #[error("recurrence does not generate integers at n = {n}")]
    NonIntegral { n: i64 },
    #[error("seeds must start at the recurrence offset {expected}, got {found}")]
    OffsetMismatch { expected: i64, found: i64 },
    #[error("seeds must cover indices {from}..={to}")]
    MissingSeeds { from: i64, to: i64 },
    #[error("target index {target} is below valid_from = {valid_from}")]
    TargetBelowValidFrom { target: i64, valid_from: i64 },
    #[error("term a({index}) is not available")]
    MissingTerm { index: i64 },
}

/// Contiguous run of sequence terms `a(offset), a(offset + 1), ...`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SequenceTerms {
    offset: i64,
    terms: Vec<BigInt>,
}

impl SequenceTerms {
    pub fn new(offset: i64, terms: Vec<BigInt>) -> Self {
        SequenceTerms { offset, terms }
    }

    pub fn from_i64s(offset: i64, terms: &[i64]) -> Self {
        Self::new(offset, terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Last index present, if any.
    pub fn last_index(&self) -> Option<i64> {
        (!self.terms.is_empty()).then(|| self.offset + self.terms.len() as i64 - 1)
    }

    pub fn get(&self, n: i64) -> Option<&BigInt> {
        usize::try_from(n - self.offset)
            .ok()
            .and_then(|i| self.terms.get(i))
    }

    pub fn get_mut(&mut self, n: i64) -> Option<&mut BigInt> {
        usize::try_from(n - self.offset)
            .ok()
            .and_then(|i| self.terms.get_mut(i))
    }

    pub fn push(&mut self, value: BigInt) {
        self.terms.push(value);
    }

    /// Terms with index `<= last`.
    pub fn truncated(&self, last: i64) -> SequenceTerms {
        let keep = usize::try_from(last - self.offset + 1).unwrap_or(0);
        SequenceTerms::new(self.offset, self.terms.iter().take(keep).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        (self.offset..).zip(self.terms.iter())
    }
}

/// Linear recurrence with polynomial-in-`n` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PRecurrence {
    coeffs: Vec<Poly>,
    lead: i64,
    valid_from: i64,
    offset: i64,
}

impl PRecurrence {
    /// A backward-form recurrence `sum_t q_t(n) a(n - t) = 0`, `n >= valid_from`.
    pub fn new(coeffs: Vec<Poly>, valid_from: i64, offset: i64) -> Result<Self, RecurrenceError> {
        Self::with_lead(coeffs, 0, valid_from, offset)
    }

    pub fn with_lead(
        coeffs: Vec<Poly>,
        lead: i64,
        valid_from: i64,
        offset: i64,
    ) -> Result<Self, RecurrenceError> {
        if coeffs.first().is_none_or(Poly::is_zero) || coeffs.last().is_none_or(Poly::is_zero) {
            return Err(RecurrenceError::Degenerate);
        }
        if !coeffs.iter().all(Poly::has_integer_coeffs) {
            return Err(RecurrenceError::NonIntegerCoefficients);
        }
        Ok(PRecurrence {
            coeffs,
            lead,
            valid_from,
            offset,
        })
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn valid_from(&self) -> i64 {
        self.valid_from
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Asserts the relation from a different starting index, e.g. to probe
    /// below the conservative bound.
    pub fn with_valid_from(&self, valid_from: i64) -> Self {
        PRecurrence {
            valid_from,
            ..self.clone()
        }
    }

    /// Replaces one coefficient, keeping everything else.
    pub fn with_coeff(&self, t: usize, q: Poly) -> Result<Self, RecurrenceError> {
        let mut coeffs = self.coeffs.clone();
        coeffs[t] = q;
        Self::with_lead(coeffs, self.lead, self.valid_from, self.offset)
    }

    pub fn is_normalized(&self) -> bool {
        normalize_recurrence(self) == *self
    }

    /// Renders with `factored[t]` in place of the expanded `q_t` where given.
    pub fn render_with(&self, factored: &[Option<String>]) -> String {
        let mut out = String::new();
        for (t, q) in self.coeffs.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let term = index_expr(self.lead - t as i64);
            let first = out.is_empty();
            match factored.get(t).and_then(Option::as_ref) {
                Some(text) => {
                    out.push_str(if first { "" } else { " + " });
                    out.push_str(&format!("{text}*{term}"));
                }
                None if q.is_constant() => {
                    let c = q.coeff(0);
                    let magnitude = c.abs();
                    out.push_str(match (first, c.is_negative()) {
                        (true, false) => "",
                        (true, true) => "-",
                        (false, false) => " + ",
                        (false, true) => " - ",
                    });
                    if !magnitude.is_one() {
                        out.push_str(&format!("{magnitude}*"));
                    }
                    out.push_str(&term);
                }
                None => {
                    out.push_str(if first { "" } else { " + " });
                    out.push_str(&format!("({})*{term}", q.to_string_descending("n")));
                }
            }
        }
        format!("{out} = 0 for n >= {}", self.valid_from)
    }
}

fn index_expr(shift: i64) -> String {
    match shift {
        0 => "a(n)".to_string(),
        s if s > 0 => format!("a(n+{s})"),
        s => format!("a(n-{})", -s),
    }
}

impl fmt::Display for PRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&[]))
    }
}

/// `n (n-1) ... (n-k+1)` as a polynomial in `n`.
pub fn falling_factorial_poly(k: usize) -> Poly {
    (0..k).fold(Poly::one(), |acc, i| {
        &acc * &Poly::from_coeffs(vec![BigRat::from_i64(-(i as i64)), BigRat::one()])
    })
}

/// `n (n-1) ... (n-k+1)` at an integer.
pub fn falling_factorial(n: &BigInt, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - BigInt::from(i)))
}

/// Reads off `[x^n/n!]` of the ODE: each monomial `c x^k` of `P_j`
/// contributes `c * n^(k falling) * a(n + j - k)`, with `a(m) = 0` for
/// `m < 0`. The result is indexed so its highest term is `a(n + lead)`, in
/// the original extraction variable; its `valid_from` is the least `n >= 0`
/// whose every referenced index is nonnegative.
pub fn ode_to_recurrence(ode: &LinearODE) -> Result<PRecurrence, RecurrenceError> {
    let mut by_shift: BTreeMap<i64, Poly> = BTreeMap::new();
    for (j, p) in ode.coeffs().iter().enumerate() {
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let shift = j as i64 - k as i64;
            let contribution = falling_factorial_poly(k).scale(c);
            let slot = by_shift.entry(shift).or_insert_with(Poly::zero);
            *slot = &*slot + &contribution;
        }
    }
    by_shift.retain(|_, q| !q.is_zero());
    let (&low, _) = by_shift
        .first_key_value()
        .ok_or(RecurrenceError::Degenerate)?;
    let (&high, _) = by_shift
        .last_key_value()
        .ok_or(RecurrenceError::Degenerate)?;
    let coeffs: Vec<Poly> = (low..=high)
        .rev()
        .map(|s| by_shift.remove(&s).unwrap_or_else(Poly::zero))
        .collect();
    let valid_from = (-low).max(0);
    let rec = PRecurrence::with_lead(integerize(coeffs), high, valid_from, 0)?;
    Ok(normalize_recurrence(&rec))
}

fn integerize(mut coeffs: Vec<Poly>) -> Vec<Poly> {
    clear_joint_content(&mut coeffs);
    coeffs
}

/// Substitutes `n <- n + delta`: the same relation, indexed `delta` lower.
pub fn shift_recurrence(rec: &PRecurrence, delta: i64) -> PRecurrence {
    if delta == 0 {
        return rec.clone();
    }
    let d = BigRat::from_i64(delta);
    let shifted = PRecurrence {
        coeffs: rec.coeffs.iter().map(|q| q.taylor_shift(&d)).collect(),
        lead: rec.lead + delta,
        valid_from: rec.valid_from - delta,
        offset: rec.offset,
    };
    normalize_recurrence(&shifted)
}

/// Divides out the joint integer content and makes the lowest-order
/// coefficient of `q_0` positive.
pub fn normalize_recurrence(rec: &PRecurrence) -> PRecurrence {
    let mut coeffs = rec.coeffs.clone();
    clear_joint_content(&mut coeffs);
    fix_sign(&mut coeffs, 0);
    PRecurrence {
        coeffs,
        ..rec.clone()
    }
}

/// Reindexes so the highest term is `a(n)`, then normalizes.
pub fn to_backward_form(rec: &PRecurrence) -> PRecurrence {
    normalize_recurrence(&shift_recurrence(rec, -rec.lead))
}

fn integer_coeffs(rec: &PRecurrence) -> Vec<Vec<BigInt>> {
    rec.coeffs
        .iter()
        .map(|q| q.coeffs().iter().map(|c| c.numer().clone()).collect())
        .collect()
}

fn horner(q: &[BigInt], n: &BigInt) -> BigInt {
    q.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + c)
}

/// Extends `seeds` to index `last` by solving for the highest term at each
/// `n >= valid_from`. Every division must be exact.
pub fn run_recurrence(
    rec: &PRecurrence,
    seeds: &SequenceTerms,
    last: i64,
) -> Result<SequenceTerms, RecurrenceError> {
    let rec = to_backward_form(rec);
    if seeds.offset() != rec.offset {
        return Err(RecurrenceError::OffsetMismatch {
            expected: rec.offset,
            found: seeds.offset(),
        });
    }
    if last < rec.valid_from {
        return Err(RecurrenceError::TargetBelowValidFrom {
            target: last,
            valid_from: rec.valid_from,
        });
    }
    let start = rec.valid_from.max(rec.offset);
    let seed_end = start - 1;
    if seeds.last_index().unwrap_or(rec.offset - 1) < seed_end {
        return Err(RecurrenceError::MissingSeeds {
            from: rec.offset,
            to: seed_end,
        });
    }
    let q = integer_coeffs(&rec);
    let mut out = seeds.truncated(seed_end);
    out.terms.reserve((last - seed_end).max(0) as usize);
    let zero = BigInt::zero();
    for n in start..=last {
        let nb = BigInt::from(n);
        let lead = horner(&q[0], &nb);
        if lead.is_zero() {
            return Err(RecurrenceError::SingularLeading { n });
        }
        let mut acc = BigInt::zero();
        for (t, qt) in q.iter().enumerate().skip(1) {
            let term = out.get(n - t as i64).unwrap_or(&zero);
            if !term.is_zero() && !qt.is_empty() {
                acc += horner(qt, &nb) * term;
            }
        }
        let (value, rem) = (-acc).div_rem(&lead);
        if !rem.is_zero() {
            return Err(RecurrenceError::NonIntegral { n });
        }
        out.push(value);
    }
    Ok(out)
}

/// `sum_t q_t(n) * a(n + lead - t)`, exactly.
pub fn recurrence_residual(
    rec: &PRecurrence,
    terms: &SequenceTerms,
    n: i64,
) -> Result<BigInt, RecurrenceError> {
    let nb = BigInt::from(n);
    let mut acc = BigInt::zero();
    for (t, q) in rec.coeffs.iter().enumerate() {
        let index = n + rec.lead - t as i64;
        let term = terms
            .get(index)
            .ok_or(RecurrenceError::MissingTerm { index })?;
        acc += q.eval_integer(&nb).expect("integer coefficients") * term;
    }
    Ok(acc)
}
