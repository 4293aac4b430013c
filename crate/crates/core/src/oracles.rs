//! Closed-form term generators that share no code with the recurrence
//! machinery, and the registry of known sequences.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::egfmodel::{EgfError, ExpRationalEGF};
use crate::exprparse::{self, ParseError};
use crate::holorec::{PRecurrence, RecurrenceError, SequenceTerms};
use crate::ratpoly::BigRat;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("internal invariant violated: closed form is not an integer at n = {n}")]
    NonInteger { n: u64 },
    #[error("unknown sequence '{id}'; registered: {}", known.join(", "))]
    UnknownId { id: String, known: Vec<String> },
    #[error("sequence {0} is registered twice")]
    Duplicate(String),
    #[error("descriptor {id}: {reason}")]
    InvalidDescriptor { id: String, reason: String },
    #[error("registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry file: {0}")]
    Toml(#[from] toml::de::Error),
}

/// Numerators of `L_m(p/q)` over the common denominator `m! q^m`.
///
/// From `(m+1) L_{m+1} = (2m+1-x) L_m - m L_{m-1}`, the numerators obey
/// `N_{m+1} = ((2m+1) q - p) N_m - m^2 q^2 N_{m-1}` with `N_0 = 1`,
/// `N_1 = q - p`, all in integers.
#[derive(Clone, Debug)]
pub struct ScaledLaguerre {
    p: BigInt,
    q: BigInt,
    m: u64,
    prev: BigInt,
    cur: BigInt,
}

impl ScaledLaguerre {
    pub fn new(x0: &BigRat) -> Self {
        ScaledLaguerre {
            p: x0.numer().clone(),
            q: x0.denom().clone(),
            m: 0,
            prev: BigInt::zero(),
            cur: BigInt::one(),
        }
    }

    /// `(m, N_m)`; the denominator is `m! q^m`.
    pub fn current(&self) -> (u64, &BigInt) {
        (self.m, &self.cur)
    }

    pub fn advance(&mut self) {
        let m = BigInt::from(self.m);
        let next = if self.m == 0 {
            &self.q - &self.p
        } else {
            (BigInt::from(2 * self.m + 1) * &self.q - &self.p) * &self.cur
                - &m * &m * &self.q * &self.q * &self.prev
        };
        self.prev = std::mem::replace(&mut self.cur, next);
        self.m += 1;
    }

    pub fn advance_to(&mut self, n: u64) {
        while self.m < n {
            self.advance();
        }
    }
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `L_n(x0)` exactly.
pub fn laguerre_eval(n: u64, x0: &BigRat) -> BigRat {
    let mut it = ScaledLaguerre::new(x0);
    it.advance_to(n);
    let den = factorial(n) * num_traits::pow(x0.denom().clone(), n as usize);
    BigRat::new(it.current().1.clone(), den).expect("denominator is positive")
}

/// `-n! 2^n L_n(1/2)` from the numerator of `L_n(1/2)` over `n! q^n`,
/// asserting the quotient is exact.
fn a025166_from_numerator(
    n: u64,
    numer: &BigInt,
    n_factorial: &BigInt,
) -> Result<BigInt, OracleError> {
    let x0 = half();
    let multiplier = n_factorial << n as usize;
    let denom = n_factorial * num_traits::pow(x0.denom().clone(), n as usize);
    let (value, rem) = (-(multiplier * numer)).div_rem(&denom);
    if !rem.is_zero() {
        return Err(OracleError::NonInteger { n });
    }
    Ok(value)
}

fn half() -> BigRat {
    BigRat::ratio(1, 2)
}

/// A025166: `a(n) = -n! 2^n L_n(1/2)`.
pub fn a025166_term(n: u64) -> Result<BigInt, OracleError> {
    let mut it = ScaledLaguerre::new(&half());
    it.advance_to(n);
    a025166_from_numerator(n, it.current().1, &factorial(n))
}

/// A025166 for `n` in `first..=last`, in one Laguerre pass.
pub fn a025166_terms(first: u64, last: u64) -> Result<SequenceTerms, OracleError> {
    let mut it = ScaledLaguerre::new(&half());
    let mut fact = BigInt::one();
    let mut out = SequenceTerms::new(first as i64, Vec::new());
    for n in 0..=last {
        if n > 0 {
            it.advance();
            fact *= n;
        }
        if n >= first {
            out.push(a025166_from_numerator(n, it.current().1, &fact)?);
        }
    }
    Ok(out)
}

/// Tag for a closed-form generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `-n! 2^n L_n(1/2)`.
    Laguerre,
}

impl ClosedForm {
    pub fn tag(&self) -> &'static str {
        match self {
            ClosedForm::Laguerre => "laguerre",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        (tag == "laguerre").then_some(ClosedForm::Laguerre)
    }

    pub fn term(&self, n: u64) -> Result<BigInt, OracleError> {
        match self {
            ClosedForm::Laguerre => a025166_term(n),
        }
    }

    pub fn terms(&self, first: u64, last: u64) -> Result<SequenceTerms, OracleError> {
        match self {
            ClosedForm::Laguerre => a025166_terms(first, last),
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seeds {
    Given(SequenceTerms),
    /// The first `valid_from - offset` terms of the b-file.
    FromBFile,
}

#[derive(Clone, Debug)]
pub struct SequenceDescriptor {
    pub id: String,
    pub egf: Option<ExpRationalEGF>,
    pub recurrence: Option<PRecurrence>,
    /// Paper-style renderings of individual recurrence coefficients.
    pub factored: Vec<Option<String>>,
    pub seeds: Seeds,
    pub checkpoints: Vec<u64>,
    pub oracle: Option<ClosedForm>,
    pub notes: Vec<String>,
}

impl SequenceDescriptor {
    pub fn validate(&self) -> Result<(), OracleError> {
        let invalid = |reason: &str| OracleError::InvalidDescriptor {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.egf.is_none() && self.recurrence.is_none() && self.oracle.is_none() {
            return Err(invalid("needs at least one of egf, recurrence, oracle"));
        }
        if let (Some(rec), Seeds::Given(seeds)) = (&self.recurrence, &self.seeds) {
            let window_end = rec.valid_from() - 1;
            if seeds.offset() != rec.offset()
                || seeds.last_index().unwrap_or(rec.offset() - 1) < window_end
            {
                return Err(invalid("seeds do not cover the recurrence seed window"));
            }
        }
        Ok(())
    }
}

fn poly_n(text: &str) -> crate::ratpoly::Poly {
    exprparse::parse_poly_in(text, 'n').expect("builtin polynomial")
}

fn a025166() -> SequenceDescriptor {
    SequenceDescriptor {
        id: "A025166".into(),
        egf: Some(ExpRationalEGF::parse("-1/(1-2*x)", "-x/(1-2*x)").expect("builtin EGF")),
        recurrence: Some(
            PRecurrence::new(
                vec![poly_n("1"), poly_n("-4*n+3"), poly_n("4*(n-1)^2")],
                2,
                0,
            )
            .expect("builtin recurrence"),
        ),
        factored: vec![None, None, Some("4*(n-1)^2".into())],
        seeds: Seeds::Given(SequenceTerms::from_i64s(0, &[-1, -1])),
        checkpoints: vec![200, 400, 1000, 2000, 5000],
        oracle: Some(ClosedForm::Laguerre),
        notes: vec![],
    }
}

fn a025163() -> SequenceDescriptor {
    SequenceDescriptor {
        id: "A025163".into(),
        egf: None,
        recurrence: Some(
            PRecurrence::new(
                vec![poly_n("-n+1"), poly_n("2*(2*n-1)"), poly_n("-8*n")],
                2,
                0,
            )
            .expect("builtin recurrence"),
        ),
        factored: vec![None, Some("2*(2*n-1)".into()), None],
        seeds: Seeds::FromBFile,
        checkpoints: vec![],
        oracle: None,
        notes: vec![
            "valid_from = 2 is inferred from q_0 = -n+1 vanishing at n = 1".into(),
            "seeds and reference terms come from the b-file".into(),
        ],
    }
}

/// Known sequences: the builtin table plus any loaded extensions.
#[derive(Clone, Debug)]
pub struct Registry {
    entries: Vec<SequenceDescriptor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionFile {
    #[serde(default)]
    sequence: Vec<ExtensionEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionEntry {
    id: String,
    g: Option<String>,
    h: Option<String>,
    /// `q_0 .. q_s` as polynomials in `n`, backward form.
    recurrence: Option<Vec<String>>,
    valid_from: Option<i64>,
    #[serde(default)]
    offset: i64,
    /// Integers as strings, starting at `offset`; omitted means "from b-file".
    seeds: Option<Vec<String>>,
    #[serde(default)]
    checkpoints: Vec<u64>,
    oracle: Option<String>,
}

impl ExtensionEntry {
    fn into_descriptor(self) -> Result<SequenceDescriptor, OracleError> {
        let id = self.id;
        let invalid = |reason: String| OracleError::InvalidDescriptor {
            id: id.clone(),
            reason,
        };
        let egf = match (self.g, self.h) {
            (Some(g), Some(h)) => {
                Some(ExpRationalEGF::parse(&g, &h).map_err(|e: EgfError| invalid(e.to_string()))?)
            }
            (None, None) => None,
            _ => return Err(invalid("g and h must be given together".into())),
        };
        let recurrence = match self.recurrence {
            Some(qs) => {
                let coeffs = qs
                    .iter()
                    .map(|q| exprparse::parse_poly_in(q, 'n'))
                    .collect::<Result<Vec<_>, ParseError>>()
                    .map_err(|e| invalid(e.to_string()))?;
                let valid_from = self
                    .valid_from
                    .unwrap_or(self.offset + coeffs.len() as i64 - 1);
                Some(
                    PRecurrence::new(coeffs, valid_from, self.offset)
                        .map_err(|e: RecurrenceError| invalid(e.to_string()))?,
                )
            }
            None => None,
        };
        let seeds = match self.seeds {
            Some(values) => Seeds::Given(SequenceTerms::new(
                self.offset,
                values
                    .iter()
                    .map(|v| v.trim().parse::<BigInt>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| invalid(format!("seed: {e}")))?,
            )),
            None => Seeds::FromBFile,
        };
        let oracle = match self.oracle {
            Some(tag) => Some(
                ClosedForm::from_tag(&tag)
                    .ok_or_else(|| invalid(format!("unknown oracle '{tag}'")))?,
            ),
            None => None,
        };
        let descriptor = SequenceDescriptor {
            factored: Vec::new(),
            id,
            egf,
            recurrence,
            seeds,
            checkpoints: self.checkpoints,
            oracle,
            notes: vec!["loaded from registry extension file".into()],
        };
        descriptor.validate()?;
        Ok(descriptor)
    }
}

impl Registry {
    pub fn builtin() -> Self {
        Registry {
            entries: vec![a025163(), a025166()],
        }
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|d| d.id.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Result<&SequenceDescriptor, OracleError> {
        self.entries
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| OracleError::UnknownId {
                id: id.to_string(),
                known: self.ids(),
            })
    }

    pub fn insert(&mut self, descriptor: SequenceDescriptor) -> Result<(), OracleError> {
        if self.entries.iter().any(|d| d.id == descriptor.id) {
            return Err(OracleError::Duplicate(descriptor.id));
        }
        descriptor.validate()?;
        self.entries.push(descriptor);
        Ok(())
    }

    /// Adds the `[[sequence]]` tables of a TOML extension file.
    pub fn extend_from_toml(&mut self, text: &str) -> Result<(), OracleError> {
        let file: ExtensionFile = toml::from_str(text)?;
        for entry in file.sequence {
            self.insert(entry.into_descriptor()?)?;
        }
        Ok(())
    }

    pub fn extend_from_file(&mut self, path: &Path) -> Result<(), OracleError> {
        self.extend_from_toml(&std::fs::read_to_string(path)?)
    }
}

/// Looks `id` up in the builtin registry.
pub fn registry_get(id: &str) -> Result<SequenceDescriptor, OracleError> {
    Registry::builtin().get(id).cloned()
}
