//! Exact verification of P-recursive integer sequences whose exponential
//! generating function has the shape `g(x) * exp(h(x))` with rational `g`, `h`.
//!
//! The pipeline runs EGF, then first-order linear ODE, then polynomial
//! recurrence, then integer terms. Each stage can be checked against a
//! closed-form oracle, a series expansion, or published b-file data.

pub mod egfmodel;
pub mod exprparse;
pub mod holorec;
pub mod oeisio;
pub mod oracles;
pub mod ratpoly;
pub mod verifyflow;

pub use egfmodel::{
    derive_ode, series, verify_ode, EgfError, ExpRationalEGF, LinearODE, OdeVerdict,
};
pub use exprparse::{format_ratexpr, parse_ratexpr, ParseError};
pub use holorec::{
    ode_to_recurrence, recurrence_residual, run_recurrence, shift_recurrence, to_backward_form,
    PRecurrence, RecurrenceError, SequenceTerms,
};
pub use oeisio::{fetch_bfile, BFile, BFileSource, BFileStore, FetchError, FetchPolicy};
pub use oracles::{registry_get, ClosedForm, Registry, Seeds, SequenceDescriptor};
pub use ratpoly::{ArithError, BigRat, Poly, RationalFunction};
pub use verifyflow::{run_derivation, run_verification, Source, StepStatus, VerificationReport};
