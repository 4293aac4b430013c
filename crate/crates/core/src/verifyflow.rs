//! Staged runs of the derivation pipeline and of the term-level checks, with
//! reports in text and JSON.
//!
//! Everything here is exact integer or rational arithmetic. A step passes
//! only if every compared value is identical and every residual is zero.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::egfmodel::{self, LinearODE};
use crate::holorec::{self, PRecurrence, SequenceTerms};
use crate::oeisio::{BFile, BFileStore, FetchError, FetchPolicy};
use crate::oracles::{OracleError, Registry, Seeds, SequenceDescriptor};
use crate::ratpoly::BigRat;

/// Upper index of the oracle and series prefix comparisons.
pub const PREFIX_LIMIT: i64 = 100;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Registry(#[from] OracleError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{id} has no recurrence to run")]
    NoRecurrence { id: String },
    #[error("--terms {requested} is below the recurrence's valid_from = {valid_from}")]
    TooFewTerms { requested: i64, valid_from: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum StepStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for StepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepStatus::Pass => "PASS",
            StepStatus::Fail => "FAIL",
            StepStatus::Skipped => "SKIPPED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub name: String,
    pub status: StepStatus,
    pub details: String,
    pub failed_index: Option<i64>,
    pub elapsed_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub sequence_id: String,
    pub overall: StepStatus,
    pub steps: Vec<StepRecord>,
}

impl VerificationReport {
    fn new(id: &str) -> Self {
        VerificationReport {
            sequence_id: id.to_string(),
            overall: StepStatus::Pass,
            steps: Vec::new(),
        }
    }

    fn record(&mut self, name: &str, started: Instant, outcome: Outcome) {
        let (status, details, failed_index) = match outcome {
            Outcome::Pass(d) => (StepStatus::Pass, d, None),
            Outcome::Fail(d, i) => (StepStatus::Fail, d, i),
            Outcome::Skipped(d) => (StepStatus::Skipped, d, None),
        };
        if status == StepStatus::Fail {
            self.overall = StepStatus::Fail;
        }
        self.steps.push(StepRecord {
            name: name.to_string(),
            status,
            details,
            failed_index,
            elapsed_us: started.elapsed().as_micros() as u64,
        });
    }

    pub fn passed(&self) -> bool {
        self.overall == StepStatus::Pass
    }

    pub fn step(&self, name: &str) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with every timing field zeroed, for byte-level comparisons.
    pub fn to_json_untimed(&self) -> String {
        let mut copy = self.clone();
        for s in &mut copy.steps {
            s.elapsed_us = 0;
        }
        copy.to_json()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.sequence_id, self.overall);
        for s in &self.steps {
            out.push_str(&format!(
                "  [{}] {} ({:.3} s): {}\n",
                s.status,
                s.name,
                s.elapsed_us as f64 / 1e6,
                s.details
            ));
        }
        out
    }
}

enum Outcome {
    Pass(String),
    Fail(String, Option<i64>),
    Skipped(String),
}

/// Result of the derivation pipeline for one sequence.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub report: VerificationReport,
    pub ode: Option<LinearODE>,
    /// Extraction output, highest term `a(n + lead)`.
    pub extracted: Option<PRecurrence>,
    /// backward form.
    pub recurrence: Option<PRecurrence>,
}

pub const DERIVATION_STEPS: [&str; 5] = [
    "derive_ode",
    "verify_ode",
    "ode_to_recurrence",
    "reindex_to_backward_form",
    "match_registered_recurrence",
];

/// EGF to ODE to recurrence, compared against the registered recurrence.
pub fn run_derivation_for(desc: &SequenceDescriptor) -> Derivation {
    let mut report = VerificationReport::new(&desc.id);
    let mut out = Derivation {
        report: VerificationReport::new(&desc.id),
        ode: None,
        extracted: None,
        recurrence: None,
    };
    let Some(egf) = &desc.egf else {
        let now = Instant::now();
        for name in DERIVATION_STEPS {
            report.record(
                name,
                now,
                Outcome::Skipped(format!("{} has no registered EGF", desc.id)),
            );
        }
        out.report = report;
        return out;
    };

    let t = Instant::now();
    let ode = egfmodel::derive_ode(egf);
    report.record("derive_ode", t, Outcome::Pass(ode.to_string()));

    let t = Instant::now();
    let verdict = egfmodel::verify_ode(egf, &ode);
    report.record(
        "verify_ode",
        t,
        match verdict {
            Ok(v) if v.is_pass() => {
                Outcome::Pass("symbolic substitution leaves zero residual".into())
            }
            Ok(v) => Outcome::Fail(v.to_string(), None),
            Err(e) => Outcome::Fail(e.to_string(), None),
        },
    );

    let t = Instant::now();
    let extracted = match holorec::ode_to_recurrence(&ode) {
        Ok(r) => r,
        Err(e) => {
            report.record("ode_to_recurrence", t, Outcome::Fail(e.to_string(), None));
            let now = Instant::now();
            for name in &DERIVATION_STEPS[3..] {
                report.record(
                    name,
                    now,
                    Outcome::Skipped("no recurrence extracted".into()),
                );
            }
            out.report = report;
            out.ode = Some(ode);
            return out;
        }
    };
    report.record("ode_to_recurrence", t, Outcome::Pass(extracted.to_string()));

    let t = Instant::now();
    let backward = holorec::to_backward_form(&extracted);
    report.record(
        "reindex_to_backward_form",
        t,
        Outcome::Pass(backward.to_string()),
    );

    let t = Instant::now();
    let matched = match &desc.recurrence {
        None => Outcome::Skipped("no registered recurrence".into()),
        Some(reg) if *reg == backward => Outcome::Pass(format!("MATCH {reg}")),
        Some(reg) => Outcome::Fail(
            format!("MISMATCH: registered {reg}, derived {backward}"),
            None,
        ),
    };
    report.record("match_registered_recurrence", t, matched);

    Derivation {
        report,
        ode: Some(ode),
        extracted: Some(extracted),
        recurrence: Some(backward),
    }
}

pub fn run_derivation(registry: &Registry, id: &str) -> Result<Derivation, VerifyError> {
    Ok(run_derivation_for(registry.get(id)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Oracle,
    Series,
    BFile,
}

impl Source {
    pub fn all() -> BTreeSet<Source> {
        [Source::Oracle, Source::Series, Source::BFile].into()
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "oracle" => Some(Source::Oracle),
            "series" => Some(Source::Series),
            "bfile" => Some(Source::BFile),
            _ => None,
        }
    }
}

pub const VERIFICATION_STEPS: [&str; 5] = [
    "oracle_vs_bfile_prefix",
    "recurrence_forward_run",
    "oracle_spot_checks",
    "series_cross_check",
    "bfile_comparison",
];

fn residual_note(rec: &PRecurrence, terms: &SequenceTerms, n: i64) -> String {
    match holorec::recurrence_residual(rec, terms, n) {
        Ok(r) => format!("recurrence residual on reference terms at n = {n}: {r}"),
        Err(e) => format!("residual at n = {n} unavailable ({e})"),
    }
}

/// First index where two runs disagree over their common range.
fn first_mismatch(a: &SequenceTerms, b: &SequenceTerms) -> (Option<i64>, usize) {
    let mut compared = 0;
    for (n, x) in a.iter() {
        if let Some(y) = b.get(n) {
            compared += 1;
            if x != y {
                return (Some(n), compared);
            }
        }
    }
    (None, compared)
}

fn mismatch_text(n: i64, expected: &BigInt, found: &BigInt) -> String {
    let diff = found - expected;
    format!("mismatch at n = {n}: difference {}", abbreviate(&diff))
}

fn abbreviate(v: &BigInt) -> String {
    let s = v.to_string();
    if s.len() <= 40 {
        s
    } else {
        format!(
            "{}...{} ({} digits)",
            &s[..18],
            &s[s.len() - 18..],
            s.trim_start_matches('-').len()
        )
    }
}

/// Runs the term-level checks for `desc` up to index `last`. `bfile` is the
/// reference data, when loaded.
pub fn verify_descriptor(
    desc: &SequenceDescriptor,
    bfile: Option<&BFile>,
    last: i64,
    sources: &BTreeSet<Source>,
) -> Result<VerificationReport, VerifyError> {
    let rec = desc
        .recurrence
        .as_ref()
        .map(holorec::to_backward_form)
        .ok_or_else(|| VerifyError::NoRecurrence {
            id: desc.id.clone(),
        })?;
    if last < rec.valid_from() {
        return Err(VerifyError::TooFewTerms {
            requested: last,
            valid_from: rec.valid_from(),
        });
    }
    let mut report = VerificationReport::new(&desc.id);
    let data = bfile
        .filter(|_| sources.contains(&Source::BFile))
        .map(|b| &b.entries);
    let oracle = desc.oracle.filter(|_| sources.contains(&Source::Oracle));

    // oracle against published data
    let t = Instant::now();
    let outcome = match (oracle, data) {
        (None, _) => Outcome::Skipped("no closed-form oracle requested or registered".into()),
        (Some(_), None) => Outcome::Skipped("no b-file data requested".into()),
        (Some(o), Some(d)) => {
            let lo = d.offset().max(0);
            let hi = d.last_index().unwrap_or(-1).min(PREFIX_LIMIT);
            if hi < lo {
                Outcome::Skipped("b-file has no terms in the prefix window".into())
            } else {
                match o.terms(lo as u64, hi as u64) {
                    Err(e) => Outcome::Fail(e.to_string(), None),
                    Ok(reference) => match first_mismatch(&reference, d) {
                        (None, k) => Outcome::Pass(format!(
                            "{o} oracle equals b-file for n = {lo}..={hi} ({k} terms)"
                        )),
                        (Some(n), _) => Outcome::Fail(
                            format!(
                                "{o} oracle (formula of record) vs b-file {}",
                                mismatch_text(n, reference.get(n).unwrap(), d.get(n).unwrap())
                            ),
                            Some(n),
                        ),
                    },
                }
            }
        }
    };
    report.record(VERIFICATION_STEPS[0], t, outcome);

    // forward run
    let t = Instant::now();
    let seeds = match &desc.seeds {
        Seeds::Given(s) => Some(s.clone()),
        Seeds::FromBFile => bfile.map(|b| b.entries.clone()),
    };
    let run = match seeds {
        None => {
            report.record(
                VERIFICATION_STEPS[1],
                t,
                Outcome::Fail(
                    "seeds come from the b-file, which is not loaded".into(),
                    None,
                ),
            );
            None
        }
        Some(seeds) => match holorec::run_recurrence(&rec, &seeds, last) {
            Ok(terms) => {
                report.record(
                    VERIFICATION_STEPS[1],
                    t,
                    Outcome::Pass(format!(
                        "{rec}; seeded with a({})..a({}), ran to n = {last}",
                        rec.offset(),
                        rec.valid_from() - 1
                    )),
                );
                Some(terms)
            }
            Err(e) => {
                let index = match e {
                    holorec::RecurrenceError::SingularLeading { n }
                    | holorec::RecurrenceError::NonIntegral { n } => Some(n),
                    _ => None,
                };
                report.record(
                    VERIFICATION_STEPS[1],
                    t,
                    Outcome::Fail(e.to_string(), index),
                );
                None
            }
        },
    };

    // oracle spot checks
    let t = Instant::now();
    let checkpoints: Vec<u64> = desc
        .checkpoints
        .iter()
        .copied()
        .filter(|&c| c as i64 <= last)
        .collect();
    let outcome = match (oracle, &run) {
        (None, _) => Outcome::Skipped("no closed-form oracle requested or registered".into()),
        (_, None) => Outcome::Skipped("no recurrence terms to check".into()),
        (Some(_), Some(_)) if checkpoints.is_empty() => {
            Outcome::Skipped(format!("no checkpoints <= {last}"))
        }
        (Some(o), Some(run)) => spot_checks(o, &rec, run, &checkpoints),
    };
    report.record(VERIFICATION_STEPS[2], t, outcome);

    // series cross-check
    let t = Instant::now();
    let outcome = match (&desc.egf, &run) {
        (_, _) if !sources.contains(&Source::Series) => {
            Outcome::Skipped("series not requested".into())
        }
        (None, _) => Outcome::Skipped(format!("{} has no registered EGF", desc.id)),
        (_, None) => Outcome::Skipped("no recurrence terms to check".into()),
        (Some(egf), Some(run)) => {
            let hi = last.min(PREFIX_LIMIT);
            match egfmodel::series(egf, hi as usize + 1) {
                Err(e) => Outcome::Fail(e.to_string(), None),
                Ok(coeffs) => {
                    let mut fact = BigRat::one();
                    let mut scaled = Vec::with_capacity(coeffs.len());
                    let mut non_integer = None;
                    for (n, c) in coeffs.iter().enumerate() {
                        if n > 0 {
                            fact = fact * BigRat::from_i64(n as i64);
                        }
                        let v = c * &fact;
                        match v.to_integer() {
                            Some(i) => scaled.push(i),
                            None => {
                                non_integer = Some((n as i64, v));
                                break;
                            }
                        }
                    }
                    match non_integer {
                        Some((n, v)) => Outcome::Fail(
                            format!("n! * coefficient = {v} is not an integer at n = {n}"),
                            Some(n),
                        ),
                        None => {
                            let reference = SequenceTerms::new(0, scaled);
                            match first_mismatch(&reference, run) {
                                (None, k) => Outcome::Pass(format!("n! [x^n] F(x) equals recurrence terms for n = 0..={hi} ({k} terms)")),
                                (Some(n), _) => Outcome::Fail(
                                    format!(
                                        "series vs recurrence {}; {}",
                                        mismatch_text(n, reference.get(n).unwrap(), run.get(n).unwrap()),
                                        residual_note(&rec, &reference, n)
                                    ),
                                    Some(n),
                                ),
                            }
                        }
                    }
                }
            }
        }
    };
    report.record(VERIFICATION_STEPS[3], t, outcome);

    // published data
    let t = Instant::now();
    let outcome = match (data, &run) {
        (None, _) => Outcome::Skipped("no b-file data requested".into()),
        (_, None) => Outcome::Skipped("no recurrence terms to check".into()),
        (Some(d), Some(run)) => match first_mismatch(d, run) {
            (None, 0) => Outcome::Fail("b-file and recurrence run do not overlap".into(), None),
            (None, k) => Outcome::Pass(format!(
                "recurrence equals b-file on the full overlap n = {}..={} ({k} terms)",
                d.offset().max(run.offset()),
                d.last_index().unwrap().min(last)
            )),
            (Some(n), _) => Outcome::Fail(
                format!(
                    "b-file vs recurrence {}; {}",
                    mismatch_text(n, d.get(n).unwrap(), run.get(n).unwrap()),
                    residual_note(&rec, d, n)
                ),
                Some(n),
            ),
        },
    };
    report.record(VERIFICATION_STEPS[4], t, outcome);

    Ok(report)
}

fn spot_checks(
    oracle: crate::oracles::ClosedForm,
    rec: &PRecurrence,
    run: &SequenceTerms,
    checkpoints: &[u64],
) -> Outcome {
    for &c in checkpoints {
        let expected = match oracle.term(c) {
            Ok(v) => v,
            Err(e) => return Outcome::Fail(e.to_string(), Some(c as i64)),
        };
        let found = run
            .get(c as i64)
            .expect("run covers every checkpoint <= last");
        if *found != expected {
            let lo = (c as i64 - rec.order() as i64).max(0) as u64;
            let note = match oracle.terms(lo, c) {
                Ok(window) => residual_note(rec, &window, c as i64),
                Err(e) => e.to_string(),
            };
            return Outcome::Fail(
                format!(
                    "{oracle} oracle vs recurrence {}; {note}",
                    mismatch_text(c as i64, &expected, found)
                ),
                Some(c as i64),
            );
        }
    }
    let list: Vec<String> = checkpoints.iter().map(u64::to_string).collect();
    Outcome::Pass(format!(
        "{oracle} oracle equals recurrence at n = {}",
        list.join(", ")
    ))
}

/// Loads what `desc` needs from `store`, then runs [`verify_descriptor`].
pub fn run_verification(
    registry: &Registry,
    store: &BFileStore,
    policy: FetchPolicy,
    id: &str,
    last: i64,
    sources: &BTreeSet<Source>,
) -> Result<VerificationReport, VerifyError> {
    let desc = registry.get(id)?;
    let needs_bfile = sources.contains(&Source::BFile) || desc.seeds == Seeds::FromBFile;
    let bfile = if needs_bfile {
        Some(store.fetch(id, policy)?)
    } else {
        None
    };
    verify_descriptor(desc, bfile.as_ref(), last, sources)
}

/// Whether every residual the recurrence produces on `terms` within
/// `lo..=hi` is zero.
pub fn residuals_vanish(rec: &PRecurrence, terms: &SequenceTerms, lo: i64, hi: i64) -> bool {
    (lo..=hi).all(|n| holorec::recurrence_residual(rec, terms, n).is_ok_and(|r| r.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::registry_get;
    use crate::ratpoly::Poly;

    fn fixture(id: &str) -> BFile {
        BFileStore::offline()
            .fetch(id, FetchPolicy::FixtureOnly)
            .unwrap()
    }

    #[test]
    fn derivation_of_a025166() {
        let d = run_derivation(&Registry::builtin(), "A025166").unwrap();
        assert!(d.report.passed(), "{}", d.report.to_text());
        let names: Vec<&str> = d.report.steps.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, DERIVATION_STEPS);
        assert_eq!(
            d.ode.unwrap().to_string(),
            "(1 - 4*x + 4*x^2) * F'(x) = (1 - 4*x) * F(x)"
        );
        assert_eq!(d.recurrence, registry_get("A025166").unwrap().recurrence);
    }

    #[test]
    fn derivation_skipped_without_egf() {
        let d = run_derivation(&Registry::builtin(), "A025163").unwrap();
        assert!(d
            .report
            .steps
            .iter()
            .all(|s| s.status == StepStatus::Skipped));
        assert!(d.report.passed());
        assert!(run_derivation(&Registry::builtin(), "A000000").is_err());
    }

    #[test]
    fn small_verification_passes() {
        let desc = registry_get("A025166").unwrap();
        let b = fixture("A025166");
        let r = verify_descriptor(&desc, Some(&b), 450, &Source::all()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let names: Vec<&str> = r.steps.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, VERIFICATION_STEPS);
        assert!(r.steps.iter().all(|s| s.status == StepStatus::Pass));
        assert!(r
            .step("oracle_spot_checks")
            .unwrap()
            .details
            .ends_with("n = 200, 400"));
    }

    #[test]
    fn corrupted_coefficient_fails_at_first_checkpoint() {
        let mut desc = registry_get("A025166").unwrap();
        let rec = desc
            .recurrence
            .unwrap()
            .with_coeff(1, Poly::from_ints(&[2, -4]))
            .unwrap();
        desc.recurrence = Some(rec);
        let r = verify_descriptor(&desc, None, 300, &[Source::Oracle].into()).unwrap();
        assert!(!r.passed());
        let step = r.step("oracle_spot_checks").unwrap();
        assert_eq!(step.status, StepStatus::Fail);
        assert_eq!(step.failed_index, Some(200));
        assert!(step.details.contains("residual"), "{}", step.details);
        assert!(!step
            .details
            .contains("residual on reference terms at n = 200: 0"));
    }

    #[test]
    fn a025163_from_fixture() {
        let desc = registry_get("A025163").unwrap();
        let b = fixture("A025163");
        let r = verify_descriptor(&desc, Some(&b), 300, &Source::all()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.step("bfile_comparison").unwrap().status, StepStatus::Pass);
        assert_eq!(
            r.step("oracle_spot_checks").unwrap().status,
            StepStatus::Skipped
        );
        assert_eq!(
            r.step("series_cross_check").unwrap().status,
            StepStatus::Skipped
        );
    }

    #[test]
    fn missing_bfile_seeds_fail_the_run() {
        let desc = registry_get("A025163").unwrap();
        let r = verify_descriptor(&desc, None, 10, &Source::all()).unwrap();
        assert_eq!(
            r.step("recurrence_forward_run").unwrap().status,
            StepStatus::Fail
        );
    }

    #[test]
    fn too_few_terms() {
        let desc = registry_get("A025166").unwrap();
        assert!(matches!(
            verify_descriptor(&desc, None, 1, &Source::all()),
            Err(VerifyError::TooFewTerms {
                requested: 1,
                valid_from: 2
            })
        ));
    }

    #[test]
    fn json_shape() {
        let desc = registry_get("A025166").unwrap();
        let r = verify_descriptor(&desc, None, 20, &[Source::Series].into()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["sequence_id"], "A025166");
        assert_eq!(v["overall"], "PASS");
        assert_eq!(v["steps"][0]["status"], "SKIPPED");
        assert_eq!(v["steps"][3]["name"], "series_cross_check");
        assert!(v["steps"][3]["failed_index"].is_null());
        assert!(r.to_json_untimed().contains("\"elapsed_us\": 0"));
    }
}
