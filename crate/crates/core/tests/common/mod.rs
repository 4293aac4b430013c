//! Strategies and property bodies shared by the property and acceptance
//! targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use egfrec::exprparse::{format_ratexpr, parse_ratexpr};
use egfrec::holorec::{
    normalize_recurrence, recurrence_residual, shift_recurrence, to_backward_form, PRecurrence,
};
use egfrec::oracles::{a025166_terms, registry_get};
use egfrec::ratpoly::{poly_gcd, BigRat, Poly, RationalFunction};
use egfrec::verifyflow::{verify_descriptor, Source};

pub fn poly(max_deg: usize, bound: i64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-bound..=bound, 0..=max_deg + 1).prop_map(|c| Poly::from_ints(&c))
}

pub fn nonzero_poly(max_deg: usize, bound: i64) -> impl Strategy<Value = Poly> {
    poly(max_deg, bound).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn ratfun(max_deg: usize, bound: i64) -> impl Strategy<Value = RationalFunction> {
    (poly(max_deg, bound), nonzero_poly(max_deg, bound))
        .prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

fn content_is_one(polys: &[&Poly]) -> bool {
    let mut g = BigInt::zero();
    for p in polys {
        for c in p.coeffs() {
            match c.to_integer() {
                Some(i) => g = g.gcd(&i),
                None => return false,
            }
        }
    }
    g.is_one()
}

pub fn canonical_form((n, d, k): (Poly, Poly, i64)) -> Result<(), TestCaseError> {
    let f = RationalFunction::new(n.clone(), d.clone()).unwrap();
    prop_assert!(poly_gcd(f.numer(), f.denom()).unwrap().is_constant());
    prop_assert!(content_is_one(&[f.numer(), f.denom()]));
    prop_assert!(!f.denom().lowest_coeff().unwrap().is_negative());
    let c = BigRat::ratio(-k, 7);
    prop_assert_eq!(
        &RationalFunction::new(n.scale(&c), d.scale(&c)).unwrap(),
        &f
    );
    prop_assert_eq!(f.numer() * &d, f.denom() * &n);
    Ok(())
}

pub fn canonical_form_strategy() -> impl Strategy<Value = (Poly, Poly, i64)> {
    (poly(8, 1_000_000), nonzero_poly(8, 1_000_000), 1i64..1000)
}

pub fn product_rule((f, g): (RationalFunction, RationalFunction)) -> Result<(), TestCaseError> {
    let lhs = f.mul(&g).derivative();
    let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn product_rule_strategy() -> impl Strategy<Value = (RationalFunction, RationalFunction)> {
    (ratfun(4, 50), ratfun(4, 50))
}

pub fn parser_round_trip(f: RationalFunction) -> Result<(), TestCaseError> {
    prop_assert_eq!(parse_ratexpr(&format_ratexpr(&f)).unwrap(), f);
    Ok(())
}

pub fn parser_round_trip_strategy() -> impl Strategy<Value = RationalFunction> {
    ratfun(6, 1_000_000)
}

pub fn shift_round_trip((coeffs, d): (Vec<Poly>, i64)) -> Result<(), TestCaseError> {
    let rec = normalize_recurrence(&PRecurrence::new(coeffs, 0, 0).unwrap());
    let moved = shift_recurrence(&rec, d);
    prop_assert_eq!(moved.lead(), rec.lead() + d);
    prop_assert_eq!(moved.valid_from(), rec.valid_from() - d);
    prop_assert_eq!(&shift_recurrence(&moved, -d), &rec);
    prop_assert_eq!(to_backward_form(&moved), to_backward_form(&rec));
    Ok(())
}

pub fn shift_round_trip_strategy() -> impl Strategy<Value = (Vec<Poly>, i64)> {
    (prop::collection::vec(nonzero_poly(3, 20), 2..=4), -5i64..=5)
}

pub fn residual_vanishing(n: i64) -> Result<(), TestCaseError> {
    let rec = registry_get("A025166").unwrap().recurrence.unwrap();
    let terms = a025166_terms((n - 2) as u64, n as u64).unwrap();
    prop_assert!(recurrence_residual(&rec, &terms, n).unwrap().is_zero());
    let extracted = shift_recurrence(&rec, 1);
    prop_assert!(recurrence_residual(&extracted, &terms, n - 1)
        .unwrap()
        .is_zero());
    Ok(())
}

pub fn residual_vanishing_strategy() -> impl Strategy<Value = i64> {
    2i64..=1000
}

/// Adds `±n^power` to coefficient `t` of the registered A025166 recurrence.
pub fn coefficient_mutation((t, power, up): (usize, usize, bool)) -> Result<(), TestCaseError> {
    let mut desc = registry_get("A025166").unwrap();
    let rec = desc.recurrence.clone().unwrap();
    let delta = Poly::monomial(BigRat::from_i64(if up { 1 } else { -1 }), power);
    match rec.with_coeff(t, &rec.coeffs()[t] + &delta) {
        // a zero leading or trailing coefficient is rejected outright
        Err(_) => {}
        Ok(mutated) => {
            desc.recurrence = Some(mutated);
            let report = verify_descriptor(&desc, None, 200, &[Source::Oracle].into()).unwrap();
            prop_assert!(!report.passed(), "{}", report.to_text());
        }
    }
    Ok(())
}

pub fn coefficient_mutation_strategy() -> impl Strategy<Value = (usize, usize, bool)> {
    (0usize..3, 0usize..3, any::<bool>())
}
