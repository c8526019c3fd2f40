//! The derivation engine against its worked examples, and the two
//! bridges between compilation and derivability: terms bound without
//! generation are derivable from what the role obtains, and derivable
//! subterms are bound.

mod common;

use std::collections::BTreeSet;

use common::*;
use molly_core::compiler::{compile, universe};
use molly_core::derivability::{
    binding_closure, derivable_closure, dy_derivable, executability, generated_hypotheses,
    genr_free_bound_terms, ReasonKind, Verdict,
};
use molly_core::terms::{obtained_terms, subterms, Term};

#[test]
fn pair_elimination_derives_components() {
    let pair = Term::pr(Term::Dt(1), Term::Dt(2));
    let hyps: BTreeSet<_> = [pair.clone()].into();
    let u = subterms(&pair);
    assert_eq!(dy_derivable(&hyps, &Term::Dt(1), &u), Ok(true));
}

#[test]
fn missing_private_key_is_not_derivable() {
    let hyps = obtained_terms(&encrfail());
    let mut u = universe(&encrfail());
    u.insert(Term::Ik(2));
    assert_eq!(dy_derivable(&hyps, &Term::Ik(2), &u), Ok(false));
}

#[test]
fn quotes_are_free() {
    let hyps = BTreeSet::new();
    let u: BTreeSet<_> = [Term::qt("hello")].into();
    assert_eq!(dy_derivable(&hyps, &Term::qt("hello"), &u), Ok(true));
}

#[test]
fn goals_outside_the_universe_are_contract_violations() {
    let hyps = BTreeSet::new();
    let u: BTreeSet<_> = [Term::Dt(1)].into();
    assert!(dy_derivable(&hyps, &Term::Dt(9), &u).is_err());
}

#[test]
fn closure_examples() {
    // Decrypting the reception exposes the name.
    let closure = derivable_closure(&obtained_terms(&encr1()), &universe(&encr1()));
    assert!(closure.contains(&Term::Nm(0)));

    // Atoms are underivable from nothing.
    let u: BTreeSet<_> = [Term::Dt(1)].into();
    assert!(derivable_closure(&BTreeSet::new(), &u).is_empty());

    // A hash received alongside an encryption keyed by it unlocks the
    // plaintext pair and its components.
    let pair = Term::pr(Term::Dt(1), Term::Dt(2));
    let hash = Term::hs(pair.clone());
    let enc = Term::en(pair.clone(), hash.clone());
    let hyps: BTreeSet<_> = [hash.clone(), enc.clone()].into();
    let mut u = subterms(&enc);
    u.extend(subterms(&hash));
    let closure = derivable_closure(&hyps, &u);
    assert!(closure.contains(&Term::Dt(1)));
    assert!(closure.contains(&Term::Dt(2)));
}

#[test]
fn closure_is_monotone_and_idempotent() {
    let enc = Term::en(Term::pr(Term::Dt(1), Term::Dt(2)), Term::Sk(1));
    let u = subterms(&enc);
    let small: BTreeSet<_> = [enc.clone()].into();
    let big: BTreeSet<_> = [enc, Term::Sk(1)].into();
    let c_small = derivable_closure(&small, &u);
    let c_big = derivable_closure(&big, &u);
    assert!(c_small.is_subset(&c_big));
    assert_eq!(derivable_closure(&c_big, &u), c_big);
}

#[test]
fn executability_reports() {
    let report = executability(&badhash()).unwrap();
    assert_eq!(report.verdict, Verdict::NonExecutable);
    assert_eq!(
        report.reasons,
        vec![(ReasonKind::MissingHashBody, Term::Dt(1))]
    );

    let report = executability(&fail1()).unwrap();
    assert_eq!(
        report.reasons,
        vec![(
            ReasonKind::MissingDecryptionKey,
            Term::en(Term::Dt(1), Term::Dt(2))
        )]
    );

    // Compiles even though honest execution has negligible success
    // probability.
    let report = executability(&fail2()).unwrap();
    assert_eq!(report.verdict, Verdict::Executable);
    assert!(report.reasons.is_empty());
}

#[test]
fn bound_without_generation_implies_derivable_from_obtained() {
    for (name, role) in compilable_examples() {
        let p = compile(&role).unwrap();
        let u = universe(&role);
        let obtained = obtained_terms(&role);
        for t in genr_free_bound_terms(&p) {
            assert_eq!(
                dy_derivable(&obtained, &t, &u),
                Ok(true),
                "{name}: bound term {t:?} not derivable from obtained"
            );
        }
    }
}

#[test]
fn derivable_implies_bound() {
    for (name, role) in compilable_examples() {
        let p = compile(&role).unwrap();
        let u = universe(&role);
        let mut hyps = obtained_terms(&role);
        hyps.extend(generated_hypotheses(&p, &u));
        for t in binding_closure(&hyps, &u) {
            assert!(p.is_bound(&t), "{name}: derivable term {t:?} unbound");
        }
    }
}

#[test]
fn public_keys_are_derivable_but_not_bound_for_private_key_holders() {
    // The compiler derives a public key from a held private key only at
    // initialization, for positive-polarity pairs; the private-key
    // reception role never binds the public partner even though the
    // full derivation system produces it.
    let p = compile(&encr1()).unwrap();
    let u = universe(&encr1());
    let obtained = obtained_terms(&encr1());
    assert!(derivable_closure(&obtained, &u).contains(&Term::Ak(2)));
    assert!(!binding_closure(&obtained, &u).contains(&Term::Ak(2)));
    assert!(!p.is_bound(&Term::Ak(2)));
}
