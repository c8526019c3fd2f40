//! Interpreter and transcript-semantics behavior: honest runs, store
//! checking, reflection, and the duplicate-send counterexample.

mod common;

use common::*;
use molly_core::compiler::compile;
use molly_core::interpreter::{
    check_store, exec, honest_env, honest_env_with_tags, ExecEnv, FailureReason, HonestMode, Store,
    TagKind,
};
use molly_core::proc_ir::{trace, Loc, Stmt};
use molly_core::runtime::{rt_hash, rt_pair, RtVal, TagSource};
use molly_core::semantics::{
    completion, induces, is_strong_valuation, is_valuation, proc_transcript_valid,
    reflect_valuation, role_transcript_valid, search_valuation, SemanticsError, Valuation,
};
use molly_core::syntax::parse_proc;
use molly_core::terms::{Act, Sort, Term};

fn data(id: u64) -> RtVal {
    RtVal::Atom(Sort::Data, id)
}

fn chan(id: u64) -> RtVal {
    RtVal::Atom(Sort::Chan, id)
}

#[test]
fn resp1_executes_and_forwards_the_second_component() {
    let p = compile(&resp1()).unwrap();
    let mut env = ExecEnv {
        params: vec![chan(1)],
        inbound: vec![rt_pair(&data(10), &data(20))],
        tags: TagSource::counter(),
    };
    let (store, tr) = exec(&p, &mut env).unwrap();
    assert_eq!(tr.last(), Some(&Act::Snd(chan(1), data(20))));
    assert_eq!(check_store(&p, &store), vec![]);
    assert_eq!(
        tr,
        trace(&p)
            .iter()
            .map(|a| a.map(|l| store.get(*l).unwrap().clone()))
            .collect::<Vec<_>>()
    );
}

#[test]
fn resp1_halts_on_a_non_pair() {
    let p = compile(&resp1()).unwrap();
    let mut env = ExecEnv {
        params: vec![chan(1)],
        inbound: vec![data(9)],
        tags: TagSource::counter(),
    };
    let failure = exec(&p, &mut env).unwrap_err();
    assert_eq!(failure.reason, FailureReason::FrstOnNonPair);
    assert!(matches!(
        p.stmts[failure.stmt_index],
        Stmt::Bind(_, _, molly_core::Expr::Frst(_))
    ));
}

#[test]
fn genhash_halts_on_a_wrong_hash() {
    let p = compile(&genhash()).unwrap();
    let mut env = honest_env(&genhash(), HonestMode::Fresh, 1);
    env.inbound = vec![rt_hash(&data(999))];
    let failure = exec(&p, &mut env).unwrap_err();
    // The compiled proc compares the reception against its own
    // recomputed hash, so the halt is an equality mismatch.
    assert_eq!(failure.reason, FailureReason::SameMismatch);
    assert!(matches!(p.stmts[failure.stmt_index], Stmt::Csame(..)));
}

#[test]
fn input_exhaustion_is_reported() {
    let p = compile(&init1()).unwrap();
    let mut env = ExecEnv {
        params: vec![chan(1)],
        inbound: vec![],
        tags: TagSource::counter(),
    };
    let failure = exec(&p, &mut env).unwrap_err();
    assert_eq!(failure.reason, FailureReason::InputExhausted);
}

#[test]
fn honest_runs_of_compilable_examples() {
    for (name, role) in compilable_examples() {
        let p = compile(&role).unwrap();
        for seed in 0..5u64 {
            let mut env = honest_env(&role, HonestMode::SharedEncryption, seed);
            let (store, tr) =
                exec(&p, &mut env).unwrap_or_else(|e| panic!("{name} shared run failed: {e}"));
            assert_eq!(check_store(&p, &store), vec![], "{name} store check");
            assert_eq!(tr.len(), trace(&p).len());
        }
    }
}

#[test]
fn receptions_encrypted_under_a_generated_public_key_succeed() {
    // The key pair is generated at initialization; the oracle must
    // encrypt under the same public half the proc derived, even though
    // it meets the public key before the private one.
    let role = vec![
        Act::Prm(Term::Ch(1)),
        Act::Snd(Term::Ch(1), Term::Ik(1)),
        Act::Rcv(Term::Ch(1), Term::en(Term::Nm(0), Term::Ak(1))),
        Act::Snd(Term::Ch(1), Term::Nm(0)),
    ];
    let p = compile(&role).unwrap();
    for mode in [HonestMode::Fresh, HonestMode::SharedEncryption] {
        let mut env = honest_env(&role, mode, 21);
        let (store, tr) = exec(&p, &mut env).unwrap();
        assert_eq!(check_store(&p, &store), vec![]);
        let tau = reflect_valuation(&p, &store);
        assert_eq!(role_transcript_valid(&role, &tr, &tau), vec![]);
    }
}

#[test]
fn decrypted_plaintext_is_forwarded() {
    // The final transmission carries exactly the name inside the
    // received encryption.
    let p = compile(&encr1()).unwrap();
    let mut env = honest_env(&encr1(), HonestMode::Fresh, 9);
    let inner = match &env.inbound[0] {
        RtVal::Enc { plain, .. } => (**plain).clone(),
        other => panic!("unexpected inbound {other:?}"),
    };
    let (_, tr) = exec(&p, &mut env).unwrap();
    assert_eq!(
        tr.last(),
        Some(&Act::Snd(tr[0].payloads()[0].clone(), inner))
    );
}

#[test]
fn fresh_mode_separates_the_randomized_examples() {
    // The constructed decryption key is a different encryption value
    // than the one inside the received message.
    for role in [fail2(), fail3()] {
        let p = compile(&role).unwrap();
        let mut env = honest_env(&role, HonestMode::Fresh, 7);
        let failure = exec(&p, &mut env).unwrap_err();
        assert_eq!(failure.reason, FailureReason::DecryptFailed);

        let mut env = honest_env(&role, HonestMode::SharedEncryption, 7);
        assert!(exec(&p, &mut env).is_ok());
    }
    // Roles without received randomized encryptions succeed either way.
    for role in [init1(), resp1(), genhash(), encr1(), encrsym()] {
        let p = compile(&role).unwrap();
        let mut env = honest_env(&role, HonestMode::Fresh, 7);
        assert!(exec(&p, &mut env).is_ok());
    }
}

#[test]
fn counter_tag_runs_are_deterministic() {
    for (_, role) in compilable_examples() {
        let p = compile(&role).unwrap();
        let env = honest_env_with_tags(&role, HonestMode::SharedEncryption, 3, TagKind::Counter);
        let a = exec(&p, &mut env.clone());
        let b = exec(&p, &mut env.clone());
        assert_eq!(a, b);
    }
}

/// The worked store example: a proc holding a private key decrypts a
/// public-key encryption and compares the result with a parameter.
fn store_example() -> (molly_core::Proc, Store) {
    let text = r#"
        Bind (Ch 1, L 1) (Param 1);
        Csrt (L 1) Chan;
        Evnt (Prm (L 2));
        Bind (Nm 0, L 2) (Param 2);
        Csrt (L 2) Name;
        Evnt (Prm (L 3));
        Bind (Ik (Av 2), L 3) (Param 3);
        Csrt (L 3) Ikey;
        Evnt (Rcv (L 1) (L 4));
        Bind (En (Nm 0) (Ak (Av 2)), L 4) (Read 1);
        Bind (Nm 0, L 5) (Decr (L 4) (L 3));
        Same (L 5) (L 2);
        Evnt (Snd (L 1) (L 2))
    "#;
    let p = parse_proc(text).unwrap();
    let r0 = RtVal::Atom(Sort::Name, 0);
    let r1 = chan(1);
    let r2 = RtVal::Priv(9);
    let r3 = RtVal::enc(r0.clone(), RtVal::Pub(9), 7);
    let store = Store::from_entries([
        (Loc(1), r1),
        (Loc(2), r0.clone()),
        (Loc(3), r2),
        (Loc(4), r3),
        (Loc(5), r0),
    ]);
    (p, store)
}

#[test]
fn store_checking_on_the_worked_example() {
    let (p, store) = store_example();
    assert_eq!(check_store(&p, &store), vec![]);

    // Breaking the equality between the parameter and the decryption
    // result is caught at the sameness check.
    let mut broken = store.clone();
    broken.insert(Loc(2), RtVal::Atom(Sort::Name, 42));
    let violations = check_store(&p, &broken);
    assert!(violations
        .iter()
        .any(|v| matches!(p.stmts[v.stmt_index], Stmt::Csame(..))));

    assert_eq!(check_store(&molly_core::Proc::new(), &Store::new()), vec![]);
}

#[test]
fn proc_transcript_validity_on_the_worked_example() {
    let (p, store) = store_example();
    let tr: Vec<_> = trace(&p)
        .iter()
        .map(|a| a.map(|l| store.get(*l).unwrap().clone()))
        .collect();
    assert_eq!(proc_transcript_valid(&p, &tr, Some(&store)), Ok(vec![]));

    // Altering the sent value breaks the trace mapping.
    let mut altered = tr.clone();
    let last = altered.len() - 1;
    altered[last] = Act::Snd(chan(1), RtVal::Atom(Sort::Name, 42));
    let violations = proc_transcript_valid(&p, &altered, Some(&store)).unwrap();
    assert!(!violations.is_empty());

    // Procs that generate values need a witness.
    let genr = compile(&genhash()).unwrap();
    assert_eq!(
        proc_transcript_valid(&genr, &tr, None),
        Err(SemanticsError::WitnessRequired)
    );
}

#[test]
fn witness_free_validation_replays_the_store() {
    let p = compile(&resp1()).unwrap();
    let mut env = ExecEnv {
        params: vec![chan(1)],
        inbound: vec![rt_pair(&data(10), &data(20))],
        tags: TagSource::counter(),
    };
    let (_, tr) = exec(&p, &mut env).unwrap();
    assert_eq!(proc_transcript_valid(&p, &tr, None), Ok(vec![]));

    let mut altered = tr.clone();
    altered[2] = Act::Snd(chan(1), data(10));
    assert!(!proc_transcript_valid(&p, &altered, None)
        .unwrap()
        .is_empty());
}

#[test]
fn induces_relates_role_and_transcript_pointwise() {
    let role = vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Ik(2)),
        Act::Rcv(Term::Ch(1), Term::en(Term::Nm(0), Term::Ak(2))),
        Act::Snd(Term::Ch(1), Term::Nm(0)),
    ];
    let r1 = chan(1);
    let r2 = RtVal::Priv(9);
    let r3 = RtVal::enc(RtVal::Atom(Sort::Name, 0), RtVal::Pub(9), 7);
    let r4 = RtVal::Atom(Sort::Name, 0);
    let v = Valuation::from_pairs([
        (Term::Ch(1), r1.clone()),
        (Term::Ik(2), r2.clone()),
        (Term::en(Term::Nm(0), Term::Ak(2)), r3.clone()),
        (Term::Nm(0), r4.clone()),
    ]);
    let tr = vec![
        Act::Prm(r1.clone()),
        Act::Prm(r2),
        Act::Rcv(r1.clone(), r3),
        Act::Snd(r1, r4),
    ];
    assert!(induces(&v, &role, &tr));
    assert!(!induces(&v, &role, &tr[..3].to_vec()));
    let mut swapped = tr.clone();
    swapped[1] = Act::Ret(RtVal::Priv(9));
    assert!(!induces(&v, &role, &swapped));
}

#[test]
fn reflection_validates_honest_runs() {
    for (name, role) in compilable_examples() {
        let p = compile(&role).unwrap();
        for (mode, seed) in [
            (HonestMode::Fresh, 11u64),
            (HonestMode::SharedEncryption, 12),
        ] {
            let mut env = honest_env(&role, mode, seed);
            let Ok((store, tr)) = exec(&p, &mut env) else {
                continue; // randomized-encryption mismatch: counted, not failed
            };
            let tau = reflect_valuation(&p, &store);
            assert_eq!(is_valuation(&tau), vec![], "{name} {mode:?}");
            let violations = role_transcript_valid(&role, &tr, &tau);
            assert_eq!(violations, vec![], "{name} {mode:?}");

            // Completion upgrades the witness to a strong valuation.
            let completed = completion(&tau);
            assert!(tau.is_subset(&completed));
            assert_eq!(is_strong_valuation(&completed), vec![], "{name} {mode:?}");
            assert_eq!(completion(&completed), completed);
        }
    }
}

#[test]
fn reflection_example_values() {
    // The pair the initiator sends is reflected to the value stored at
    // its pair location.
    let p = compile(&init1()).unwrap();
    let mut env = honest_env(&init1(), HonestMode::Fresh, 5);
    let (store, _) = exec(&p, &mut env).unwrap();
    let tau = reflect_valuation(&p, &store);
    let pair_term = Term::pr(Term::Dt(1), Term::Dt(2));
    let at_l4 = store.get(Loc(4)).unwrap();
    assert!(tau.contains(&pair_term, at_l4));

    assert!(reflect_valuation(&molly_core::Proc::new(), &Store::new()).is_empty());

    // Both locations of a twice-bound term reflect to the same value.
    let (p, store) = store_example();
    let tau = reflect_valuation(&p, &store);
    assert_eq!(tau.values_of(&Term::Nm(0)).count(), 1);
}

#[test]
fn duplicate_send_counterexample() {
    let role = dupsend();
    let p = compile(&role).unwrap();

    // Honest executions always send the same value twice.
    for seed in 0..100u64 {
        let mut env = honest_env(&role, HonestMode::Fresh, seed);
        let (_, tr) = exec(&p, &mut env).unwrap();
        let sends: Vec<_> = tr
            .iter()
            .filter_map(|a| match a {
                Act::Snd(_, m) => Some(m.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(sends[0], sends[1]);
    }

    // A role-valid transcript with two different encryption values
    // exists...
    let r_ch = chan(1);
    let r_p = data(1);
    let r_k = RtVal::Atom(Sort::Skey, 2);
    let enc_term = Term::en(Term::Dt(1), Term::Sk(1));
    let e1 = RtVal::enc(r_p.clone(), r_k.clone(), 101);
    let e2 = RtVal::enc(r_p.clone(), r_k.clone(), 102);
    assert_ne!(e1, e2);
    let tr = vec![
        Act::Prm(r_ch.clone()),
        Act::Prm(r_p.clone()),
        Act::Prm(r_k.clone()),
        Act::Snd(r_ch.clone(), e1.clone()),
        Act::Snd(r_ch.clone(), e2.clone()),
    ];
    let v = Valuation::from_pairs([
        (Term::Ch(1), r_ch),
        (Term::Dt(1), r_p),
        (Term::Sk(1), r_k),
        (enc_term.clone(), e1.clone()),
        (enc_term, e2.clone()),
    ]);
    assert_eq!(role_transcript_valid(&role, &tr, &v), vec![]);

    // ...but no store maps the proc's single send location onto both
    // values.
    let send_loc = match trace(&p).last().unwrap() {
        Act::Snd(_, m) => *m,
        _ => unreachable!(),
    };
    for candidate in [e1, e2] {
        let mut env = honest_env(&role, HonestMode::Fresh, 0);
        let (mut store, _) = exec(&p, &mut env).unwrap();
        store.insert(send_loc, candidate);
        let violations = proc_transcript_valid(&p, &tr, Some(&store)).unwrap();
        assert!(!violations.is_empty());
    }
}

#[test]
fn bounded_search_finds_and_rejects_witnesses() {
    let role = resp1();
    let p = compile(&role).unwrap();
    let mut env = ExecEnv {
        params: vec![chan(1)],
        inbound: vec![rt_pair(&data(10), &data(20))],
        tags: TagSource::counter(),
    };
    let (_, tr) = exec(&p, &mut env).unwrap();
    let found = search_valuation(&role, &tr).expect("witness exists");
    assert_eq!(role_transcript_valid(&role, &tr, &found), vec![]);

    // Corrupting the forwarded value kills every candidate valuation.
    let mut bad = tr.clone();
    bad[2] = Act::Snd(chan(1), data(10));
    assert_eq!(search_valuation(&role, &bad), None);
}
