//! Shared fixtures: the example roles exercised throughout the test
//! suites, and the expected procs for the ones with golden outputs.

#![allow(dead_code)]

use molly_core::terms::{Act, Role, Term};

/// Pair-exchange initiator: sends a pair of its two data parameters,
/// then expects the second one back.
pub fn init1() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Dt(1)),
        Act::Prm(Term::Dt(2)),
        Act::Snd(Term::Ch(1), Term::pr(Term::Dt(1), Term::Dt(2))),
        Act::Rcv(Term::Ch(1), Term::Dt(2)),
    ]
}

/// Pair-exchange responder: receives the pair, returns its second
/// component.
pub fn resp1() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Rcv(Term::Ch(1), Term::pr(Term::Dt(1), Term::Dt(2))),
        Act::Snd(Term::Ch(1), Term::Dt(2)),
    ]
}

/// Sends fresh data and expects its hash back.
pub fn genhash() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Snd(Term::Ch(1), Term::Dt(1)),
        Act::Rcv(Term::Ch(1), Term::hs(Term::Dt(1))),
    ]
}

/// Receives a hash whose body it can never check; rejected.
pub fn badhash() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Rcv(Term::Ch(1), Term::hs(Term::Dt(1))),
        Act::Snd(Term::Ch(1), Term::Dt(1)),
    ]
}

/// Holds a private key, decrypts a public-key encryption, and forwards
/// the plaintext.
pub fn encr1() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Ik(2)),
        Act::Rcv(Term::Ch(1), Term::en(Term::Nm(0), Term::Ak(2))),
        Act::Snd(Term::Ch(1), Term::Nm(0)),
    ]
}

/// Like `encr1` but without the private key; rejected.
pub fn encrfail() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Rcv(Term::Ch(1), Term::en(Term::Nm(0), Term::Ak(2))),
        Act::Snd(Term::Ch(1), Term::Nm(0)),
    ]
}

/// Symmetric encryption keyed by the hash of a data parameter.
pub fn encrsym() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Dt(2)),
        Act::Rcv(Term::Ch(1), Term::en(Term::Nm(0), Term::hs(Term::Dt(2)))),
        Act::Snd(Term::Ch(1), Term::Nm(0)),
    ]
}

/// Receives an encryption keyed by an underivable encryption; rejected.
pub fn fail1() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Rcv(
            Term::Ch(1),
            Term::en(Term::Dt(3), Term::en(Term::Dt(1), Term::Dt(2))),
        ),
    ]
}

/// Compiles, but the constructed decryption key has the wrong tag at
/// runtime unless the peer reuses the role's own encryption value.
pub fn fail2() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Dt(1)),
        Act::Prm(Term::Dt(2)),
        Act::Rcv(
            Term::Ch(1),
            Term::en(Term::Dt(3), Term::en(Term::Dt(1), Term::Dt(2))),
        ),
    ]
}

/// Like `fail2` but the key encryption was itself sent first.
pub fn fail3() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Dt(1)),
        Act::Prm(Term::Dt(2)),
        Act::Snd(Term::Ch(1), Term::en(Term::Dt(1), Term::Dt(2))),
        Act::Rcv(
            Term::Ch(1),
            Term::en(Term::Dt(3), Term::en(Term::Dt(1), Term::Dt(2))),
        ),
    ]
}

/// Sends the same randomized encryption twice; one location serves both
/// transmissions.
pub fn dupsend() -> Role {
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Prm(Term::Dt(1)),
        Act::Prm(Term::Sk(1)),
        Act::Snd(Term::Ch(1), Term::en(Term::Dt(1), Term::Sk(1))),
        Act::Snd(Term::Ch(1), Term::en(Term::Dt(1), Term::Sk(1))),
    ]
}

/// The seven compilable example roles, with names.
pub fn compilable_examples() -> Vec<(&'static str, Role)> {
    vec![
        ("init1", init1()),
        ("resp1", resp1()),
        ("genhash", genhash()),
        ("encr1", encr1()),
        ("encrsym", encrsym()),
        ("fail2", fail2()),
        ("fail3", fail3()),
    ]
}

pub const GOLDEN_INIT1: &str = r#"
Evnt (Prm (L 1));
Bind (Ch 1, L 1) (Param 1);
Csrt (L 1) Chan;
Evnt (Prm (L 2));
Bind (Dt 1, L 2) (Param 2);
Csrt (L 2) Data;
Evnt (Prm (L 3));
Bind (Dt 2, L 3) (Param 3);
Csrt (L 3) Data;
Bind (Pr (Dt 1) (Dt 2), L 4) (Pair (L 2) (L 3));
Evnt (Snd (L 1) (L 4));
Evnt (Rcv (L 1) (L 5));
Bind (Dt 2, L 5) (Read 1);
Same (L 5) (L 3)
"#;

pub const GOLDEN_RESP1: &str = r#"
Evnt (Prm (L 1));
Bind (Ch 1, L 1) (Param 1);
Csrt (L 1) Chan;
Evnt (Rcv (L 1) (L 2));
Bind (Pr (Dt 1) (Dt 2), L 2) (Read 1);
Bind (Dt 1, L 3) (Frst (L 2));
Bind (Dt 2, L 4) (Scnd (L 2));
Csrt (L 4) Data;
Csrt (L 3) Data;
Evnt (Snd (L 1) (L 4))
"#;

pub const GOLDEN_GENHASH: &str = r#"
Bind (Dt 1, L 1) (Genr 1 Data);
Evnt (Prm (L 3));
Bind (Ch 1, L 3) (Param 1);
Csrt (L 3) Chan;
Evnt (Snd (L 3) (L 1));
Evnt (Rcv (L 3) (L 4));
Bind (Hs (Dt 1), L 4) (Read 1);
Bind (Hs (Dt 1), L 2) (Hash (L 1));
Csame (L 4) (L 2)
"#;

pub const GOLDEN_ENCR1: &str = r#"
Evnt (Prm (L 1));
Bind (Ch 1, L 1) (Param 1);
Csrt (L 1) Chan;
Evnt (Prm (L 2));
Bind (Ik (Av 2), L 2) (Param 2);
Csrt (L 2) Ikey;
Evnt (Rcv (L 1) (L 3));
Bind (En (Nm 0) (Ak (Av 2)), L 3) (Read 1);
Bind (Nm 0, L 4) (Decr (L 3) (L 2));
Csrt (L 4) Name;
Evnt (Snd (L 1) (L 4))
"#;

pub const GOLDEN_ENCRSYM: &str = r#"
Comm "input (Ch 1)";
Evnt (Prm (L 1));
Bind (Ch 1, L 1) (Param 1);
Csrt (L 1) Chan;
Comm "input (Dt 2)";
Evnt (Prm (L 2));
Bind (Dt 2, L 2) (Param 2);
Bind (Hs (Dt 2), L 3) (Hash (L 2));
Csrt (L 2) Data;
Comm "receiving (En (Nm 0) (Hs (Dt 2))) on (Ch 1)";
Evnt (Rcv (L 1) (L 4));
Bind (En (Nm 0) (Hs (Dt 2)), L 4) (Read 1);
Bind (Nm 0, L 5) (Decr (L 4) (L 3));
Csrt (L 5) Name;
Comm "sending (Nm 0) on (Ch 1)";
Evnt (Snd (L 1) (L 5))
"#;
