//! Shared inputs for the benchmarks: the shipped example roles plus a
//! synthetic wide role that stresses saturation.

use molly_core::terms::{Act, Role, Term};

pub fn example_roles() -> Vec<(&'static str, Role)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../roles");
    [
        "init1", "resp1", "genhash", "encr1", "encrsym", "fail2", "fail3", "dupsend",
    ]
    .into_iter()
    .map(|name| {
        let path = format!("{dir}/{name}.role");
        let text = std::fs::read_to_string(&path).expect("role fixture exists");
        let role = molly_core::syntax::parse_role(&text).expect("role fixture parses");
        (name, role)
    })
    .collect()
}

/// A role that receives a deeply paired message and retransmits nested
/// constructions over it, driving many elimination and introduction
/// firings.
pub fn wide_role(atoms: u32) -> Role {
    let mut payload = Term::Dt(1);
    for i in 2..=atoms {
        payload = Term::pr(payload, Term::Dt(i));
    }
    let hashed = Term::hs(payload.clone());
    vec![
        Act::Prm(Term::Ch(1)),
        Act::Rcv(Term::Ch(1), payload.clone()),
        Act::Snd(Term::Ch(1), Term::pr(hashed, payload)),
    ]
}
