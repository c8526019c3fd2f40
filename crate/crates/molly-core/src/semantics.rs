//! Transcript semantics. A transcript is the observable behavior of one
//! execution: a list of runtime-value actions. A transcript is valid for
//! a role when a valuation — a term-to-value relation, functional on
//! elementary terms and compatible with the runtime operators — induces
//! it pointwise. A transcript is valid for a proc when a store for the
//! proc maps its trace onto it.
//!
//! The reflection construction composes the binding relation of a
//! compiled proc with a store to obtain the valuation witnessing that
//! every proc execution is an execution of the source role.

use std::collections::BTreeSet;
use std::fmt;

use crate::interpreter::{check_store, Store};
use crate::proc_ir::{trace, Expr, Proc};
use crate::runtime::{rt_decr, rt_encr_check, rt_hash, rt_kypr, rt_pair, rt_quote, rt_sort, RtVal};
use crate::terms::{act_map_rel, inverse, is_elementary, sort_of, subterms, Act, Term};

/// A list of runtime-value actions; raw until validated against a role
/// or a proc.
pub type Transcript = Vec<Act<RtVal>>;

/// A finite relation from terms to runtime values. Whether it is a
/// valuation is a checked property, not a construction invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    pairs: BTreeSet<(Term, RtVal)>,
}

impl Valuation {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Term, RtVal)>) -> Valuation {
        Valuation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Term, RtVal)> {
        self.pairs.iter()
    }

    pub fn contains(&self, t: &Term, r: &RtVal) -> bool {
        self.pairs.contains(&(t.clone(), r.clone()))
    }

    pub fn values_of<'a>(&'a self, t: &'a Term) -> impl Iterator<Item = &'a RtVal> {
        self.pairs
            .iter()
            .filter_map(move |(bt, r)| (bt == t).then_some(r))
    }

    pub fn relates(&self, t: &Term) -> bool {
        self.values_of(t).next().is_some()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &Valuation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

/// A failed valuation clause, numbered as in the definition: 1
/// functional on elementary terms, 2 respects sorts, 3 pairing, 4
/// hashing, 5 quotes, 6 key pairs, 7 disjunctive encryption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationViolation {
    pub clause: u8,
    pub term: Term,
    pub description: String,
}

impl fmt::Display for ValuationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {}: {}", self.clause, self.description)
    }
}

fn violation(clause: u8, term: &Term, description: String) -> ValuationViolation {
    ValuationViolation {
        clause,
        term: term.clone(),
        description,
    }
}

/// Check the seven valuation clauses. The sort clause applies to
/// elementary terms of base sort; generic variables stand for arbitrary
/// messages and are only constrained by functionality.
pub fn is_valuation(v: &Valuation) -> Vec<ValuationViolation> {
    let mut out = Vec::new();
    for (t, r) in v.pairs() {
        if is_elementary(t) {
            for other in v.values_of(t) {
                if other != r && other < r {
                    out.push(violation(
                        1,
                        t,
                        format!("elementary term related to distinct values {other:?} and {r:?}"),
                    ));
                }
            }
            if sort_of(t).is_base() && rt_sort(r) != sort_of(t) {
                out.push(violation(
                    2,
                    t,
                    format!(
                        "term of sort {} related to value of sort {}",
                        sort_of(t),
                        rt_sort(r)
                    ),
                ));
            }
        }
        match t {
            Term::Pr(t1, t2) => {
                let ok = match r {
                    RtVal::Pair(a, b) => v.contains(t1, a) && v.contains(t2, b),
                    _ => false,
                };
                if !ok {
                    out.push(violation(3, t, "pairing not respected".into()));
                }
            }
            Term::Hs(t1) => {
                let ok = match r {
                    RtVal::Hash(inner) => v.contains(t1, inner),
                    _ => false,
                };
                if !ok {
                    out.push(violation(4, t, "hashing not respected".into()));
                }
            }
            Term::Qt(s) => {
                if *r != rt_quote(s) {
                    out.push(violation(5, t, "quote not respected".into()));
                }
            }
            Term::En(plain, key) => {
                let encr_ok = v
                    .values_of(plain)
                    .any(|rp| v.values_of(key).any(|rke| rt_encr_check(rp, rke, r)));
                let decr_ok = v.values_of(plain).any(|rp| {
                    v.values_of(&inverse(key))
                        .any(|rkd| rt_decr(r, rkd).as_ref() == Some(rp))
                });
                if !encr_ok && !decr_ok {
                    out.push(violation(
                        7,
                        t,
                        "neither the encr nor the decr condition holds".into(),
                    ));
                }
            }
            _ => {}
        }
    }
    // Key pairs: every pair of images must be a runtime key pair.
    for (t1, r1) in v.pairs() {
        if let Term::Ik(n) = t1 {
            let t2 = Term::Ak(*n);
            for r2 in v.values_of(&t2) {
                if !rt_kypr(r1, r2) {
                    out.push(violation(
                        6,
                        t1,
                        format!("images {r1:?} and {r2:?} do not make a key pair"),
                    ));
                }
            }
        }
    }
    out
}

/// Does `v` relate `role` to `tr` pointwise?
pub fn induces(v: &Valuation, role: &[Act<Term>], tr: &Transcript) -> bool {
    let mut rel = |t: &Term, r: &RtVal| v.contains(t, r);
    crate::terms::list_map_rel(&mut rel, role, tr)
}

/// Why a transcript is not valid for a role under a candidate valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoleTranscriptViolation {
    Valuation(ValuationViolation),
    LengthMismatch {
        role_len: usize,
        transcript_len: usize,
    },
    Induction {
        index: usize,
    },
}

impl fmt::Display for RoleTranscriptViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleTranscriptViolation::Valuation(v) => write!(f, "valuation {v}"),
            RoleTranscriptViolation::LengthMismatch {
                role_len,
                transcript_len,
            } => write!(
                f,
                "role has {role_len} actions but transcript has {transcript_len}"
            ),
            RoleTranscriptViolation::Induction { index } => {
                write!(f, "event {index} is not induced by the valuation")
            }
        }
    }
}

/// Witness-checked role validity: `v` must be a valuation and must
/// induce `tr` from `role`.
pub fn role_transcript_valid(
    role: &[Act<Term>],
    tr: &Transcript,
    v: &Valuation,
) -> Vec<RoleTranscriptViolation> {
    let mut out: Vec<RoleTranscriptViolation> = is_valuation(v)
        .into_iter()
        .map(RoleTranscriptViolation::Valuation)
        .collect();
    if role.len() != tr.len() {
        out.push(RoleTranscriptViolation::LengthMismatch {
            role_len: role.len(),
            transcript_len: tr.len(),
        });
        return out;
    }
    for (index, (action, event)) in role.iter().zip(tr.iter()).enumerate() {
        let mut rel = |t: &Term, r: &RtVal| v.contains(t, r);
        if !act_map_rel(&mut rel, action, event) {
            out.push(RoleTranscriptViolation::Induction { index });
        }
    }
    out
}

/// The reflection construction: compose the binding relation of `p` with
/// the store, relating every bound term to the value stored at each of
/// its locations.
pub fn reflect_valuation(p: &Proc, s: &Store) -> Valuation {
    let mut pairs = BTreeSet::new();
    for (t, v, _) in p.binds() {
        if let Some(r) = s.get(v) {
            pairs.insert((t.clone(), r.clone()));
        }
    }
    Valuation { pairs }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("a store witness is required for procs with generation or encryption binds")]
    WitnessRequired,
}

/// Why a transcript is not valid for a proc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcTranscriptViolation {
    Store(String),
    TraceMismatch {
        index: usize,
    },
    TraceLength {
        trace_len: usize,
        transcript_len: usize,
    },
    Replay {
        stmt_index: usize,
        description: String,
    },
}

impl fmt::Display for ProcTranscriptViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcTranscriptViolation::Store(s) => write!(f, "store: {s}"),
            ProcTranscriptViolation::TraceMismatch { index } => {
                write!(f, "transcript event {index} differs from the mapped trace")
            }
            ProcTranscriptViolation::TraceLength {
                trace_len,
                transcript_len,
            } => write!(
                f,
                "trace has {trace_len} events but transcript has {transcript_len}"
            ),
            ProcTranscriptViolation::Replay {
                stmt_index,
                description,
            } => write!(f, "replay of statement {stmt_index}: {description}"),
        }
    }
}

/// Check that `tr` is a valid transcript for `p`. A store witness is
/// required when `p` generates values or encrypts, since those values
/// cannot be reconstructed from the transcript; otherwise the store is
/// replayed from the transcript's parameter and read values.
pub fn proc_transcript_valid(
    p: &Proc,
    tr: &Transcript,
    witness: Option<&Store>,
) -> Result<Vec<ProcTranscriptViolation>, SemanticsError> {
    let store = match witness {
        Some(s) => s.clone(),
        None => {
            let needs_witness = p
                .binds()
                .any(|(_, _, e)| matches!(e, Expr::Genr(..) | Expr::EncrE(..)));
            if needs_witness {
                return Err(SemanticsError::WitnessRequired);
            }
            match replay_store(p, tr) {
                Ok(s) => s,
                Err(v) => return Ok(vec![v]),
            }
        }
    };

    let mut out: Vec<ProcTranscriptViolation> = check_store(p, &store)
        .into_iter()
        .map(|v| ProcTranscriptViolation::Store(v.to_string()))
        .collect();

    let pr_trace = trace(p);
    if pr_trace.len() != tr.len() {
        out.push(ProcTranscriptViolation::TraceLength {
            trace_len: pr_trace.len(),
            transcript_len: tr.len(),
        });
        return out_ok(out);
    }
    for (index, (ev, got)) in pr_trace.iter().zip(tr.iter()).enumerate() {
        let mut rel = |l: &crate::proc_ir::Loc, r: &RtVal| store.get(*l) == Some(r);
        if !act_map_rel(&mut rel, ev, got) {
            out.push(ProcTranscriptViolation::TraceMismatch { index });
        }
    }
    out_ok(out)
}

fn out_ok(
    out: Vec<ProcTranscriptViolation>,
) -> Result<Vec<ProcTranscriptViolation>, SemanticsError> {
    Ok(out)
}

/// Rebuild the store of a generation-free, encryption-free proc by
/// replaying it with parameter and read values harvested from the
/// transcript.
fn replay_store(p: &Proc, tr: &Transcript) -> Result<Store, ProcTranscriptViolation> {
    let mut params: Vec<RtVal> = Vec::new();
    let mut reads: Vec<RtVal> = Vec::new();
    for event in tr {
        match event {
            Act::Prm(r) => params.push(r.clone()),
            Act::Rcv(_, r) => reads.push(r.clone()),
            _ => {}
        }
    }
    let mut store = Store::new();
    for (stmt_index, stmt) in p.stmts.iter().enumerate() {
        if let crate::proc_ir::Stmt::Bind(_, v, e) = stmt {
            let fail = |description: String| ProcTranscriptViolation::Replay {
                stmt_index,
                description,
            };
            let value = match e {
                Expr::Param(n) => params
                    .get(*n as usize - 1)
                    .cloned()
                    .ok_or_else(|| fail("transcript supplies too few parameters".into()))?,
                Expr::Read(n) => reads
                    .get(*n as usize - 1)
                    .cloned()
                    .ok_or_else(|| fail("transcript supplies too few received values".into()))?,
                Expr::PairE(a, b) => {
                    let (x, y) = two(&store, *a, *b).map_err(fail)?;
                    rt_pair(&x, &y)
                }
                Expr::Frst(a) => crate::runtime::rt_frst(&one(&store, *a).map_err(fail)?)
                    .ok_or_else(|| fail("first projection of a non-pair".into()))?,
                Expr::Scnd(a) => crate::runtime::rt_scnd(&one(&store, *a).map_err(fail)?)
                    .ok_or_else(|| fail("second projection of a non-pair".into()))?,
                Expr::DecrE(a, b) => {
                    let (x, y) = two(&store, *a, *b).map_err(fail)?;
                    rt_decr(&x, &y).ok_or_else(|| fail("decryption failed".into()))?
                }
                Expr::HashE(a) => rt_hash(&one(&store, *a).map_err(fail)?),
                Expr::QuotE(s) => rt_quote(s),
                Expr::PubOf(a) => crate::runtime::rt_pubof(&one(&store, *a).map_err(fail)?)
                    .ok_or_else(|| fail("public derivation of a non-private key".into()))?,
                Expr::Genr(..) | Expr::EncrE(..) => {
                    unreachable!("witness-free validation rejects these upfront")
                }
            };
            store.insert(*v, value);
        }
    }
    Ok(store)
}

fn one(store: &Store, a: crate::proc_ir::Loc) -> Result<RtVal, String> {
    store
        .get(a)
        .cloned()
        .ok_or_else(|| format!("location {a} is unbound"))
}

fn two(
    store: &Store,
    a: crate::proc_ir::Loc,
    b: crate::proc_ir::Loc,
) -> Result<(RtVal, RtVal), String> {
    Ok((one(store, a)?, one(store, b)?))
}

/// The total runtime inverse used by completion: key pairs swap, all
/// other values are self-inverse. Only definable in the model; the
/// private-from-public direction is never computed at runtime.
fn rt_inverse_total(r: &RtVal) -> RtVal {
    match r {
        RtVal::Priv(n) => RtVal::Pub(*n),
        RtVal::Pub(n) => RtVal::Priv(*n),
        other => other.clone(),
    }
}

/// Extend a valuation with the inverses of everything it relates. The
/// completion of a valuation is a strong valuation.
pub fn completion(v: &Valuation) -> Valuation {
    let mut pairs = v.pairs.clone();
    for (t, r) in v.pairs() {
        pairs.insert((inverse(t), rt_inverse_total(r)));
    }
    Valuation { pairs }
}

/// The strong valuation conditions: the valuation clauses with the
/// encryption condition mandatory and key-pair images required to exist
/// in both directions.
pub fn is_strong_valuation(v: &Valuation) -> Vec<ValuationViolation> {
    let mut out: Vec<ValuationViolation> = is_valuation(v)
        .into_iter()
        .filter(|viol| viol.clause != 7)
        .collect();

    for (t, r) in v.pairs() {
        match t {
            Term::En(plain, key) => {
                let encr_ok = v
                    .values_of(plain)
                    .any(|rp| v.values_of(key).any(|rke| rt_encr_check(rp, rke, r)));
                if !encr_ok {
                    out.push(violation(
                        7,
                        t,
                        "strong encryption: the encr condition does not hold".into(),
                    ));
                }
            }
            Term::Ik(n) => {
                let partner = Term::Ak(*n);
                if !v.relates(&partner) {
                    out.push(violation(
                        6,
                        t,
                        "strong key pairs: public partner has no image".into(),
                    ));
                }
                for r2 in v.values_of(&partner) {
                    if !rt_kypr(r, r2) {
                        out.push(violation(6, t, "strong key pairs: images mismatch".into()));
                    }
                }
            }
            Term::Ak(n) => {
                let partner = Term::Ik(*n);
                if !v.relates(&partner) {
                    out.push(violation(
                        6,
                        t,
                        "strong key pairs: private partner has no image".into(),
                    ));
                }
                for r1 in v.values_of(&partner) {
                    if !rt_kypr(r1, r) {
                        out.push(violation(6, t, "strong key pairs: images mismatch".into()));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Bounded brute-force search for a valuation inducing `tr` from `role`:
/// a small-instance oracle for the witness-checked definition. Starts
/// from the pairs the induction forces and closes them downward,
/// branching on the two encryption routes.
pub fn search_valuation(role: &[Act<Term>], tr: &Transcript) -> Option<Valuation> {
    if role.len() != tr.len() {
        return None;
    }
    let mut forced: Vec<(Term, RtVal)> = Vec::new();
    for (action, event) in role.iter().zip(tr.iter()) {
        let (ts, rs) = (action.payloads(), event.payloads());
        if action.constructor_name() != event.constructor_name() {
            return None;
        }
        for (t, r) in ts.into_iter().zip(rs) {
            forced.push((t.clone(), r.clone()));
        }
    }
    let mut pairs = BTreeSet::new();
    if close_pairs(&forced, &mut pairs, 0) {
        let v = Valuation { pairs };
        if is_valuation(&v).is_empty() && induces(&v, role, tr) {
            return Some(v);
        }
    }
    None
}

fn close_pairs(pending: &[(Term, RtVal)], acc: &mut BTreeSet<(Term, RtVal)>, depth: usize) -> bool {
    if depth > 64 {
        return false;
    }
    let mut queue: Vec<(Term, RtVal)> = pending.to_vec();
    while let Some((t, r)) = queue.pop() {
        if acc.contains(&(t.clone(), r.clone())) {
            continue;
        }
        if is_elementary(&t) {
            // Functionality on elementary terms.
            if acc.iter().any(|(bt, br)| *bt == t && *br != r) {
                return false;
            }
            if sort_of(&t).is_base() && rt_sort(&r) != sort_of(&t) {
                return false;
            }
            acc.insert((t, r));
            continue;
        }
        match (&t, &r) {
            (Term::Pr(t1, t2), RtVal::Pair(a, b)) => {
                queue.push(((**t1).clone(), (**a).clone()));
                queue.push(((**t2).clone(), (**b).clone()));
                acc.insert((t.clone(), r.clone()));
            }
            (Term::Hs(t1), RtVal::Hash(inner)) => {
                queue.push(((**t1).clone(), (**inner).clone()));
                acc.insert((t.clone(), r.clone()));
            }
            (Term::Qt(s), value) => {
                if *value != rt_quote(s) {
                    return false;
                }
                acc.insert((t.clone(), r.clone()));
            }
            (
                Term::En(plain, key),
                RtVal::Enc {
                    plain: rp, key: rk, ..
                },
            ) => {
                acc.insert((t.clone(), r.clone()));
                // Try the encr route first, then the decr route.
                let mut branch = acc.clone();
                let mut attempt = vec![
                    ((**plain).clone(), (**rp).clone()),
                    ((**key).clone(), (**rk).clone()),
                ];
                attempt.extend(queue.iter().cloned());
                if close_pairs(&attempt, &mut branch, depth + 1) {
                    *acc = branch;
                    return true;
                }
                let mut attempt = vec![
                    ((**plain).clone(), (**rp).clone()),
                    (inverse(key), rt_inverse_total(rk)),
                ];
                attempt.extend(queue.iter().cloned());
                let mut branch = acc.clone();
                if close_pairs(&attempt, &mut branch, depth + 1) {
                    *acc = branch;
                    return true;
                }
                return false;
            }
            _ => return false,
        }
    }
    true
}

/// All subterms occurring anywhere in a role.
pub fn role_subterms(role: &[Act<Term>]) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for action in role {
        for t in action.payloads() {
            out.extend(subterms(t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::TagSource;
    use crate::terms::Sort;

    fn data(id: u64) -> RtVal {
        RtVal::Atom(Sort::Data, id)
    }

    #[test]
    fn functionality_violation_is_reported() {
        let v = Valuation::from_pairs([(Term::Dt(1), data(1)), (Term::Dt(1), data(2))]);
        let violations = is_valuation(&v);
        assert!(violations.iter().any(|x| x.clause == 1));
    }

    #[test]
    fn pairing_clause() {
        let pair_term = Term::pr(Term::Dt(1), Term::Dt(2));
        let good = Valuation::from_pairs([
            (Term::Dt(1), data(1)),
            (Term::Dt(2), data(2)),
            (pair_term.clone(), rt_pair(&data(1), &data(2))),
        ]);
        assert!(is_valuation(&good).is_empty());

        let bad = Valuation::from_pairs([(pair_term, rt_pair(&data(1), &data(2)))]);
        assert!(is_valuation(&bad).iter().any(|x| x.clause == 3));
    }

    #[test]
    fn encryption_clause_is_disjunctive() {
        let enc_term = Term::en(Term::Nm(0), Term::Ak(2));
        let mut tags = TagSource::counter();
        let name = RtVal::Atom(Sort::Name, 0);
        let e = crate::runtime::rt_encrypt(&name, &RtVal::Pub(5), &mut tags);

        // Neither the key nor its inverse related: violation.
        let bad =
            Valuation::from_pairs([(Term::Nm(0), name.clone()), (enc_term.clone(), e.clone())]);
        assert!(is_valuation(&bad).iter().any(|x| x.clause == 7));

        // The decr route alone satisfies the clause.
        let decr_only = Valuation::from_pairs([
            (Term::Nm(0), name.clone()),
            (Term::Ik(2), RtVal::Priv(5)),
            (enc_term.clone(), e.clone()),
        ]);
        assert!(is_valuation(&decr_only).is_empty());
        // But not the strong condition.
        assert!(is_strong_valuation(&decr_only)
            .iter()
            .any(|x| x.clause == 7));
        // Completion repairs it.
        assert!(is_strong_valuation(&completion(&decr_only)).is_empty());
    }

    #[test]
    fn completion_of_key_free_valuation_is_identity() {
        let v = Valuation::from_pairs([
            (Term::Dt(1), data(1)),
            (
                Term::pr(Term::Dt(1), Term::Dt(1)),
                rt_pair(&data(1), &data(1)),
            ),
        ]);
        assert_eq!(completion(&v), v);
    }

    #[test]
    fn completion_adds_key_partners() {
        let v = Valuation::from_pairs([(Term::Ik(2), RtVal::Priv(5))]);
        let completed = completion(&v);
        assert!(completed.contains(&Term::Ak(2), &RtVal::Pub(5)));
        assert_eq!(completion(&completed), completed);
    }
}
