//! Executes a proc against the runtime model and an environment of
//! parameters and inbound messages, producing a store and a transcript.
//! Execution halts at the first failed check or partial-operation
//! failure.
//!
//! [`honest_env`] builds environments under which compilable roles run
//! the way a compliant peer would drive them: negative-polarity atoms
//! get fresh values, positive-polarity material mirrors what the proc
//! itself generates, and encryption occurrences are either fresh per
//! occurrence or shared per symbolic encryption.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compiler::compile;
use crate::proc_ir::{Expr, Loc, Proc, Stmt};
use crate::runtime::{
    rt_decr, rt_encr_check, rt_frst, rt_gen, rt_hash, rt_kypr, rt_pair, rt_pubof, rt_quote,
    rt_scnd, rt_sort, RtVal, TagSource,
};
use crate::semantics::Transcript;
use crate::terms::{is_elementary, Act, Role, Sort, Term};

/// A partial map from locations to runtime values: exactly the locations
/// bound so far during an execution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Store {
    map: BTreeMap<Loc, RtVal>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Loc, RtVal)>) -> Store {
        Store {
            map: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, loc: Loc) -> Option<&RtVal> {
        self.map.get(&loc)
    }

    pub fn insert(&mut self, loc: Loc, value: RtVal) {
        self.map.insert(loc, value);
    }

    pub fn entries(&self) -> impl Iterator<Item = (Loc, &RtVal)> {
        self.map.iter().map(|(l, v)| (*l, v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// The inputs of one execution: parameter values consumed in index
/// order, inbound messages consumed in read order, and the tag source
/// feeding encryption.
#[derive(Debug, Clone)]
pub struct ExecEnv {
    pub params: Vec<RtVal>,
    pub inbound: Vec<RtVal>,
    pub tags: TagSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    FrstOnNonPair,
    ScndOnNonPair,
    DecryptFailed,
    SortMismatch,
    SameMismatch,
    KeyPairMismatch,
    HashMismatch,
    QuoteMismatch,
    InputExhausted,
    PubOfFailed,
    InvalidGenerate,
    UnboundLocation,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Where and why an execution halted.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("statement {stmt_index}: {reason}")]
pub struct ExecFailure {
    pub stmt_index: usize,
    pub reason: FailureReason,
}

struct Session<'a> {
    store: Store,
    transcript: Transcript,
    env: &'a mut ExecEnv,
    next_param: usize,
    next_read: usize,
}

impl<'a> Session<'a> {
    fn value(&self, loc: Loc, index: usize) -> Result<RtVal, ExecFailure> {
        self.store.get(loc).cloned().ok_or(ExecFailure {
            stmt_index: index,
            reason: FailureReason::UnboundLocation,
        })
    }
}

/// Run `p` under `env`. On success the store satisfies every bind and
/// check clause, and the transcript is the trace of `p` mapped through
/// the store.
pub fn exec(p: &Proc, env: &mut ExecEnv) -> Result<(Store, Transcript), ExecFailure> {
    let mut s = Session {
        store: Store::new(),
        transcript: Vec::new(),
        env,
        next_param: 0,
        next_read: 0,
    };

    for (index, stmt) in p.stmts.iter().enumerate() {
        let fail = |reason| ExecFailure {
            stmt_index: index,
            reason,
        };
        match stmt {
            Stmt::Comm(_) => {}
            Stmt::Evnt(act) => {
                let event = match act {
                    // The event transcribes the value before its bind
                    // consumes it.
                    Act::Prm(_) => Act::Prm(
                        s.env
                            .params
                            .get(s.next_param)
                            .cloned()
                            .ok_or(fail(FailureReason::InputExhausted))?,
                    ),
                    Act::Rcv(ch, _) => Act::Rcv(
                        s.value(*ch, index)?,
                        s.env
                            .inbound
                            .get(s.next_read)
                            .cloned()
                            .ok_or(fail(FailureReason::InputExhausted))?,
                    ),
                    Act::Snd(ch, m) => Act::Snd(s.value(*ch, index)?, s.value(*m, index)?),
                    Act::Ret(m) => Act::Ret(s.value(*m, index)?),
                };
                s.transcript.push(event);
            }
            Stmt::Bind(_, v, e) => {
                let value =
                    match e {
                        Expr::Param(n) => {
                            let value = s
                                .env
                                .params
                                .get(*n as usize - 1)
                                .cloned()
                                .ok_or(fail(FailureReason::InputExhausted))?;
                            s.next_param = s.next_param.max(*n as usize);
                            value
                        }
                        Expr::Read(n) => {
                            let value = s
                                .env
                                .inbound
                                .get(*n as usize - 1)
                                .cloned()
                                .ok_or(fail(FailureReason::InputExhausted))?;
                            s.next_read = s.next_read.max(*n as usize);
                            value
                        }
                        Expr::PairE(a, b) => rt_pair(&s.value(*a, index)?, &s.value(*b, index)?),
                        Expr::Frst(a) => rt_frst(&s.value(*a, index)?)
                            .ok_or(fail(FailureReason::FrstOnNonPair))?,
                        Expr::Scnd(a) => rt_scnd(&s.value(*a, index)?)
                            .ok_or(fail(FailureReason::ScndOnNonPair))?,
                        Expr::EncrE(a, b) => {
                            let plain = s.value(*a, index)?;
                            let key = s.value(*b, index)?;
                            RtVal::enc(plain, key, s.env.tags.next_tag())
                        }
                        Expr::DecrE(a, b) => rt_decr(&s.value(*a, index)?, &s.value(*b, index)?)
                            .ok_or(fail(FailureReason::DecryptFailed))?,
                        Expr::HashE(a) => rt_hash(&s.value(*a, index)?),
                        Expr::QuotE(str) => rt_quote(str),
                        Expr::PubOf(a) => rt_pubof(&s.value(*a, index)?)
                            .ok_or(fail(FailureReason::PubOfFailed))?,
                        Expr::Genr(n, sort) => {
                            rt_gen(*n, *sort).ok_or(fail(FailureReason::InvalidGenerate))?
                        }
                    };
                s.store.insert(*v, value);
            }
            Stmt::Csrt(v, sort) => {
                if rt_sort(&s.value(*v, index)?) != *sort {
                    return Err(fail(FailureReason::SortMismatch));
                }
            }
            Stmt::Csame(a, b) => {
                if s.value(*a, index)? != s.value(*b, index)? {
                    return Err(fail(FailureReason::SameMismatch));
                }
            }
            Stmt::Ckypr(a, b) => {
                if !rt_kypr(&s.value(*a, index)?, &s.value(*b, index)?) {
                    return Err(fail(FailureReason::KeyPairMismatch));
                }
            }
            Stmt::Chash(vh, vt) => {
                if s.value(*vh, index)? != rt_hash(&s.value(*vt, index)?) {
                    return Err(fail(FailureReason::HashMismatch));
                }
            }
            Stmt::Cquot(v, str) => {
                if s.value(*v, index)? != rt_quote(str) {
                    return Err(fail(FailureReason::QuoteMismatch));
                }
            }
        }
    }

    Ok((s.store, s.transcript))
}

/// How the honest oracle treats repeated symbolic encryptions inside the
/// messages it fabricates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HonestMode {
    /// Every encryption occurrence draws a fresh tag.
    Fresh,
    /// One runtime value per distinct symbolic encryption, reusing the
    /// proc's own constructed value when it exists.
    SharedEncryption,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagKind {
    Counter,
    Seeded,
}

/// Build an environment a compliant peer could produce for `role`, which
/// must compile. See [`honest_env_with_tags`]; the proc's tag source is
/// seeded.
pub fn honest_env(role: &Role, mode: HonestMode, seed: u64) -> ExecEnv {
    honest_env_with_tags(role, mode, seed, TagKind::Seeded)
}

/// Build an honest environment, choosing the proc-side tag source.
///
/// Negative-polarity elementary terms are assigned fresh atoms (key
/// pairs consistently); positive-polarity terms mirror the proc's own
/// generated values, which is what lets a role that receives a hash of
/// its own fresh data run successfully. The oracle shadow-executes the
/// proc with an identical tag source so that, in shared mode, a received
/// encryption can reuse the exact value the proc constructed.
pub fn honest_env_with_tags(role: &Role, mode: HonestMode, seed: u64, tags: TagKind) -> ExecEnv {
    let proc = compile(role).expect("honest_env requires a compilable role");
    let make_tags = || match tags {
        TagKind::Counter => TagSource::counter(),
        TagKind::Seeded => TagSource::seeded(seed),
    };

    // Seed the assignment with everything the proc generates at
    // initialization, so the oracle mirrors generated atoms and both
    // halves of generated key pairs no matter which half it meets
    // first.
    let mut assignment: BTreeMap<Term, RtVal> = BTreeMap::new();
    let mut init_values: BTreeMap<crate::proc_ir::Loc, RtVal> = BTreeMap::new();
    for (t, v, e) in proc.binds() {
        match e {
            Expr::Genr(n, sort) => {
                if let Some(value) = rt_gen(*n, *sort) {
                    init_values.insert(v, value.clone());
                    assignment.insert(t.clone(), value);
                }
            }
            Expr::PubOf(src) => {
                if let Some(value) = init_values.get(src).and_then(rt_pubof) {
                    init_values.insert(v, value.clone());
                    assignment.insert(t.clone(), value);
                }
            }
            _ => {}
        }
    }

    let mut oracle = Oracle {
        assignment,
        // Oracle-fabricated tags and atom ids live far away from the
        // proc's own, so fresh-mode values never collide with mirrored
        // ones.
        own_tags: match tags {
            TagKind::Counter => TagSource::counter_from(1_000_000),
            TagKind::Seeded => TagSource::seeded(seed ^ 0x9e37_79b9_7f4a_7c15),
        },
        ids: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d)),
        shared: BTreeMap::new(),
        mode,
        proc: proc.clone(),
    };

    let mut mirror = make_tags();
    let mut store = Store::new();
    let mut params = Vec::new();
    let mut inbound = Vec::new();
    let mut action_idx = 0usize;
    let mut alive = true;

    for stmt in &proc.stmts {
        match stmt {
            Stmt::Evnt(act) => {
                match act {
                    Act::Prm(_) => {
                        if let Some(Act::Prm(t)) = role.get(action_idx) {
                            let value = oracle.eval(t, &store);
                            params.push(value);
                        }
                    }
                    Act::Rcv(..) => {
                        if let Some(Act::Rcv(_, m)) = role.get(action_idx) {
                            let value = oracle.eval(m, &store);
                            inbound.push(value);
                        }
                    }
                    _ => {}
                }
                action_idx += 1;
            }
            Stmt::Bind(_, v, e) if alive => {
                let computed = match e {
                    Expr::Param(n) => params.get(*n as usize - 1).cloned(),
                    Expr::Read(n) => inbound.get(*n as usize - 1).cloned(),
                    Expr::PairE(a, b) => match (store.get(*a), store.get(*b)) {
                        (Some(x), Some(y)) => Some(rt_pair(x, y)),
                        _ => None,
                    },
                    Expr::Frst(a) => store.get(*a).and_then(rt_frst),
                    Expr::Scnd(a) => store.get(*a).and_then(rt_scnd),
                    Expr::EncrE(a, b) => match (store.get(*a), store.get(*b)) {
                        (Some(x), Some(y)) => {
                            Some(RtVal::enc(x.clone(), y.clone(), mirror.next_tag()))
                        }
                        _ => None,
                    },
                    Expr::DecrE(a, b) => match (store.get(*a), store.get(*b)) {
                        (Some(x), Some(y)) => rt_decr(x, y),
                        _ => None,
                    },
                    Expr::HashE(a) => store.get(*a).map(rt_hash),
                    Expr::QuotE(s) => Some(rt_quote(s)),
                    Expr::PubOf(a) => store.get(*a).and_then(rt_pubof),
                    Expr::Genr(n, sort) => rt_gen(*n, *sort),
                };
                match computed {
                    Some(value) => store.insert(*v, value),
                    // A failing shadow operation means the real run will
                    // halt here too; remaining messages are built without
                    // store mirroring.
                    None => alive = false,
                }
            }
            _ => {}
        }
    }

    ExecEnv {
        params,
        inbound,
        tags: make_tags(),
    }
}

struct Oracle {
    assignment: BTreeMap<Term, RtVal>,
    own_tags: TagSource,
    ids: ChaCha8Rng,
    shared: BTreeMap<Term, RtVal>,
    mode: HonestMode,
    proc: Proc,
}

impl Oracle {
    fn fresh_id(&mut self) -> u64 {
        self.ids.gen_range(1_000u64..=u32::MAX as u64)
    }

    fn elementary_value(&mut self, t: &Term) -> RtVal {
        // Generated material was seeded into the assignment upfront;
        // anything left is negative polarity and gets fresh values.
        if let Some(v) = self.assignment.get(t) {
            return v.clone();
        }
        let value = match t {
            Term::Ik(_) | Term::Ak(_) => {
                let id = self.fresh_id();
                let (pri, pub_) = (RtVal::Priv(id), RtVal::Pub(id));
                match t {
                    Term::Ik(n) => {
                        self.assignment.insert(Term::Ak(*n), pub_);
                        pri
                    }
                    _ => {
                        if let Term::Ak(n) = t {
                            self.assignment.insert(Term::Ik(*n), pri);
                        }
                        pub_
                    }
                }
            }
            // A generic variable stands for an arbitrary message.
            Term::Mg(_) => RtVal::Atom(Sort::Data, self.fresh_id()),
            other => {
                let sort = crate::terms::sort_of(other);
                match sort {
                    Sort::Ikey | Sort::Akey | Sort::Mesg => {
                        RtVal::Atom(Sort::Data, self.fresh_id())
                    }
                    base => RtVal::Atom(base, self.fresh_id()),
                }
            }
        };
        self.assignment.insert(t.clone(), value.clone());
        value
    }

    fn eval(&mut self, t: &Term, store: &Store) -> RtVal {
        match t {
            Term::Pr(a, b) => {
                let x = self.eval(a, store);
                let y = self.eval(b, store);
                rt_pair(&x, &y)
            }
            Term::Hs(a) => rt_hash(&self.eval(a, store)),
            Term::Qt(s) => rt_quote(s),
            Term::En(plain, key) => {
                if self.mode == HonestMode::SharedEncryption {
                    // Reuse the value the proc itself constructed for
                    // this symbolic encryption, when it already exists.
                    let constructed = self
                        .proc
                        .binds()
                        .find_map(|(bt, v, _)| (bt == t).then_some(v))
                        .and_then(|v| store.get(v).cloned());
                    if let Some(v) = constructed {
                        return v;
                    }
                    if let Some(v) = self.shared.get(t) {
                        return v.clone();
                    }
                }
                let p = self.eval(plain, store);
                let k = self.eval(key, store);
                let value = RtVal::enc(p, k, self.own_tags.next_tag());
                if self.mode == HonestMode::SharedEncryption {
                    self.shared.insert(t.clone(), value.clone());
                }
                value
            }
            elementary => {
                debug_assert!(is_elementary(elementary));
                self.elementary_value(elementary)
            }
        }
    }
}

/// One failed store clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreViolation {
    pub stmt_index: usize,
    pub description: String,
}

impl fmt::Display for StoreViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "statement {}: {}", self.stmt_index, self.description)
    }
}

/// Re-verify every bind and check clause of `p` against `s`,
/// independently of how `s` was produced. Event statements impose
/// nothing; generation, parameter, and read binds impose nothing beyond
/// definedness of what the clauses mention.
pub fn check_store(p: &Proc, s: &Store) -> Vec<StoreViolation> {
    let mut out = Vec::new();
    let mut violated = |index: usize, description: String| {
        out.push(StoreViolation {
            stmt_index: index,
            description,
        });
    };
    let lookup = |loc: Loc| s.get(loc);

    for (index, stmt) in p.stmts.iter().enumerate() {
        match stmt {
            Stmt::Evnt(_) | Stmt::Comm(_) => {}
            Stmt::Csrt(v, sort) => match lookup(*v) {
                Some(val) if rt_sort(val) == *sort => {}
                _ => violated(index, format!("value at {v} must have sort {sort}")),
            },
            Stmt::Csame(a, b) => match (lookup(*a), lookup(*b)) {
                (Some(x), Some(y)) if x == y => {}
                _ => violated(index, format!("values at {a} and {b} must be equal")),
            },
            Stmt::Ckypr(a, b) => match (lookup(*a), lookup(*b)) {
                (Some(x), Some(y)) if rt_kypr(x, y) => {}
                _ => violated(index, format!("values at {a} and {b} must make a key pair")),
            },
            Stmt::Chash(vh, vt) => match (lookup(*vh), lookup(*vt)) {
                (Some(h), Some(t)) if *h == rt_hash(t) => {}
                _ => violated(
                    index,
                    format!("value at {vh} must be the hash of the value at {vt}"),
                ),
            },
            Stmt::Cquot(v, str) => match lookup(*v) {
                Some(val) if *val == rt_quote(str) => {}
                _ => violated(index, format!("value at {v} must be the quote {str:?}")),
            },
            Stmt::Bind(_, v, e) => {
                let ok = match e {
                    Expr::Param(_) | Expr::Read(_) | Expr::Genr(..) => true,
                    Expr::PairE(a, b) => matches!(
                        (lookup(*a), lookup(*b), lookup(*v)),
                        (Some(x), Some(y), Some(z)) if rt_pair(x, y) == *z
                    ),
                    Expr::EncrE(a, b) => matches!(
                        (lookup(*a), lookup(*b), lookup(*v)),
                        (Some(x), Some(y), Some(z)) if rt_encr_check(x, y, z)
                    ),
                    Expr::HashE(a) => matches!(
                        (lookup(*a), lookup(*v)),
                        (Some(x), Some(z)) if rt_hash(x) == *z
                    ),
                    Expr::PubOf(a) => matches!(
                        (lookup(*a), lookup(*v)),
                        (Some(x), Some(z)) if rt_pubof(x).as_ref() == Some(z)
                    ),
                    Expr::Frst(a) => matches!(
                        (lookup(*a), lookup(*v)),
                        (Some(x), Some(z)) if rt_frst(x).as_ref() == Some(z)
                    ),
                    Expr::Scnd(a) => matches!(
                        (lookup(*a), lookup(*v)),
                        (Some(x), Some(z)) if rt_scnd(x).as_ref() == Some(z)
                    ),
                    Expr::DecrE(a, b) => matches!(
                        (lookup(*a), lookup(*b), lookup(*v)),
                        (Some(x), Some(y), Some(z)) if rt_decr(x, y).as_ref() == Some(z)
                    ),
                    Expr::QuotE(str) => {
                        matches!(lookup(*v), Some(z) if *z == rt_quote(str))
                    }
                };
                if !ok {
                    violated(index, format!("store does not respect the bind at {v}"));
                }
            }
        }
    }

    out
}
