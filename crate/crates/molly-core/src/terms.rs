//! The symbolic term algebra: sorts, terms, key pairs, actions, and roles.
//!
//! Terms are finite trees built from sorted atoms by pairing, encryption,
//! hashing, and quotation. A role is one participant's view of a protocol:
//! an ordered list of parameter, return, receive, and send actions over
//! terms.

use std::collections::BTreeSet;
use std::fmt;

/// The sort discipline shared by terms, proc expressions, and runtime
/// values. Every sort other than `Mesg` is a base sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Chan,
    Data,
    Name,
    Text,
    Skey,
    Akey,
    Ikey,
    Mesg,
}

impl Sort {
    pub const BASE: [Sort; 7] = [
        Sort::Chan,
        Sort::Data,
        Sort::Name,
        Sort::Text,
        Sort::Skey,
        Sort::Akey,
        Sort::Ikey,
    ];

    pub fn is_base(self) -> bool {
        self != Sort::Mesg
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Sort::Chan => "Chan",
            Sort::Data => "Data",
            Sort::Name => "Name",
            Sort::Text => "Text",
            Sort::Skey => "Skey",
            Sort::Akey => "Akey",
            Sort::Ikey => "Ikey",
            Sort::Mesg => "Mesg",
        };
        f.write_str(name)
    }
}

/// A symbolic message term.
///
/// `Ak(n)` and `Ik(n)` with equal index form a symbolic key pair: the
/// public and private halves of one asymmetric key. `Mg` is a generic
/// message variable of sort `Mesg`.
///
/// The derived `Ord` gives a total structural order (constructor rank,
/// then arguments) so that term sets and "first" choices are
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Ch(u32),
    Tx(u32),
    Dt(u32),
    Nm(u32),
    Sk(u32),
    Ak(u32),
    Ik(u32),
    Qt(String),
    Pr(Box<Term>, Box<Term>),
    En(Box<Term>, Box<Term>),
    Hs(Box<Term>),
    Mg(u32),
}

impl Term {
    pub fn pr(t1: Term, t2: Term) -> Term {
        Term::Pr(Box::new(t1), Box::new(t2))
    }

    pub fn en(plain: Term, key: Term) -> Term {
        Term::En(Box::new(plain), Box::new(key))
    }

    pub fn hs(t: Term) -> Term {
        Term::Hs(Box::new(t))
    }

    pub fn qt(s: impl Into<String>) -> Term {
        Term::Qt(s.into())
    }

    /// Number of constructor nodes; the size measure used by the
    /// saturation termination argument.
    pub fn size(&self) -> usize {
        match self {
            Term::Pr(a, b) | Term::En(a, b) => 1 + a.size() + b.size(),
            Term::Hs(a) => 1 + a.size(),
            _ => 1,
        }
    }
}

/// Sort assignment: atoms carry their base sort, everything else is `Mesg`.
pub fn sort_of(t: &Term) -> Sort {
    match t {
        Term::Ch(_) => Sort::Chan,
        Term::Tx(_) => Sort::Text,
        Term::Dt(_) => Sort::Data,
        Term::Nm(_) => Sort::Name,
        Term::Sk(_) => Sort::Skey,
        Term::Ak(_) => Sort::Akey,
        Term::Ik(_) => Sort::Ikey,
        _ => Sort::Mesg,
    }
}

/// A term is elementary when its top constructor is not `Pr`, `En`, `Hs`,
/// or `Qt`.
pub fn is_elementary(t: &Term) -> bool {
    !matches!(t, Term::Pr(..) | Term::En(..) | Term::Hs(..) | Term::Qt(..))
}

/// The term inverse: swaps the halves of a symbolic key pair and fixes
/// everything else.
pub fn inverse(t: &Term) -> Term {
    match t {
        Term::Ik(n) => Term::Ak(*n),
        Term::Ak(n) => Term::Ik(*n),
        _ => t.clone(),
    }
}

/// `(t1, t2)` is a symbolic key pair when they are the private and public
/// halves (in that order) of one asymmetric key.
pub fn is_key_pair(t1: &Term, t2: &Term) -> bool {
    matches!((t1, t2), (Term::Ik(n), Term::Ak(m)) if n == m)
}

/// Reflexive-transitive subterm closure under `Pr`, `En`, and `Hs`.
pub fn subterms(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    collect_subterms(t, &mut out);
    out
}

fn collect_subterms(t: &Term, out: &mut BTreeSet<Term>) {
    if !out.insert(t.clone()) {
        return;
    }
    match t {
        Term::Pr(a, b) | Term::En(a, b) => {
            collect_subterms(a, out);
            collect_subterms(b, out);
        }
        Term::Hs(a) => collect_subterms(a, out),
        _ => {}
    }
}

pub fn is_subterm(needle: &Term, haystack: &Term) -> bool {
    if needle == haystack {
        return true;
    }
    match haystack {
        Term::Pr(a, b) | Term::En(a, b) => is_subterm(needle, a) || is_subterm(needle, b),
        Term::Hs(a) => is_subterm(needle, a),
        _ => false,
    }
}

/// A protocol action over carrier `X`: parameters, returns, receptions,
/// and transmissions. The same shape is used at terms, locations, and
/// runtime values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Act<X> {
    Prm(X),
    Ret(X),
    Rcv(X, X),
    Snd(X, X),
}

impl<X> Act<X> {
    pub fn map<Y>(&self, mut f: impl FnMut(&X) -> Y) -> Act<Y> {
        match self {
            Act::Prm(x) => Act::Prm(f(x)),
            Act::Ret(x) => Act::Ret(f(x)),
            Act::Rcv(a, b) => Act::Rcv(f(a), f(b)),
            Act::Snd(a, b) => Act::Snd(f(a), f(b)),
        }
    }

    /// The payload positions of the action, in order.
    pub fn payloads(&self) -> Vec<&X> {
        match self {
            Act::Prm(x) | Act::Ret(x) => vec![x],
            Act::Rcv(a, b) | Act::Snd(a, b) => vec![a, b],
        }
    }

    pub fn constructor_name(&self) -> &'static str {
        match self {
            Act::Prm(_) => "Prm",
            Act::Ret(_) => "Ret",
            Act::Rcv(..) => "Rcv",
            Act::Snd(..) => "Snd",
        }
    }
}

/// Lift a relation pointwise over actions: constructors must match and
/// the relation must hold on every payload.
pub fn act_map_rel<X, Y>(r: &mut impl FnMut(&X, &Y) -> bool, a: &Act<X>, b: &Act<Y>) -> bool {
    match (a, b) {
        (Act::Prm(x), Act::Prm(y)) | (Act::Ret(x), Act::Ret(y)) => r(x, y),
        (Act::Rcv(x1, x2), Act::Rcv(y1, y2)) | (Act::Snd(x1, x2), Act::Snd(y1, y2)) => {
            r(x1, y1) && r(x2, y2)
        }
        _ => false,
    }
}

/// Lift a relation over equal-length lists of actions.
pub fn list_map_rel<X, Y>(
    r: &mut impl FnMut(&X, &Y) -> bool,
    xs: &[Act<X>],
    ys: &[Act<Y>],
) -> bool {
    xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(a, b)| act_map_rel(r, a, b))
}

/// One participant's view of a protocol, in execution order.
pub type Role = Vec<Act<Term>>;

/// Where a term first shows up in a role, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Absent,
}

/// Polarity of `t` in `role`: negative when the first event containing
/// `t` as a subterm is a parameter or reception, positive when it is a
/// return or transmission, absent when `t` never occurs.
pub fn polarity(role: &[Act<Term>], t: &Term) -> Polarity {
    for action in role {
        let occurs = action.payloads().iter().any(|p| is_subterm(t, p));
        if occurs {
            return match action {
                Act::Prm(_) | Act::Rcv(..) => Polarity::Negative,
                Act::Ret(_) | Act::Snd(..) => Polarity::Positive,
            };
        }
    }
    Polarity::Absent
}

/// The terms the role holds without constructing them: parameters and
/// whole received messages.
pub fn obtained_terms(role: &[Act<Term>]) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for action in role {
        match action {
            Act::Prm(t) => {
                out.insert(t.clone());
            }
            Act::Rcv(_, m) => {
                out.insert(m.clone());
            }
            _ => {}
        }
    }
    out
}
