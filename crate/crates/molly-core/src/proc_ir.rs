//! The intermediate language: locations, expressions, statements, traces,
//! the binding relation, and the sameness equivalence on locations.
//!
//! A proc is a straight-line program. Events mark observable actions,
//! binds store the value of an expression into a fresh location (typed by
//! a symbolic term), and checks are runtime assertions that halt the
//! program when they fail. Comments are inert.

use std::collections::BTreeMap;
use std::fmt;

use crate::terms::{Act, Sort, Term};

/// A storage location, allocated with strictly increasing 1-based
/// indices and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub u32);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L {}", self.0)
    }
}

/// A right-hand side for a bind. Expressions are flat: compound structure
/// arises through the locations they mention.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    PairE(Loc, Loc),
    Frst(Loc),
    Scnd(Loc),
    EncrE(Loc, Loc),
    DecrE(Loc, Loc),
    HashE(Loc),
    QuotE(String),
    PubOf(Loc),
    Genr(u32, Sort),
    Param(u32),
    Read(u32),
}

impl Expr {
    pub fn arg_locs(&self) -> Vec<Loc> {
        match self {
            Expr::PairE(a, b) | Expr::EncrE(a, b) | Expr::DecrE(a, b) => vec![*a, *b],
            Expr::Frst(a) | Expr::Scnd(a) | Expr::HashE(a) | Expr::PubOf(a) => vec![*a],
            Expr::QuotE(_) | Expr::Genr(..) | Expr::Param(_) | Expr::Read(_) => vec![],
        }
    }
}

/// One statement of a proc.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stmt {
    Evnt(Act<Loc>),
    Bind(Term, Loc, Expr),
    Csrt(Loc, Sort),
    Csame(Loc, Loc),
    Ckypr(Loc, Loc),
    Chash(Loc, Loc),
    Cquot(Loc, String),
    Comm(String),
}

impl Stmt {
    pub fn is_check(&self) -> bool {
        matches!(
            self,
            Stmt::Csrt(..) | Stmt::Csame(..) | Stmt::Ckypr(..) | Stmt::Chash(..) | Stmt::Cquot(..)
        )
    }
}

/// A straight-line program: an ordered list of statements respecting
/// definition-before-use of locations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Proc {
    pub stmts: Vec<Stmt>,
}

impl Proc {
    pub fn new() -> Proc {
        Proc { stmts: Vec::new() }
    }

    /// Iterate the bind statements, in order.
    pub fn binds(&self) -> impl Iterator<Item = (&Term, Loc, &Expr)> {
        self.stmts.iter().filter_map(|s| match s {
            Stmt::Bind(t, v, e) => Some((t, *v, e)),
            _ => None,
        })
    }

    /// The expression bound at `loc`, if any. A well-formed proc has at
    /// most one bind per location.
    pub fn expr_at(&self, loc: Loc) -> Option<&Expr> {
        self.binds().find_map(|(_, v, e)| (v == loc).then_some(e))
    }

    /// The term bound at `loc`, if any.
    pub fn term_at(&self, loc: Loc) -> Option<&Term> {
        self.binds().find_map(|(t, v, _)| (v == loc).then_some(t))
    }

    /// All locations binding `t`, in statement order.
    pub fn locations_of(&self, t: &Term) -> Vec<Loc> {
        self.binds()
            .filter_map(|(bt, v, _)| (bt == t).then_some(v))
            .collect()
    }

    pub fn is_bound(&self, t: &Term) -> bool {
        self.binds().any(|(bt, _, _)| bt == t)
    }
}

/// The event payloads of a proc, in order; binds, checks, and comments
/// are dropped.
pub fn trace(p: &Proc) -> Vec<Act<Loc>> {
    p.stmts
        .iter()
        .filter_map(|s| match s {
            Stmt::Evnt(a) => Some(a.clone()),
            _ => None,
        })
        .collect()
}

/// The binding relation from terms to locations induced by the binds of
/// `p`. One term may relate to many locations.
pub fn beta(p: &Proc) -> Vec<(Term, Loc)> {
    p.binds().map(|(t, v, _)| (t.clone(), v)).collect()
}

/// The least location binding `t`, taking "least" by location index.
pub fn first_location(p: &Proc, t: &Term) -> Option<Loc> {
    p.binds()
        .filter_map(|(bt, v, _)| (bt == t).then_some(v))
        .min()
}

/// `e` is a pair expression for `Pr(t1, t2)` in `p` when it pairs two
/// locations bound to the components.
pub fn is_pair_expr_for(p: &Proc, e: &Expr, t: &Term) -> bool {
    match (e, t) {
        (Expr::PairE(l1, l2), Term::Pr(t1, t2)) => {
            p.term_at(*l1) == Some(t1) && p.term_at(*l2) == Some(t2)
        }
        _ => false,
    }
}

/// `e` is an encryption expression for `En(plain, key)` in `p` when it
/// encrypts a location bound to the plaintext with a location bound to
/// the key.
pub fn is_encr_expr_for(p: &Proc, e: &Expr, t: &Term) -> bool {
    match (e, t) {
        (Expr::EncrE(lp, lk), Term::En(plain, key)) => {
            p.term_at(*lp) == Some(plain) && p.term_at(*lk) == Some(key)
        }
        _ => false,
    }
}

/// `e` is a hash expression for `Hs(t1)` in `p` when it hashes a location
/// bound to the body.
pub fn is_hash_expr_for(p: &Proc, e: &Expr, t: &Term) -> bool {
    match (e, t) {
        (Expr::HashE(l), Term::Hs(t1)) => p.term_at(*l) == Some(t1),
        _ => false,
    }
}

/// The sameness equivalence on locations: the least equivalence relation
/// containing every `Csame` of the proc. Built once per query as a
/// disjoint-set forest.
#[derive(Debug, Clone)]
pub struct Sameness {
    parent: BTreeMap<Loc, Loc>,
}

impl Sameness {
    pub fn of(p: &Proc) -> Sameness {
        let mut s = Sameness {
            parent: BTreeMap::new(),
        };
        for stmt in &p.stmts {
            if let Stmt::Csame(a, b) = stmt {
                s.union(*a, *b);
            }
        }
        s
    }

    fn find(&mut self, x: Loc) -> Loc {
        let p = *self.parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent.insert(x, root);
        root
    }

    fn union(&mut self, a: Loc, b: Loc) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Keep the smaller index as representative for determinism.
            let (keep, merge) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(merge, keep);
        }
    }

    pub fn same(&mut self, a: Loc, b: Loc) -> bool {
        a == b || self.find(a) == self.find(b)
    }

    /// The non-trivial classes plus singletons for `locs`, as sorted
    /// location lists.
    pub fn classes(&mut self, locs: &[Loc]) -> Vec<Vec<Loc>> {
        let mut by_root: BTreeMap<Loc, Vec<Loc>> = BTreeMap::new();
        for &l in locs {
            by_root.entry(self.find(l)).or_default().push(l);
        }
        by_root.into_values().collect()
    }
}

/// Ways a statement list can fail definition-before-use.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LocationError {
    #[error("statement {index}: location {loc} used before it is bound")]
    UseBeforeBind { index: usize, loc: Loc },
    #[error("statement {index}: location {loc} bound more than once")]
    Rebound { index: usize, loc: Loc },
}

/// Single left-to-right pass checking that every location read by an
/// expression or check was introduced earlier and that no location is
/// bound twice. An `Evnt (Prm v)` or `Evnt (Rcv _ v)` introduces `v`
/// for its paired bind.
pub fn validate_locations(p: &Proc) -> Result<(), LocationError> {
    let mut introduced: BTreeMap<Loc, bool> = BTreeMap::new(); // loc -> has bind
    for (index, stmt) in p.stmts.iter().enumerate() {
        let mut used: Vec<Loc> = Vec::new();
        match stmt {
            Stmt::Evnt(Act::Prm(v)) => {
                introduced.entry(*v).or_insert(false);
            }
            Stmt::Evnt(Act::Rcv(ch, v)) => {
                used.push(*ch);
                introduced.entry(*v).or_insert(false);
            }
            Stmt::Evnt(Act::Snd(ch, m)) => {
                used.push(*ch);
                used.push(*m);
            }
            Stmt::Evnt(Act::Ret(v)) => used.push(*v),
            Stmt::Bind(_, v, e) => {
                used.extend(e.arg_locs());
                match introduced.get(v) {
                    Some(true) => return Err(LocationError::Rebound { index, loc: *v }),
                    _ => {
                        introduced.insert(*v, true);
                    }
                }
            }
            Stmt::Csrt(v, _) | Stmt::Cquot(v, _) => used.push(*v),
            Stmt::Csame(a, b) | Stmt::Ckypr(a, b) | Stmt::Chash(a, b) => {
                used.push(*a);
                used.push(*b);
            }
            Stmt::Comm(_) => {}
        }
        for loc in used {
            if !introduced.contains_key(&loc) {
                return Err(LocationError::UseBeforeBind { index, loc });
            }
        }
    }
    Ok(())
}
