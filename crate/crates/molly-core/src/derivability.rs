//! Enhanced Dolev-Yao derivation within a finite universe, and the
//! executability report built on top of compilation.
//!
//! The rule set is the traditional one — pair introduction and
//! elimination, encryption introduction, decryption when the inverse key
//! is derivable, hash introduction — extended with free derivation of
//! quotes and public-from-private key derivation. Restricting goals and
//! intermediate results to a subterm-closed universe makes derivability
//! decidable by a saturation fixpoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::compiler::{compile, CompileError};
use crate::proc_ir::{Expr, Loc, Proc};
use crate::syntax::print_term;
use crate::terms::{inverse, Role, Term};

/// One inference recorded by the closure engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: &'static str,
    pub premises: Vec<Term>,
    pub conclusion: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("goal {} is outside the universe", print_term(.goal))]
pub struct GoalOutsideUniverse {
    pub goal: Term,
}

/// Least fixpoint of the enhanced Dolev-Yao rules over `universe`,
/// starting from `hyps`. Conclusions are restricted to the universe,
/// which keeps the closure finite; decryption may still consult inverse
/// keys via their derivability.
pub fn derivable_closure(hyps: &BTreeSet<Term>, universe: &BTreeSet<Term>) -> BTreeSet<Term> {
    derivable_closure_with_steps(hyps, universe, true).0
}

/// The closure under exactly the rules that mirror a bind-creating
/// closure rule of the compiler. Public-from-private derivation has no
/// closure-rule counterpart (the compiler derives public keys only at
/// initialization), so it is excluded; this is the right-hand side of
/// the derivable-implies-bound comparison.
pub fn binding_closure(hyps: &BTreeSet<Term>, universe: &BTreeSet<Term>) -> BTreeSet<Term> {
    derivable_closure_with_steps(hyps, universe, false).0
}

pub fn derivable_closure_with_steps(
    hyps: &BTreeSet<Term>,
    universe: &BTreeSet<Term>,
    pub_from_priv: bool,
) -> (BTreeSet<Term>, Vec<DerivationStep>) {
    let mut known: BTreeSet<Term> = hyps.intersection(universe).cloned().collect();
    let mut steps = Vec::new();
    let add = |known: &mut BTreeSet<Term>,
               steps: &mut Vec<DerivationStep>,
               rule: &'static str,
               premises: Vec<Term>,
               conclusion: &Term|
     -> bool {
        if known.contains(conclusion) {
            return false;
        }
        known.insert(conclusion.clone());
        steps.push(DerivationStep {
            rule,
            premises,
            conclusion: conclusion.clone(),
        });
        true
    };

    // Quotes are freely derivable.
    for t in universe {
        if matches!(t, Term::Qt(_)) {
            add(&mut known, &mut steps, "quote", vec![], t);
        }
    }

    loop {
        let mut changed = false;
        for t in universe {
            if known.contains(t) {
                continue;
            }
            match t {
                Term::Pr(t1, t2) => {
                    if known.contains(t1) && known.contains(t2) {
                        changed |= add(
                            &mut known,
                            &mut steps,
                            "pair-intro",
                            vec![(**t1).clone(), (**t2).clone()],
                            t,
                        );
                    }
                }
                Term::En(plain, key) => {
                    if known.contains(plain) && known.contains(key) {
                        changed |= add(
                            &mut known,
                            &mut steps,
                            "encr-intro",
                            vec![(**plain).clone(), (**key).clone()],
                            t,
                        );
                    }
                }
                Term::Hs(body) => {
                    if known.contains(body) {
                        changed |= add(
                            &mut known,
                            &mut steps,
                            "hash-intro",
                            vec![(**body).clone()],
                            t,
                        );
                    }
                }
                Term::Ak(n) if pub_from_priv && known.contains(&Term::Ik(*n)) => {
                    changed |= add(&mut known, &mut steps, "pub-of-priv", vec![Term::Ik(*n)], t);
                }
                _ => {}
            }
        }
        // Destruction of what we already know.
        let snapshot: Vec<Term> = known.iter().cloned().collect();
        for t in snapshot {
            match &t {
                Term::Pr(t1, t2) => {
                    if universe.contains(t1) {
                        changed |= add(&mut known, &mut steps, "pair-elim-l", vec![t.clone()], t1);
                    }
                    if universe.contains(t2) {
                        changed |= add(&mut known, &mut steps, "pair-elim-r", vec![t.clone()], t2);
                    }
                }
                Term::En(plain, key)
                    if known.contains(&inverse(key)) && universe.contains(plain) =>
                {
                    changed |= add(
                        &mut known,
                        &mut steps,
                        "decrypt",
                        vec![t.clone(), inverse(key)],
                        plain,
                    );
                }
                _ => {}
            }
        }
        if !changed {
            return (known, steps);
        }
    }
}

/// Is `goal` derivable from `hyps` within `universe`? A goal outside the
/// universe is a contract violation and is reported, not answered.
pub fn dy_derivable(
    hyps: &BTreeSet<Term>,
    goal: &Term,
    universe: &BTreeSet<Term>,
) -> Result<bool, GoalOutsideUniverse> {
    if !universe.contains(goal) {
        return Err(GoalOutsideUniverse { goal: goal.clone() });
    }
    Ok(derivable_closure(hyps, universe).contains(goal))
}

/// Terms with at least one binding whose expression tree, resolved
/// through the proc's bindings, has no generation leaf. These are the
/// terms the executing party can account for from its inputs alone.
pub fn genr_free_bound_terms(p: &Proc) -> BTreeSet<Term> {
    let mut genr_free: BTreeMap<Loc, bool> = BTreeMap::new();
    // Binds appear in definition order, so one pass resolves each
    // location's tree.
    for (_, v, e) in p.binds() {
        let free = match e {
            Expr::Genr(..) => false,
            other => other
                .arg_locs()
                .iter()
                .all(|l| genr_free.get(l).copied().unwrap_or(false)),
        };
        genr_free.insert(v, free);
    }
    p.binds()
        .filter(|(_, v, _)| genr_free.get(v).copied().unwrap_or(false))
        .map(|(t, _, _)| t.clone())
        .collect()
}

/// The terms the compiler bound at initialization by generation or
/// public-key derivation, restricted to the universe. Added as
/// hypotheses when checking that derivable terms are bound.
pub fn generated_hypotheses(p: &Proc, universe: &BTreeSet<Term>) -> BTreeSet<Term> {
    p.binds()
        .filter(|(_, _, e)| matches!(e, Expr::Genr(..) | Expr::PubOf(_)))
        .map(|(t, _, _)| t.clone())
        .filter(|t| universe.contains(t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Executable,
    NonExecutable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReasonKind {
    MissingDecryptionKey,
    MissingHashBody,
}

impl fmt::Display for ReasonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReasonKind::MissingDecryptionKey => f.write_str("MissingDecryptionKey"),
            ReasonKind::MissingHashBody => f.write_str("MissingHashBody"),
        }
    }
}

/// An executability verdict for a role, with the semantically
/// attributable reasons compilation failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutabilityReport {
    pub verdict: Verdict,
    pub reasons: Vec<(ReasonKind, Term)>,
}

impl fmt::Display for ExecutabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Executable => f.write_str("Executable"),
            Verdict::NonExecutable => {
                f.write_str("NonExecutable")?;
                for (kind, term) in &self.reasons {
                    write!(f, "\n{kind} {}", print_term(term))?;
                }
                Ok(())
            }
        }
    }
}

/// A role is non-executable when saturation yields a closed but
/// unjustified proc: some needed decryption key or hash body cannot be
/// derived. Compile errors that are not justification failures (generic
/// variables, unbound channels) are malformed-role errors and are passed
/// through.
pub fn executability(role: &Role) -> Result<ExecutabilityReport, CompileError> {
    match compile(role) {
        Ok(_) => Ok(ExecutabilityReport {
            verdict: Verdict::Executable,
            reasons: vec![],
        }),
        Err(CompileError::NotJustifiedEncryption(t)) => {
            let missing = match &t {
                Term::En(_, key) => inverse(key),
                other => other.clone(),
            };
            Ok(ExecutabilityReport {
                verdict: Verdict::NonExecutable,
                reasons: vec![(ReasonKind::MissingDecryptionKey, missing)],
            })
        }
        Err(CompileError::NotJustifiedHash(t)) => {
            let missing = match &t {
                Term::Hs(body) => (**body).clone(),
                other => other.clone(),
            };
            Ok(ExecutabilityReport {
                verdict: Verdict::NonExecutable,
                reasons: vec![(ReasonKind::MissingHashBody, missing)],
            })
        }
        Err(other) => Err(other),
    }
}
