//! Role-to-proc compilation.
//!
//! Compilation initializes a proc with generation bindings (fresh values
//! for every positive-polarity elementary term, key pairs handled
//! together), then walks the role's actions. Parameters and receptions
//! bind incoming values; transmissions and returns send already-bound
//! ones. After every action the proc is saturated: closure rules fire to
//! fixpoint, adding the binds and checks the proc is obliged to carry,
//! and the result is verified to be justified — received encryptions
//! must have decryption keys bound and received hashes must have their
//! bodies bound. Justification failures are compile errors attributable
//! to the role, not the compiler.

use std::collections::BTreeSet;
use std::fmt;

use crate::proc_ir::{
    first_location, is_encr_expr_for, is_hash_expr_for, is_pair_expr_for, trace, Expr, Loc, Proc,
    Sameness, Stmt,
};
use crate::syntax::{print_stmt, print_term};
use crate::terms::{
    act_map_rel, inverse, is_elementary, polarity, sort_of, subterms, Act, Polarity, Role, Sort,
    Term,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("NotJustifiedEncryption {}: no binding for decryption key {}", print_term(.0), print_term(&inverse(key_of(.0))))]
    NotJustifiedEncryption(Term),
    #[error("NotJustifiedHash {}: no binding for the hash body", print_term(.0))]
    NotJustifiedHash(Term),
    #[error("UnsupportedGeneric {}: generic variables cannot be generated", print_term(.0))]
    UnsupportedGeneric(Term),
    #[error("UnboundChannel {}: channel term is not bound before use", print_term(.0))]
    UnboundChannel(Term),
    #[error("UnboundPayload {}: transmission payload is not bound after saturation", print_term(.0))]
    UnboundPayload(Term),
}

fn key_of(t: &Term) -> &Term {
    match t {
        Term::En(_, k) => k,
        _ => t,
    }
}

/// Subterm closure of every term occurring in the role's actions.
pub fn universe(role: &[Act<Term>]) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for action in role {
        for t in action.payloads() {
            out.extend(subterms(t));
        }
    }
    out
}

/// The state of a compilation in progress. `done` and `todo` partition
/// the role; the proc is saturated between actions.
#[derive(Debug, Clone)]
pub struct CompileState {
    pub role: Role,
    pub proc: Proc,
    pub universe: BTreeSet<Term>,
    done: usize,
    next_loc: u32,
    next_genr: u32,
    next_param: u32,
    next_read: u32,
}

impl CompileState {
    pub fn done_actions(&self) -> &[Act<Term>] {
        &self.role[..self.done]
    }

    pub fn todo(&self) -> &[Act<Term>] {
        &self.role[self.done..]
    }

    fn fresh_loc(&mut self) -> Loc {
        let v = Loc(self.next_loc);
        self.next_loc += 1;
        v
    }
}

/// The closure rules, in the fixed order the saturation engine tries
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    PairElimL,
    PairElimR,
    Decryption,
    PairIntro,
    EncrIntro,
    HashIntro,
    QuoteIntro,
    CheckQuote,
    CheckSort,
    CheckSame,
    CheckHash,
    CheckKeyPair,
}

impl RuleKind {
    pub fn is_introduction(self) -> bool {
        matches!(
            self,
            RuleKind::PairIntro | RuleKind::EncrIntro | RuleKind::HashIntro | RuleKind::QuoteIntro
        )
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One rule application, with the proc weight on both sides.
#[derive(Debug, Clone)]
pub struct RuleFiring {
    pub rule: RuleKind,
    pub stmt: Stmt,
    pub weight_before: u64,
    pub weight_after: u64,
}

/// Saturation telemetry for the termination argument: every firing with
/// its weight delta.
#[derive(Debug, Clone, Default)]
pub struct Instrumentation {
    pub firings: Vec<RuleFiring>,
}

impl Instrumentation {
    pub fn introduction_count(&self) -> usize {
        self.firings
            .iter()
            .filter(|f| f.rule.is_introduction())
            .count()
    }

    /// Elimination/check firings whose weight failed to strictly
    /// decrease.
    pub fn weight_violations(&self) -> Vec<&RuleFiring> {
        self.firings
            .iter()
            .filter(|f| !f.rule.is_introduction() && f.weight_after >= f.weight_before)
            .collect()
    }
}

enum Pending {
    NewBind(RuleKind, Term, Expr),
    NewCheck(RuleKind, Stmt),
}

/// Find the first rule that can fire, scanning rules in the fixed order
/// and statements in proc order.
fn find_firing(p: &Proc, universe: &BTreeSet<Term>) -> Option<Pending> {
    // Pair Elimination Left
    for (t, v, e) in p.binds() {
        if let Term::Pr(t1, _) = t {
            if !is_pair_expr_for(p, e, t)
                && !p
                    .binds()
                    .any(|(bt, _, be)| bt == &**t1 && *be == Expr::Frst(v))
            {
                return Some(Pending::NewBind(
                    RuleKind::PairElimL,
                    (**t1).clone(),
                    Expr::Frst(v),
                ));
            }
        }
    }
    // Pair Elimination Right
    for (t, v, e) in p.binds() {
        if let Term::Pr(_, t2) = t {
            if !is_pair_expr_for(p, e, t)
                && !p
                    .binds()
                    .any(|(bt, _, be)| bt == &**t2 && *be == Expr::Scnd(v))
            {
                return Some(Pending::NewBind(
                    RuleKind::PairElimR,
                    (**t2).clone(),
                    Expr::Scnd(v),
                ));
            }
        }
    }
    // Decryption
    for (t, v, e) in p.binds() {
        if let Term::En(plain, key) = t {
            if !is_encr_expr_for(p, e, t) {
                if let Some(vk) = first_location(p, &inverse(key)) {
                    if !p
                        .binds()
                        .any(|(bt, _, be)| bt == &**plain && *be == Expr::DecrE(v, vk))
                    {
                        return Some(Pending::NewBind(
                            RuleKind::Decryption,
                            (**plain).clone(),
                            Expr::DecrE(v, vk),
                        ));
                    }
                }
            }
        }
    }
    // Pair Introduction
    for t in universe {
        if let Term::Pr(t1, t2) = t {
            if !p.is_bound(t) {
                if let (Some(v1), Some(v2)) = (first_location(p, t1), first_location(p, t2)) {
                    return Some(Pending::NewBind(
                        RuleKind::PairIntro,
                        t.clone(),
                        Expr::PairE(v1, v2),
                    ));
                }
            }
        }
    }
    // Encryption Introduction
    for t in universe {
        if let Term::En(plain, key) = t {
            if !p.is_bound(t) {
                if let (Some(vp), Some(vk)) = (first_location(p, plain), first_location(p, key)) {
                    return Some(Pending::NewBind(
                        RuleKind::EncrIntro,
                        t.clone(),
                        Expr::EncrE(vp, vk),
                    ));
                }
            }
        }
    }
    // Hash Introduction
    for t in universe {
        if let Term::Hs(body) = t {
            if !p.is_bound(t) {
                if let Some(vb) = first_location(p, body) {
                    return Some(Pending::NewBind(
                        RuleKind::HashIntro,
                        t.clone(),
                        Expr::HashE(vb),
                    ));
                }
            }
        }
    }
    // Quote Introduction: every quote in the universe is constructible.
    for t in universe {
        if let Term::Qt(s) = t {
            if !p.is_bound(t) {
                return Some(Pending::NewBind(
                    RuleKind::QuoteIntro,
                    t.clone(),
                    Expr::QuotE(s.clone()),
                ));
            }
        }
    }
    // Check Quote
    for (t, v, _) in p.binds() {
        if let Term::Qt(s) = t {
            let check = Stmt::Cquot(v, s.clone());
            if !p.stmts.contains(&check) {
                return Some(Pending::NewCheck(RuleKind::CheckQuote, check));
            }
        }
    }
    // Check Sort: once per elementary term, at its first location. Terms
    // whose value comes from Genr or PubOf already have the right sort
    // by construction, and sort Mesg has nothing to check.
    for (t, v, _) in p.binds() {
        if is_elementary(t) && sort_of(t).is_base() && first_location(p, t) == Some(v) {
            let guaranteed = matches!(p.expr_at(v), Some(Expr::Genr(..)) | Some(Expr::PubOf(_)));
            let check = Stmt::Csrt(v, sort_of(t));
            if !guaranteed && !p.stmts.contains(&check) {
                return Some(Pending::NewCheck(RuleKind::CheckSort, check));
            }
        }
    }
    // Check Same: link every later binding of a term to its first
    // location.
    for (t, v, _) in p.binds() {
        let vf = first_location(p, t).unwrap();
        if v != vf {
            let check = Stmt::Csame(v, vf);
            if !p.stmts.contains(&check) {
                return Some(Pending::NewCheck(RuleKind::CheckSame, check));
            }
        }
    }
    // Check Hash: a received hash whose body is bound is compared
    // directly when no constructed hash exists to compare against
    // through sameness.
    for (t, v, e) in p.binds() {
        if let Term::Hs(body) = t {
            if first_location(p, t) == Some(v) && !is_hash_expr_for(p, e, t) {
                if let Some(vb) = first_location(p, body) {
                    let check = Stmt::Chash(v, vb);
                    if !p.stmts.contains(&check) {
                        return Some(Pending::NewCheck(RuleKind::CheckHash, check));
                    }
                }
            }
        }
    }
    // Check Key Pair
    for (t, _, _) in p.binds() {
        if let Term::Ik(n) = t {
            let pub_term = Term::Ak(*n);
            if let (Some(v1), Some(v2)) = (first_location(p, t), first_location(p, &pub_term)) {
                let check = Stmt::Ckypr(v1, v2);
                if !p.stmts.contains(&check) {
                    return Some(Pending::NewCheck(RuleKind::CheckKeyPair, check));
                }
            }
        }
    }
    None
}

/// The termination measure from the saturation analysis: each binding
/// counts the elimination/check rules for which it is the active premise
/// of a rule that can still fire, times the size of its bound term.
/// Introduction rules do not contribute.
pub fn weight(p: &Proc, universe: &BTreeSet<Term>) -> u64 {
    let _ = universe; // intro redexes are not weighed, so the universe is unused
    let mut total: u64 = 0;
    for (t, v, e) in p.binds() {
        let mut redexes: u64 = 0;
        match t {
            Term::Pr(t1, t2) => {
                if !is_pair_expr_for(p, e, t) {
                    if !p
                        .binds()
                        .any(|(bt, _, be)| bt == &**t1 && *be == Expr::Frst(v))
                    {
                        redexes += 1;
                    }
                    if !p
                        .binds()
                        .any(|(bt, _, be)| bt == &**t2 && *be == Expr::Scnd(v))
                    {
                        redexes += 1;
                    }
                }
            }
            Term::En(plain, key) => {
                if !is_encr_expr_for(p, e, t) {
                    if let Some(vk) = first_location(p, &inverse(key)) {
                        if !p
                            .binds()
                            .any(|(bt, _, be)| bt == &**plain && *be == Expr::DecrE(v, vk))
                        {
                            redexes += 1;
                        }
                    }
                }
            }
            Term::Hs(body) => {
                if first_location(p, t) == Some(v) && !is_hash_expr_for(p, e, t) {
                    if let Some(vb) = first_location(p, body) {
                        if !p.stmts.contains(&Stmt::Chash(v, vb)) {
                            redexes += 1;
                        }
                    }
                }
            }
            Term::Qt(s) if !p.stmts.contains(&Stmt::Cquot(v, s.clone())) => {
                redexes += 1;
            }
            _ => {}
        }
        let vf = first_location(p, t).unwrap();
        if v == vf {
            if is_elementary(t)
                && sort_of(t).is_base()
                && !matches!(p.expr_at(v), Some(Expr::Genr(..)) | Some(Expr::PubOf(_)))
                && !p.stmts.contains(&Stmt::Csrt(v, sort_of(t)))
            {
                redexes += 1;
            }
            // The public half of a bound key pair is the active premise
            // of Check Key Pair.
            if let Term::Ak(n) = t {
                if let Some(v1) = first_location(p, &Term::Ik(*n)) {
                    if !p.stmts.contains(&Stmt::Ckypr(v1, v)) {
                        redexes += 1;
                    }
                }
            }
        } else if !p.stmts.contains(&Stmt::Csame(v, vf)) {
            redexes += 1;
        }
        total += redexes * t.size() as u64;
    }
    total
}

fn saturate_in_place(
    proc: &mut Proc,
    next_loc: &mut u32,
    universe: &BTreeSet<Term>,
    mut instr: Option<&mut Instrumentation>,
) -> Result<(), CompileError> {
    while let Some(pending) = find_firing(proc, universe) {
        let weight_before = if instr.is_some() {
            weight(proc, universe)
        } else {
            0
        };
        let (rule, stmt) = match pending {
            Pending::NewBind(rule, t, e) => {
                let v = Loc(*next_loc);
                *next_loc += 1;
                (rule, Stmt::Bind(t, v, e))
            }
            Pending::NewCheck(rule, stmt) => (rule, stmt),
        };
        proc.stmts.push(stmt.clone());
        if let Some(instr) = instr.as_deref_mut() {
            instr.firings.push(RuleFiring {
                rule,
                stmt,
                weight_before,
                weight_after: weight(proc, universe),
            });
        }
    }
    match check_justified(proc).into_iter().next() {
        Some(JustificationViolation::Encryption { term, .. }) => {
            Err(CompileError::NotJustifiedEncryption(term))
        }
        Some(JustificationViolation::Hash { term, .. }) => {
            Err(CompileError::NotJustifiedHash(term))
        }
        None => Ok(()),
    }
}

/// Run the closure rules on `p` to fixpoint, then verify the result is
/// justified. Fresh locations continue from the largest one in `p`.
pub fn saturate(p: Proc, universe: &BTreeSet<Term>) -> Result<Proc, CompileError> {
    let mut proc = p;
    let mut max_loc = 0;
    for stmt in &proc.stmts {
        let locs = match stmt {
            Stmt::Evnt(a) => a.payloads().into_iter().map(|l| l.0).collect::<Vec<_>>(),
            Stmt::Bind(_, v, e) => {
                let mut ls: Vec<u32> = e.arg_locs().into_iter().map(|l| l.0).collect();
                ls.push(v.0);
                ls
            }
            Stmt::Csrt(v, _) | Stmt::Cquot(v, _) => vec![v.0],
            Stmt::Csame(a, b) | Stmt::Ckypr(a, b) | Stmt::Chash(a, b) => vec![a.0, b.0],
            Stmt::Comm(_) => vec![],
        };
        max_loc = max_loc.max(locs.into_iter().max().unwrap_or(0));
    }
    let mut next_loc = max_loc + 1;
    saturate_in_place(&mut proc, &mut next_loc, universe, None)?;
    Ok(proc)
}

/// Emit the initialization bindings for `role`: fresh generation for
/// every positive-polarity elementary term, key pairs as a private
/// generation plus a public derivation, and quote constants. The result
/// is saturated.
pub fn initialize(role: &Role) -> Result<CompileState, CompileError> {
    initialize_with(role, None)
}

fn initialize_with(
    role: &Role,
    instr: Option<&mut Instrumentation>,
) -> Result<CompileState, CompileError> {
    let universe = universe(role);
    let mut st = CompileState {
        role: role.clone(),
        proc: Proc::new(),
        universe,
        done: 0,
        next_loc: 1,
        next_genr: 1,
        next_param: 1,
        next_read: 1,
    };

    let positive: BTreeSet<Term> = st
        .universe
        .iter()
        .filter(|t| polarity(role, t) == Polarity::Positive)
        .cloned()
        .collect();

    for t in &positive {
        if let Term::Mg(_) = t {
            return Err(CompileError::UnsupportedGeneric(t.clone()));
        }
    }

    for t in &positive {
        if is_elementary(t) && !matches!(t, Term::Ak(_) | Term::Ik(_)) {
            let v = st.fresh_loc();
            let genr = Expr::Genr(st.next_genr, sort_of(t));
            st.next_genr += 1;
            st.proc.stmts.push(Stmt::Bind(t.clone(), v, genr));
        }
    }

    let mut pair_indices = BTreeSet::new();
    for t in &positive {
        if let Term::Ak(n) | Term::Ik(n) = t {
            pair_indices.insert(*n);
        }
    }
    for n in pair_indices {
        let v_pri = st.fresh_loc();
        let genr = Expr::Genr(st.next_genr, Sort::Ikey);
        st.next_genr += 1;
        st.proc.stmts.push(Stmt::Bind(Term::Ik(n), v_pri, genr));
        let v_pub = st.fresh_loc();
        st.proc
            .stmts
            .push(Stmt::Bind(Term::Ak(n), v_pub, Expr::PubOf(v_pri)));
    }

    for t in &positive {
        if let Term::Qt(s) = t {
            let v = st.fresh_loc();
            st.proc
                .stmts
                .push(Stmt::Bind(t.clone(), v, Expr::QuotE(s.clone())));
        }
    }

    let universe = st.universe.clone();
    saturate_in_place(&mut st.proc, &mut st.next_loc, &universe, instr)?;
    Ok(st)
}

/// Process the next role action: parameters and receptions record the
/// event and bind the incoming value before saturating; transmissions
/// and returns saturate first so the payload has a binding, then record
/// the event.
pub fn step(st: &mut CompileState) -> Result<(), CompileError> {
    step_with(st, None)
}

fn step_with(
    st: &mut CompileState,
    instr: Option<&mut Instrumentation>,
) -> Result<(), CompileError> {
    let action = st
        .todo()
        .first()
        .expect("step requires a nonempty todo list")
        .clone();
    let universe = st.universe.clone();
    match action {
        Act::Prm(t) => {
            st.proc
                .stmts
                .push(Stmt::Comm(format!("input {}", print_term(&t))));
            let v = st.fresh_loc();
            st.proc.stmts.push(Stmt::Evnt(Act::Prm(v)));
            let param = Expr::Param(st.next_param);
            st.next_param += 1;
            st.proc.stmts.push(Stmt::Bind(t, v, param));
            saturate_in_place(&mut st.proc, &mut st.next_loc, &universe, instr)?;
        }
        Act::Rcv(ch, m) => {
            let v_ch = first_location(&st.proc, &ch)
                .ok_or_else(|| CompileError::UnboundChannel(ch.clone()))?;
            st.proc.stmts.push(Stmt::Comm(format!(
                "receiving {} on {}",
                print_term(&m),
                print_term(&ch)
            )));
            let v = st.fresh_loc();
            st.proc.stmts.push(Stmt::Evnt(Act::Rcv(v_ch, v)));
            let read = Expr::Read(st.next_read);
            st.next_read += 1;
            st.proc.stmts.push(Stmt::Bind(m, v, read));
            saturate_in_place(&mut st.proc, &mut st.next_loc, &universe, instr)?;
        }
        Act::Snd(ch, m) => {
            saturate_in_place(&mut st.proc, &mut st.next_loc, &universe, instr)?;
            let v_ch = first_location(&st.proc, &ch)
                .ok_or_else(|| CompileError::UnboundChannel(ch.clone()))?;
            let v_m = first_location(&st.proc, &m)
                .ok_or_else(|| CompileError::UnboundPayload(m.clone()))?;
            st.proc.stmts.push(Stmt::Comm(format!(
                "sending {} on {}",
                print_term(&m),
                print_term(&ch)
            )));
            st.proc.stmts.push(Stmt::Evnt(Act::Snd(v_ch, v_m)));
        }
        Act::Ret(m) => {
            saturate_in_place(&mut st.proc, &mut st.next_loc, &universe, instr)?;
            let v_m = first_location(&st.proc, &m)
                .ok_or_else(|| CompileError::UnboundPayload(m.clone()))?;
            st.proc
                .stmts
                .push(Stmt::Comm(format!("returning {}", print_term(&m))));
            st.proc.stmts.push(Stmt::Evnt(Act::Ret(v_m)));
        }
    }
    st.done += 1;
    debug_assert!(
        check_loop_invariants(st).is_ok(),
        "{:?}",
        check_loop_invariants(st)
    );
    Ok(())
}

/// The loop invariants maintained between actions: done and todo
/// partition the role, the binding relation maps processed actions onto
/// the trace, and the proc is saturated.
pub fn check_loop_invariants(st: &CompileState) -> Result<(), String> {
    let tr = trace(&st.proc);
    if tr.len() != st.done_actions().len() {
        return Err(format!(
            "trace has {} events for {} processed actions",
            tr.len(),
            st.done_actions().len()
        ));
    }
    let mut related = |t: &Term, v: &Loc| st.proc.binds().any(|(bt, bv, _)| bt == t && bv == *v);
    for (action, event) in st.done_actions().iter().zip(tr.iter()) {
        if !act_map_rel(&mut related, action, event) {
            return Err(format!(
                "action {action:?} is not related to event {event:?} by the binding relation"
            ));
        }
    }
    if find_firing(&st.proc, &st.universe).is_some() {
        return Err("proc is not saturated".into());
    }
    Ok(())
}

/// Compile a role into a saturated, justified proc.
pub fn compile(role: &Role) -> Result<Proc, CompileError> {
    let mut st = initialize(role)?;
    while !st.todo().is_empty() {
        step(&mut st)?;
    }
    Ok(st.proc)
}

/// Compile while recording every saturation firing, for termination
/// analysis.
pub fn compile_instrumented(role: &Role) -> Result<(Proc, Instrumentation), CompileError> {
    let mut instr = Instrumentation::default();
    let mut st = initialize_with(role, Some(&mut instr))?;
    while !st.todo().is_empty() {
        step_with(&mut st, Some(&mut instr))?;
    }
    Ok((st.proc, instr))
}

/// A failed closure condition, naming the condition and the witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureViolation {
    PairIntroduction { term: Term },
    EncryptionIntroduction { term: Term },
    HashIntroduction { term: Term },
    QuoteBinding { term: Term },
    PairElimination { term: Term, loc: Loc },
    Decryption { term: Term, loc: Loc },
    CheckHash { term: Term, loc: Loc },
    CheckEquality { term: Term, first: Loc, other: Loc },
    CheckQuote { term: Term, loc: Loc },
    CheckSort { term: Term, loc: Loc },
    CheckKeyPair { index: u32 },
}

impl fmt::Display for ClosureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureViolation::PairIntroduction { term } => {
                write!(f, "Pair Introduction: {} unbound", print_term(term))
            }
            ClosureViolation::EncryptionIntroduction { term } => {
                write!(f, "Encryption Introduction: {} unbound", print_term(term))
            }
            ClosureViolation::HashIntroduction { term } => {
                write!(f, "Hash Introduction: {} unbound", print_term(term))
            }
            ClosureViolation::QuoteBinding { term } => {
                write!(f, "Quote Binding: {} unbound", print_term(term))
            }
            ClosureViolation::PairElimination { term, loc } => {
                write!(
                    f,
                    "Pair Elimination: {} at {loc} not deconstructed",
                    print_term(term)
                )
            }
            ClosureViolation::Decryption { term, loc } => {
                write!(f, "Decryption: {} at {loc} not decrypted", print_term(term))
            }
            ClosureViolation::CheckHash { term, loc } => {
                write!(f, "Check Hash: {} at {loc} unchecked", print_term(term))
            }
            ClosureViolation::CheckEquality { term, first, other } => write!(
                f,
                "Check Equality: {} at {other} not same-linked to {first}",
                print_term(term)
            ),
            ClosureViolation::CheckQuote { term, loc } => {
                write!(f, "Check Quote: {} at {loc} unchecked", print_term(term))
            }
            ClosureViolation::CheckSort { term, loc } => {
                write!(f, "Check Sort: {} at {loc} unchecked", print_term(term))
            }
            ClosureViolation::CheckKeyPair { index } => {
                write!(f, "Check Key Pair: key pair {index} unchecked")
            }
        }
    }
}

/// Verify the closure conditions against `p`, reporting every violation.
pub fn check_closed(p: &Proc, universe: &BTreeSet<Term>) -> Vec<ClosureViolation> {
    let mut out = Vec::new();
    let mut sm = Sameness::of(p);

    for t in universe {
        match t {
            Term::Pr(t1, t2) => {
                if p.is_bound(t1) && p.is_bound(t2) && !p.is_bound(t) {
                    out.push(ClosureViolation::PairIntroduction { term: t.clone() });
                }
            }
            Term::En(plain, key) => {
                if p.is_bound(plain) && p.is_bound(key) && !p.is_bound(t) {
                    out.push(ClosureViolation::EncryptionIntroduction { term: t.clone() });
                }
            }
            Term::Hs(body) => {
                if p.is_bound(body) && !p.is_bound(t) {
                    out.push(ClosureViolation::HashIntroduction { term: t.clone() });
                }
            }
            Term::Qt(_) if !p.is_bound(t) => {
                out.push(ClosureViolation::QuoteBinding { term: t.clone() });
            }
            _ => {}
        }
    }

    let binds: Vec<(Term, Loc, Expr)> = p
        .binds()
        .map(|(t, v, e)| (t.clone(), v, e.clone()))
        .collect();

    for (t, v, e) in &binds {
        match t {
            Term::Pr(t1, t2) => {
                if !is_pair_expr_for(p, e, t) {
                    let frst_ok = p
                        .binds()
                        .any(|(bt, _, be)| bt == &**t1 && *be == Expr::Frst(*v));
                    let scnd_ok = p
                        .binds()
                        .any(|(bt, _, be)| bt == &**t2 && *be == Expr::Scnd(*v));
                    if !frst_ok || !scnd_ok {
                        out.push(ClosureViolation::PairElimination {
                            term: t.clone(),
                            loc: *v,
                        });
                    }
                }
            }
            Term::En(plain, key) => {
                if !is_encr_expr_for(p, e, t) && p.is_bound(&inverse(key)) {
                    let decrypted = p.binds().any(|(bt, _, be)| {
                        bt == &**plain
                            && matches!(be, Expr::DecrE(src, vk)
                                if *src == *v && p.term_at(*vk) == Some(&inverse(key)))
                    });
                    if !decrypted {
                        out.push(ClosureViolation::Decryption {
                            term: t.clone(),
                            loc: *v,
                        });
                    }
                }
            }
            Term::Hs(body) => {
                if p.is_bound(body) {
                    // Either an explicit hash check, or sameness with a
                    // constructed hash of the bound body.
                    let body_locs = p.locations_of(body);
                    let ok = binds.iter().any(|(bt, bv, be)| {
                        bt == t && sm.same(*bv, *v) && {
                            let checked = body_locs
                                .iter()
                                .any(|vt| p.stmts.contains(&Stmt::Chash(*bv, *vt)));
                            checked || is_hash_expr_for(p, be, t)
                        }
                    });
                    if !ok {
                        out.push(ClosureViolation::CheckHash {
                            term: t.clone(),
                            loc: *v,
                        });
                    }
                }
            }
            Term::Qt(s) if !p.stmts.contains(&Stmt::Cquot(*v, s.clone())) => {
                out.push(ClosureViolation::CheckQuote {
                    term: t.clone(),
                    loc: *v,
                });
            }
            _ => {}
        }

        if is_elementary(t) {
            let vf = first_location(p, t).unwrap();
            if *v != vf && !sm.same(*v, vf) {
                out.push(ClosureViolation::CheckEquality {
                    term: t.clone(),
                    first: vf,
                    other: *v,
                });
            }
            if sort_of(t).is_base() {
                let guaranteed = p
                    .binds()
                    .any(|(bt, _, be)| bt == t && matches!(be, Expr::Genr(..) | Expr::PubOf(_)));
                if !guaranteed {
                    let checked = binds.iter().any(|(_, cv, _)| {
                        sm.same(*cv, *v) && p.stmts.contains(&Stmt::Csrt(*cv, sort_of(t)))
                    });
                    // Csrt may also sit on a location outside the bind list.
                    let checked = checked
                        || p.stmts.iter().any(|s| {
                            matches!(s, Stmt::Csrt(cv, srt) if *srt == sort_of(t) && sm.same(*cv, *v))
                        });
                    if !checked {
                        out.push(ClosureViolation::CheckSort {
                            term: t.clone(),
                            loc: *v,
                        });
                    }
                }
            }
        }
    }

    let mut pair_indices = BTreeSet::new();
    for (t, _, _) in &binds {
        if let Term::Ik(n) = t {
            if p.is_bound(&Term::Ak(*n)) {
                pair_indices.insert(*n);
            }
        }
    }
    for n in pair_indices {
        let priv_locs = p.locations_of(&Term::Ik(n));
        let pub_locs = p.locations_of(&Term::Ak(n));
        let ok = p.stmts.iter().any(|s| {
            matches!(s, Stmt::Ckypr(a, b)
                if priv_locs.iter().any(|l| sm.same(*a, *l))
                    && pub_locs.iter().any(|l| sm.same(*b, *l)))
        });
        if !ok {
            out.push(ClosureViolation::CheckKeyPair { index: n });
        }
    }

    out
}

/// A justification failure: a received encryption without a bound
/// decryption key, or a received hash without a bound body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JustificationViolation {
    Encryption {
        term: Term,
        missing_key: Term,
        loc: Loc,
    },
    Hash {
        term: Term,
        missing_body: Term,
        loc: Loc,
    },
}

impl fmt::Display for JustificationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JustificationViolation::Encryption {
                term, missing_key, ..
            } => write!(
                f,
                "Encryption violation on inv key {}: {} has no decryption key binding",
                print_term(missing_key),
                print_term(term)
            ),
            JustificationViolation::Hash {
                term, missing_body, ..
            } => write!(
                f,
                "Hash violation on body {}: {} has no body binding",
                print_term(missing_body),
                print_term(term)
            ),
        }
    }
}

/// Verify the two justification clauses: every encryption bound by a
/// non-constructing expression has its decryption key bound, and every
/// hash bound by a non-constructing expression has its body bound.
pub fn check_justified(p: &Proc) -> Vec<JustificationViolation> {
    let mut out = Vec::new();
    for (t, v, e) in p.binds() {
        match t {
            Term::En(_, key) => {
                if !is_encr_expr_for(p, e, t) && !p.is_bound(&inverse(key)) {
                    out.push(JustificationViolation::Encryption {
                        term: t.clone(),
                        missing_key: inverse(key),
                        loc: v,
                    });
                }
            }
            Term::Hs(body) if !is_hash_expr_for(p, e, t) && !p.is_bound(body) => {
                out.push(JustificationViolation::Hash {
                    term: t.clone(),
                    missing_body: (**body).clone(),
                    loc: v,
                });
            }
            _ => {}
        }
    }
    out
}

/// Structural equality up to an order-preserving renaming of locations,
/// ignoring comments: both procs are mapped onto rank space (locations
/// numbered by sorted index), then compared as trace sequence plus
/// multiset of binds and checks.
pub fn proc_equiv(a: &Proc, b: &Proc) -> bool {
    canonical_form(a) == canonical_form(b)
}

fn canonical_form(p: &Proc) -> (Vec<Act<u32>>, Vec<String>) {
    let mut locs = BTreeSet::new();
    for stmt in &p.stmts {
        match stmt {
            Stmt::Evnt(a) => locs.extend(a.payloads().into_iter().copied()),
            Stmt::Bind(_, v, e) => {
                locs.insert(*v);
                locs.extend(e.arg_locs());
            }
            Stmt::Csrt(v, _) | Stmt::Cquot(v, _) => {
                locs.insert(*v);
            }
            Stmt::Csame(x, y) | Stmt::Ckypr(x, y) | Stmt::Chash(x, y) => {
                locs.insert(*x);
                locs.insert(*y);
            }
            Stmt::Comm(_) => {}
        }
    }
    let rank: std::collections::BTreeMap<Loc, u32> = locs
        .iter()
        .enumerate()
        .map(|(i, l)| (*l, i as u32 + 1))
        .collect();
    let rk = |l: &Loc| rank[l];

    let mut events = Vec::new();
    let mut body = Vec::new();
    for stmt in &p.stmts {
        match stmt {
            Stmt::Evnt(a) => events.push(a.map(|l| rk(l))),
            Stmt::Comm(_) => {}
            Stmt::Bind(t, v, e) => {
                let renamed = match e {
                    Expr::PairE(a, b) => Expr::PairE(Loc(rk(a)), Loc(rk(b))),
                    Expr::EncrE(a, b) => Expr::EncrE(Loc(rk(a)), Loc(rk(b))),
                    Expr::DecrE(a, b) => Expr::DecrE(Loc(rk(a)), Loc(rk(b))),
                    Expr::Frst(a) => Expr::Frst(Loc(rk(a))),
                    Expr::Scnd(a) => Expr::Scnd(Loc(rk(a))),
                    Expr::HashE(a) => Expr::HashE(Loc(rk(a))),
                    Expr::PubOf(a) => Expr::PubOf(Loc(rk(a))),
                    other => other.clone(),
                };
                body.push(print_stmt(&Stmt::Bind(t.clone(), Loc(rk(v)), renamed)));
            }
            Stmt::Csrt(v, s) => body.push(print_stmt(&Stmt::Csrt(Loc(rk(v)), *s))),
            Stmt::Csame(a, b) => body.push(print_stmt(&Stmt::Csame(Loc(rk(a)), Loc(rk(b))))),
            Stmt::Ckypr(a, b) => body.push(print_stmt(&Stmt::Ckypr(Loc(rk(a)), Loc(rk(b))))),
            Stmt::Chash(a, b) => body.push(print_stmt(&Stmt::Chash(Loc(rk(a)), Loc(rk(b))))),
            Stmt::Cquot(v, s) => body.push(print_stmt(&Stmt::Cquot(Loc(rk(v)), s.clone()))),
        }
    }
    body.sort();
    (events, body)
}
