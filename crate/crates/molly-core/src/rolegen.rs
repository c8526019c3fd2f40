//! Random role generation for the reflection and fuzzing harnesses.
//!
//! Candidates mix fully random terms with receive messages biased toward
//! material the role can actually analyze (params it holds, keys it can
//! derive), so a usable fraction of candidates compiles. Callers filter
//! through the compiler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compiler::compile;
use crate::terms::{Act, Role, Term};

#[derive(Debug, Clone, Copy)]
pub struct RoleGenConfig {
    pub max_events: usize,
    pub max_depth: usize,
}

impl Default for RoleGenConfig {
    fn default() -> Self {
        RoleGenConfig {
            max_events: 6,
            max_depth: 4,
        }
    }
}

pub struct RoleGen {
    rng: ChaCha8Rng,
    config: RoleGenConfig,
}

impl RoleGen {
    pub fn new(seed: u64, config: RoleGenConfig) -> RoleGen {
        RoleGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
        }
    }

    fn atom(&mut self) -> Term {
        match self.rng.gen_range(0..6) {
            0 => Term::Dt(self.rng.gen_range(1..=3)),
            1 => Term::Nm(self.rng.gen_range(0..=2)),
            2 => Term::Tx(self.rng.gen_range(1..=2)),
            3 => Term::Sk(self.rng.gen_range(1..=2)),
            4 => Term::Ik(self.rng.gen_range(1..=2)),
            _ => Term::Ak(self.rng.gen_range(1..=2)),
        }
    }

    fn term(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.15) {
                Term::qt(["hello", "ping", "ack"][self.rng.gen_range(0..3)])
            } else {
                self.atom()
            };
        }
        match self.rng.gen_range(0..4) {
            0 => Term::pr(self.term(depth - 1), self.term(depth - 1)),
            1 => Term::en(self.term(depth - 1), self.term(depth - 1)),
            2 => Term::hs(self.term(depth - 1)),
            _ => self.atom(),
        }
    }

    /// A term built over atoms the role already holds, so receptions of
    /// it tend to be analyzable.
    fn held_term(&mut self, held: &[Term], depth: usize) -> Term {
        if held.is_empty() {
            return self.term(depth);
        }
        if depth == 0 || self.rng.gen_bool(0.35) {
            return held[self.rng.gen_range(0..held.len())].clone();
        }
        match self.rng.gen_range(0..5) {
            0 => Term::pr(
                self.held_term(held, depth - 1),
                self.held_term(held, depth - 1),
            ),
            1 => {
                // Encrypt under something invertible from held material.
                let key = match self.rng.gen_range(0..3) {
                    0 => held[self.rng.gen_range(0..held.len())].clone(),
                    1 => Term::hs(self.held_term(held, depth - 1)),
                    _ => {
                        let n = self.rng.gen_range(1..=2);
                        if held.contains(&Term::Ik(n)) {
                            Term::Ak(n)
                        } else {
                            held[self.rng.gen_range(0..held.len())].clone()
                        }
                    }
                };
                Term::en(self.held_term(held, depth - 1), key)
            }
            2 => Term::hs(self.held_term(held, depth - 1)),
            3 => Term::qt(["hello", "ping"][self.rng.gen_range(0..2)]),
            _ => held[self.rng.gen_range(0..held.len())].clone(),
        }
    }

    /// One candidate role. Always opens with the channel parameter.
    pub fn candidate(&mut self) -> Role {
        let channel = Term::Ch(1);
        let mut role: Role = vec![Act::Prm(channel.clone())];
        let mut held: Vec<Term> = Vec::new();
        let events = self.rng.gen_range(1..self.config.max_events);
        for _ in 0..events {
            let depth = self.rng.gen_range(1..=self.config.max_depth - 1);
            match self.rng.gen_range(0..10) {
                0..=2 => {
                    let atom = self.atom();
                    held.push(atom.clone());
                    role.push(Act::Prm(atom));
                }
                3..=5 => {
                    let payload = if self.rng.gen_bool(0.5) {
                        self.term(depth)
                    } else {
                        self.held_term(&held, depth)
                    };
                    role.push(Act::Snd(channel.clone(), payload));
                }
                6..=8 => {
                    let payload = if self.rng.gen_bool(0.25) {
                        self.term(depth)
                    } else {
                        self.held_term(&held, depth)
                    };
                    role.push(Act::Rcv(channel.clone(), payload));
                }
                _ => {
                    let payload = self.held_term(&held, depth);
                    role.push(Act::Ret(payload));
                }
            }
        }
        role
    }

    /// Generate until `count` compilable roles are collected, giving up
    /// after `max_attempts` candidates.
    pub fn compilable(&mut self, count: usize, max_attempts: usize) -> Vec<Role> {
        let mut out = Vec::new();
        for _ in 0..max_attempts {
            if out.len() >= count {
                break;
            }
            let candidate = self.candidate();
            if compile(&candidate).is_ok() {
                out.push(candidate);
            }
        }
        out
    }
}
