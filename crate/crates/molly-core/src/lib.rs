//! Compiles cryptographic protocol roles into straight-line procedures,
//! and validates the compilation against a transcript semantics.
//!
//! A role is one participant's view of a protocol: parameters, sends,
//! receives, and returns over symbolic terms. [`compiler::compile`]
//! turns a role into a proc — a straight-line program of events, binds,
//! and checks over storage locations. [`interpreter::exec`] runs a proc
//! against a model runtime with randomized encryption, producing a store
//! and a transcript, and [`semantics`] provides the machinery to check
//! that every transcript of the compiled proc is a transcript of its
//! source role, witnessed by the composition of the binding relation
//! with the store.

pub mod compiler;
pub mod derivability;
pub mod interpreter;
pub mod proc_ir;
pub mod rolegen;
pub mod runtime;
pub mod semantics;
pub mod syntax;
pub mod terms;

pub use compiler::{compile, CompileError};
pub use interpreter::{exec, honest_env, ExecEnv, HonestMode, Store};
pub use proc_ir::{Expr, Loc, Proc, Stmt};
pub use runtime::{RtVal, TagSource};
pub use semantics::{Transcript, Valuation};
pub use syntax::{parse_proc, parse_role, print_proc, print_role, ParseError};
pub use terms::{Act, Role, Sort, Term};
