//! Command-line driver for the role compiler and its semantics tooling.
//!
//! Exit codes: 0 success, 1 compilation/check/run/verification failure,
//! 2 usage errors. Diagnostics go to standard error; artifacts (procs,
//! transcripts) go to standard output unless directed to files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use molly_core::compiler::compile;
use molly_core::derivability::{executability, Verdict};
use molly_core::interpreter::{exec, honest_env, ExecEnv, HonestMode, Store};
use molly_core::proc_ir::Proc;
use molly_core::runtime::{RtVal, TagSource};
use molly_core::semantics::{proc_transcript_valid, reflect_valuation, role_transcript_valid};
use molly_core::syntax::{
    parse_proc, parse_role, parse_store, parse_transcript, print_proc, print_store,
    print_transcript,
};
use molly_core::terms::Role;

#[derive(Parser)]
#[command(
    name = "molly",
    version,
    about = "Compile protocol roles to straight-line procs and validate their transcript semantics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Fresh,
    Shared,
}

impl From<Mode> for HonestMode {
    fn from(m: Mode) -> HonestMode {
        match m {
            Mode::Fresh => HonestMode::Fresh,
            Mode::Shared => HonestMode::SharedEncryption,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a role file into a proc
    Compile {
        role: PathBuf,
        /// Write the proc here instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report whether a role is executable; exit 1 when it is not
    Check { role: PathBuf },
    /// Compile and execute a role under an honest environment, or
    /// execute a proc file that needs no inputs
    Run {
        input: PathBuf,
        /// How repeated symbolic encryptions in fabricated messages
        /// relate at runtime
        #[arg(long, value_enum, default_value = "fresh")]
        mode: Mode,
        /// Seed for the environment and tag source (MOLLY_SEED
        /// overrides the default)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        emit_transcript: Option<PathBuf>,
        #[arg(long)]
        emit_store: Option<PathBuf>,
    },
    /// Check that a transcript is valid for a proc
    Verify {
        proc: PathBuf,
        transcript: PathBuf,
        /// Store witness; required when the proc generates or encrypts
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Execute a role repeatedly and check every completed run against
    /// the role's transcript semantics through the reflected valuation
    Reflect {
        role: PathBuf,
        #[arg(long, default_value_t = 20)]
        runs: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn default_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var("MOLLY_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn load_role(path: &Path) -> Result<Role> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_role(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_proc(path: &Path) -> Result<Proc> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_proc(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compile { role, output } => {
            let role = load_role(&role)?;
            match compile(&role) {
                Ok(proc) => {
                    let text = print_proc(&proc);
                    match output {
                        Some(path) => fs::write(&path, text)
                            .with_context(|| format!("cannot write {}", path.display()))?,
                        None => print!("{text}"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Check { role } => {
            let role = load_role(&role)?;
            let report = executability(&role).map_err(|e| anyhow!("{e}"))?;
            println!("{report}");
            Ok(match report.verdict {
                Verdict::Executable => ExitCode::SUCCESS,
                Verdict::NonExecutable => ExitCode::FAILURE,
            })
        }
        Command::Run {
            input,
            mode,
            seed,
            emit_transcript,
            emit_store,
        } => {
            let seed = default_seed(seed);
            let (proc, mut env) = prepare_run(&input, mode.into(), seed)?;
            match exec(&proc, &mut env) {
                Ok((store, transcript)) => {
                    print!("{}", print_transcript(&transcript));
                    if let Some(path) = emit_transcript {
                        fs::write(&path, print_transcript(&transcript))
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    if let Some(path) = emit_store {
                        let entries: Vec<_> =
                            store.entries().map(|(l, v)| (l, v.clone())).collect();
                        fs::write(&path, print_store(&entries))
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(failure) => {
                    eprintln!("execution halted: {failure}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Verify {
            proc,
            transcript,
            store,
        } => {
            let proc = load_proc(&proc)?;
            let tr_text = fs::read_to_string(&transcript)
                .with_context(|| format!("cannot read {}", transcript.display()))?;
            let tr =
                parse_transcript(&tr_text).map_err(|e| anyhow!("{}: {e}", transcript.display()))?;
            let witness = match store {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    let entries =
                        parse_store(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
                    Some(Store::from_entries(entries))
                }
                None => None,
            };
            let violations =
                proc_transcript_valid(&proc, &tr, witness.as_ref()).map_err(|e| anyhow!("{e}"))?;
            if violations.is_empty() {
                println!("valid");
                Ok(ExitCode::SUCCESS)
            } else {
                for v in violations {
                    eprintln!("{v}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Reflect { role, runs, seed } => {
            let role = load_role(&role)?;
            let seed = default_seed(seed);
            let proc = match compile(&role) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            let mut completed = 0u64;
            let mut halted = 0u64;
            let mut violations = 0u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1e2);
            for k in 0..runs {
                for mode in [HonestMode::Fresh, HonestMode::SharedEncryption] {
                    let base = honest_env(&role, mode, seed + k);
                    // One honest run and one with a perturbed message.
                    for fuzz in [false, true] {
                        let mut env = base.clone();
                        if fuzz && !env.inbound.is_empty() {
                            let idx = rng.gen_range(0..env.inbound.len());
                            env.inbound[idx] = perturb(&env.inbound[idx], &mut rng);
                        }
                        match exec(&proc, &mut env) {
                            Ok((store, tr)) => {
                                completed += 1;
                                let tau = reflect_valuation(&proc, &store);
                                let found = role_transcript_valid(&role, &tr, &tau);
                                if !found.is_empty() {
                                    violations += 1;
                                    for v in found {
                                        eprintln!("run {k} {mode:?}: {v}");
                                    }
                                }
                            }
                            Err(_) => halted += 1,
                        }
                    }
                }
            }
            println!(
                "runs: {} completed, {halted} halted, {violations} violations",
                completed
            );
            Ok(if violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn prepare_run(input: &Path, mode: HonestMode, seed: u64) -> Result<(Proc, ExecEnv)> {
    let text =
        fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let is_proc = input.extension().is_some_and(|e| e == "proc");
    let as_role = if is_proc {
        None
    } else if input.extension().is_some_and(|e| e == "role") {
        Some(parse_role(&text).map_err(|e| anyhow!("{}: {e}", input.display()))?)
    } else {
        parse_role(&text).ok()
    };
    match as_role {
        Some(role) => {
            let proc = compile(&role).map_err(|e| anyhow!("{e}"))?;
            let env = honest_env(&role, mode, seed);
            Ok((proc, env))
        }
        None => {
            let proc = parse_proc(&text).map_err(|e| anyhow!("{}: {e}", input.display()))?;
            let env = ExecEnv {
                params: vec![],
                inbound: vec![],
                tags: TagSource::seeded(seed),
            };
            Ok((proc, env))
        }
    }
}

fn perturb(v: &RtVal, rng: &mut ChaCha8Rng) -> RtVal {
    match v {
        RtVal::Atom(sort, id) => RtVal::Atom(*sort, id.wrapping_add(rng.gen_range(0..3))),
        RtVal::Pair(a, b) => RtVal::pair(perturb(a, rng), perturb(b, rng)),
        RtVal::Hash(a) => RtVal::hash(perturb(a, rng)),
        RtVal::Enc { plain, key, tag } => RtVal::enc(
            (**plain).clone(),
            (**key).clone(),
            tag.wrapping_add(rng.gen_range(0..2)),
        ),
        other => other.clone(),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
