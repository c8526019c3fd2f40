//! End-to-end runs of the `molly` binary against the shipped role
//! files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn roles_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../roles")
}

fn molly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molly"))
        .args(args)
        .env_remove("MOLLY_SEED")
        .output()
        .expect("binary runs")
}

fn role(name: &str) -> String {
    roles_dir().join(name).to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn compile_prints_the_proc() {
    let out = molly(&["compile", &role("init1.role")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let produced = molly_core::syntax::parse_proc(&text).unwrap();
    let expected = molly_core::compiler::compile(
        &molly_core::syntax::parse_role(&std::fs::read_to_string(role("init1.role")).unwrap())
            .unwrap(),
    )
    .unwrap();
    assert!(molly_core::compiler::proc_equiv(&produced, &expected));
    assert!(text.contains("Bind (Pr (Dt 1) (Dt 2), L 4) (Pair (L 2) (L 3))"));
}

#[test]
fn compile_failure_exits_one() {
    let out = molly(&["compile", &role("badhash.role")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("NotJustifiedHash"));
}

#[test]
fn check_reports_executability() {
    let out = molly(&["check", &role("encr1.role")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Executable"));

    let out = molly(&["check", &role("badhash.role")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("MissingHashBody (Dt 1)"));

    let out = molly(&["check", &role("fail1.role")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("MissingDecryptionKey (En (Dt 1) (Dt 2))"));
}

#[test]
fn run_emits_transcript_and_store_that_verify() {
    let dir = std::env::temp_dir().join(format!("molly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let proc_path = dir.join("encr1.proc");
    let tr_path = dir.join("encr1.transcript");
    let store_path = dir.join("encr1.store");

    let out = molly(&[
        "compile",
        &role("encr1.role"),
        "-o",
        proc_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = molly(&[
        "run",
        &role("encr1.role"),
        "--mode",
        "fresh",
        "--seed",
        "5",
        "--emit-transcript",
        tr_path.to_str().unwrap(),
        "--emit-store",
        store_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tr = molly_core::syntax::parse_transcript(&stdout(&out)).unwrap();
    assert_eq!(tr.len(), 4);

    let out = molly(&[
        "verify",
        proc_path.to_str().unwrap(),
        tr_path.to_str().unwrap(),
        "--store",
        store_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("valid"));

    // Corrupt the transcript: verification must fail.
    let text = std::fs::read_to_string(&tr_path).unwrap();
    let corrupted = text.replace("Atom[Name,", "Atom[Name,9");
    std::fs::write(&tr_path, corrupted).unwrap();
    let out = molly(&[
        "verify",
        proc_path.to_str().unwrap(),
        tr_path.to_str().unwrap(),
        "--store",
        store_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn run_fails_cleanly_in_fresh_mode_on_randomized_keys() {
    let out = molly(&["run", &role("fail2.role"), "--mode", "fresh", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("DecryptFailed"));

    let out = molly(&[
        "run",
        &role("fail2.role"),
        "--mode",
        "shared",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_free_procs_run_directly() {
    let dir = std::env::temp_dir().join(format!("molly-proc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gen.proc");
    std::fs::write(
        &path,
        "Bind (Dt 1, L 1) (Genr 1 Data)\nBind (Hs (Dt 1), L 2) (Hash (L 1))\nEvnt (Ret (L 2))\n",
    )
    .unwrap();
    let out = molly(&["run", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "Ret Hash(Atom[Data,1])");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reflect_passes_on_compilable_roles() {
    let out = molly(&[
        "reflect",
        &role("encr1.role"),
        "--runs",
        "25",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("0 violations"));

    let out = molly(&["reflect", &role("dupsend.role"), "--runs", "10"]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn seed_env_var_matches_explicit_seed() {
    let explicit = molly(&["run", &role("genhash.role"), "--seed", "42"]);
    let via_env = Command::new(env!("CARGO_BIN_EXE_molly"))
        .args(["run", &role("genhash.role")])
        .env("MOLLY_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(stdout(&explicit), String::from_utf8_lossy(&via_env.stdout));
}

#[test]
fn usage_errors_exit_two() {
    let out = molly(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = molly(&["run", &role("genhash.role"), "--mode", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn all_shipped_roles_parse_and_check_consistently() {
    let expectations = [
        ("init1.role", 0),
        ("resp1.role", 0),
        ("genhash.role", 0),
        ("badhash.role", 1),
        ("encr1.role", 0),
        ("encrfail.role", 1),
        ("encrsym.role", 0),
        ("fail1.role", 1),
        ("fail2.role", 0),
        ("fail3.role", 0),
        ("dupsend.role", 0),
    ];
    for (name, expected) in expectations {
        let out = molly(&["check", &role(name)]);
        assert_eq!(
            out.status.code(),
            Some(expected),
            "{name}: {}",
            stdout(&out)
        );
    }
}
