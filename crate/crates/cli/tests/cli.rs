//! End-to-end runs of the `regrew` binary: exit-code contract, document
//! shapes, and byte stability of repeated invocations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GROWING: &str = "kind rc\nnonterminals S\nterminals a\nstart S\nS -> S S\nS -> a\n";
const FINITE: &str = "kind rc\nnonterminals S\nterminals a\nstart S\nS -> a a\nS -> a\n";
const OWN_FORBID: &str =
    "kind rc\nnonterminals S\nterminals a\nstart S\nS -> S S for S\nS -> a\n";
const BAD_SHAPE: &str =
    "kind rc\nnonterminals S\nterminals a\nstart S\nS -> S S per a\nS -> a\n";

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn regrew(args: &[&str]) -> Output {
    regrew_env(args, &[])
}

fn regrew_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_regrew"));
    cmd.args(args).env_remove("REGREW_MAX_FORMS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process was signalled")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    let help = regrew(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("regrew"));

    let unknown = regrew(&["frobnicate"]);
    assert_eq!(code(&unknown), 3);
    assert!(!stderr(&unknown).is_empty());

    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);
    let bad_op = regrew(&["transform", path(&g), "--op", "thm1", "-o", "/dev/null"]);
    assert_eq!(code(&bad_op), 3);
    assert!(stderr(&bad_op).contains("thm1"));
}

#[test]
fn validate_reports_violations() {
    let dir = TempDir::new().unwrap();
    let ok = regrew(&["validate", path(&write(&dir, "g.rg", GROWING))]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).starts_with("ok true\n"));

    let bad = regrew(&["validate", path(&write(&dir, "bad.rg", BAD_SHAPE))]);
    assert_eq!(code(&bad), 1);
    let text = stdout(&bad);
    assert!(text.starts_with("ok false\n"));
    assert!(text.contains("rc-condition-shape at production 1"));
}

#[test]
fn unreadable_and_unparsable_inputs_are_distinct() {
    let missing = regrew(&["validate", "/nonexistent/g.rg"]);
    assert_eq!(code(&missing), 2, "io trouble is a resource error");

    let dir = TempDir::new().unwrap();
    let mangled = write(&dir, "m.rg", "kind rc\nstart S\nS -> a\n");
    let parse = regrew(&["validate", path(&mangled)]);
    assert_eq!(code(&parse), 1, "a bad grammar is a finding");
    assert!(stderr(&parse).contains("error:"));
}

#[test]
fn stats_describes_the_grammar() {
    let dir = TempDir::new().unwrap();
    let out = regrew(&["stats", path(&write(&dir, "g.rg", GROWING))]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for line in ["stats\n", "kind rc\n", "mode def1\n", "productions 2\n", "limited true\n"] {
        assert!(text.contains(line), "missing {line:?} in:\n{text}");
    }
}

#[test]
fn enum_lists_words_within_bound() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);
    let out = regrew(&["enum", path(&g), "--bound", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("bound 3\n"));
    assert!(text.contains("truncated false\n"));
    assert!(text.contains("words 3\n"));
    assert!(text.ends_with("w a\nw a a\nw a a a\n"));

    let json = regrew(&["enum", path(&g), "--bound", "2", "--json"]);
    assert_eq!(code(&json), 0);
    let text = stdout(&json);
    assert!(text.contains("\"truncated\": false"));
    assert!(text.contains("\"bound\": 2"));
}

#[test]
fn form_budget_env_var_controls_enumeration() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);

    let cut = regrew_env(&["enum", path(&g), "--bound", "6"], &[("REGREW_MAX_FORMS", "2")]);
    assert_eq!(code(&cut), 2, "truncation is inconclusive");
    assert!(stdout(&cut).contains("max-forms 2\n"));
    assert!(stdout(&cut).contains("truncated true\n"));
    assert!(!stderr(&cut).is_empty());

    let junk = regrew_env(&["enum", path(&g), "--bound", "2"], &[("REGREW_MAX_FORMS", "soon")]);
    assert_eq!(code(&junk), 2);
    assert!(stderr(&junk).contains("REGREW_MAX_FORMS"));
}

#[test]
fn member_reports_a_derivation() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);

    let yes = regrew(&["member", path(&g), "--word", "a a"]);
    assert_eq!(code(&yes), 0);
    let text = stdout(&yes);
    assert!(text.contains("status member\n"));
    assert!(text.contains("step 1 at 0 form S S\n"));

    let finite = write(&dir, "f.rg", FINITE);
    let no = regrew(&["member", path(&finite), "--word", "a a a"]);
    assert_eq!(code(&no), 1);
    assert!(stdout(&no).contains("status non-member\n"));

    let alien = regrew(&["member", path(&g), "--word", "a b"]);
    assert_eq!(code(&alien), 1);
    assert!(stderr(&alien).contains("`b` is not a declared terminal"));
}

#[test]
fn transform_output_passes_validation_and_stays_equivalent() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", OWN_FORBID);
    let out_path = dir.path().join("lemma1.rg");

    let tr = regrew(&["transform", path(&g), "--op", "lemma1", "-o", path(&out_path)]);
    assert_eq!(code(&tr), 0);
    assert!(stdout(&tr).is_empty(), "file output keeps stdout clean");
    let report = stderr(&tr);
    assert!(report.contains("transform-report\nop lemma1\n"));

    assert_eq!(code(&regrew(&["validate", path(&out_path)])), 0);
    let eq = regrew(&["equiv", path(&g), path(&out_path), "--bound", "5"]);
    assert_eq!(code(&eq), 0);
    assert!(stdout(&eq).contains("status equal\n"));
}

#[test]
fn transform_requires_the_right_device_kind() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);
    let out = regrew(&["transform", path(&g), "--op", "thm3", "-o", "/dev/null"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn pipeline_inserts_missing_normalization() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", OWN_FORBID);
    let out_path = dir.path().join("walker.rg");

    let run = regrew(&["pipeline", path(&g), "--ops", "lemma2,thm3", "-o", path(&out_path)]);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    let log = stderr(&run);
    assert!(log.contains("note: inserted lemma1"));
    for op in ["op lemma1", "op lemma2", "op thm3"] {
        assert!(log.contains(op), "missing {op} in pipeline log:\n{log}");
    }

    let eq = regrew(&["equiv", path(&g), path(&out_path), "--bound", "4"]);
    assert_eq!(code(&eq), 0);
    assert!(stdout(&eq).contains("status equal\n"));
}

#[test]
fn equiv_separates_counterexample_from_truncation() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);
    let f = write(&dir, "f.rg", FINITE);

    let differ = regrew(&["equiv", path(&g), path(&f), "--bound", "4"]);
    assert_eq!(code(&differ), 1);
    assert!(stdout(&differ).contains("status counterexample left w a a a\n"));

    let starved = regrew_env(
        &["equiv", path(&g), path(&f), "--bound", "4"],
        &[("REGREW_MAX_FORMS", "1")],
    );
    assert_eq!(code(&starved), 2);
    assert!(stdout(&starved).contains("status inconclusive"));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.rg", GROWING);

    for args in [
        vec!["stats", path(&g)],
        vec!["enum", path(&g), "--bound", "4"],
        vec![
            "fuzz", "--kind", "rc", "--count", "5", "--seed", "3", "--bound", "3", "--ops",
            "rc-def1to2",
        ],
    ] {
        let first = regrew(&args);
        let second = regrew(&args);
        assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
        assert_eq!(first.stdout, second.stdout, "unstable output for {args:?}");
    }
}

#[test]
fn fuzz_summarizes_outcomes() {
    let out = regrew(&[
        "fuzz", "--kind", "rc", "--count", "5", "--seed", "3", "--bound", "3", "--ops",
        "rc-def1to2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for line in ["fuzz-report\n", "cases 5\n", "equal 5\n", "failures 0\n"] {
        assert!(text.contains(line), "missing {line:?} in:\n{text}");
    }

    let misuse = regrew(&[
        "fuzz", "--kind", "rc", "--count", "3", "--seed", "1", "--bound", "3", "--ops",
        "rc-def2to1",
    ]);
    assert_eq!(code(&misuse), 1, "precondition misuse is a finding");
    assert!(stdout(&misuse).contains("errors 3\n"));
}
