//! Batch front end over the workbench: validate, measure, enumerate,
//! transform, compare, and fuzz rewriting systems stored as grammar files.
//!
//! Every subcommand prints a canonical document (or JSON where asked) so
//! runs can be diffed byte-for-byte, and all of them share one exit-code
//! contract: 0 success or property holds, 1 negative finding or invalid
//! input, 2 resource limit hit or verdict inconclusive, 3 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use regrew_core::cd::enumerate_bounded_cd_with;
use regrew_core::digest::device_digest;
use regrew_core::dsl::{parse_device, render_device};
use regrew_core::engine::{
    enumerate_bounded_with, membership_witness_with, EnumConfig, LanguageSample,
    MembershipOutcome,
};
use regrew_core::equiv::{bounded_equiv_with, EquivStatus};
use regrew_core::fuzz::{fuzz_pipeline, FuzzConfig};
use regrew_core::grammar::{Device, GrammarKind, Mode};
use regrew_core::randgen::ShapeConfig;
use regrew_core::symbol::Symbol;
use regrew_core::transform::{apply, TransformError, TransformOp, TransformOptions};
use regrew_core::validate::{lhs_clear_of_forbidding, validate_device};

pub const EXIT_OK: u8 = 0;
/// Negative finding: invalid input, counterexample, non-member.
pub const EXIT_FINDING: u8 = 1;
/// Resource limit hit, or the question could not be settled within it.
pub const EXIT_LIMIT: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

/// Environment variable overriding the visited-form budget of every
/// bounded search. The effective budget is echoed into each output
/// document, so saved runs stay reproducible.
pub const MAX_FORMS_VAR: &str = "REGREW_MAX_FORMS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit: u8,
    /// Primary output document; byte-stable for fixed inputs and flags.
    pub stdout: String,
    /// Diagnostics stream.
    pub stderr: String,
}

#[derive(Parser)]
#[command(
    name = "regrew",
    version,
    about = "Workbench for regulated context-free rewriting systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a grammar or system file against the well-formedness rules
    Validate { file: PathBuf },
    /// Print digest, size counts, and shape classification
    Stats { file: PathBuf },
    /// List every word derivable within a length bound
    Enum {
        file: PathBuf,
        #[arg(long)]
        bound: usize,
        /// Emit the sample as JSON instead of canonical text
        #[arg(long)]
        json: bool,
    },
    /// Search for a derivation of a single word
    Member {
        file: PathBuf,
        /// Space-separated terminal names, e.g. "a b a"
        #[arg(long)]
        word: String,
    },
    /// Apply one construction and emit the resulting device
    Transform {
        file: PathBuf,
        #[arg(long, value_parser = parse_op)]
        op: TransformOp,
        /// Write the constructed device here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Drop productions not reachable from the start symbol
        #[arg(long)]
        prune_unreachable: bool,
    },
    /// Apply a comma-separated chain of constructions
    Pipeline {
        file: PathBuf,
        /// Chain to apply in order, e.g. lemma1,lemma2,thm3
        #[arg(long)]
        ops: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        prune_unreachable: bool,
    },
    /// Compare the bounded languages of two files
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Run a construction chain over random grammars and compare languages
    Fuzz {
        /// Input family: rc or sc
        #[arg(long, value_parser = parse_kind)]
        kind: GrammarKind,
        /// Condition-checking mode; defaults to def1 for rc, def2 for sc
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        bound: usize,
        /// Chain under test, e.g. lemma1,lemma2
        #[arg(long)]
        ops: String,
        #[arg(long, default_value_t = 3)]
        nonterminals: usize,
        #[arg(long, default_value_t = 2)]
        terminals: usize,
        #[arg(long, default_value_t = 4)]
        productions: usize,
        #[arg(long, default_value_t = 3)]
        max_rhs_len: usize,
        #[arg(long, default_value_t = 1)]
        max_rhs_nonterminals: usize,
        #[arg(long, default_value_t = 0.4)]
        condition_prob: f64,
        /// Keep left-hand sides out of their own forbidding sets
        #[arg(long)]
        clear_own_forbid: bool,
    },
}

/// Parse `argv` (program name included) and run the selected subcommand.
/// Nothing is printed and the process is never exited; the caller decides
/// what to do with the outcome.
pub fn run_cli<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome {
                    exit: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => CommandOutcome { exit: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    match cli.cmd {
        Cmd::Validate { file } => cmd_validate(&file),
        Cmd::Stats { file } => cmd_stats(&file),
        Cmd::Enum { file, bound, json } => cmd_enum(&file, bound, json),
        Cmd::Member { file, word } => cmd_member(&file, &word),
        Cmd::Transform { file, op, output, prune_unreachable } => {
            cmd_transform(&file, op, output.as_deref(), prune_unreachable)
        }
        Cmd::Pipeline { file, ops, output, prune_unreachable } => {
            cmd_pipeline(&file, &ops, output.as_deref(), prune_unreachable)
        }
        Cmd::Equiv { left, right, bound } => cmd_equiv(&left, &right, bound),
        Cmd::Fuzz {
            kind,
            mode,
            count,
            seed,
            bound,
            ops,
            nonterminals,
            terminals,
            productions,
            max_rhs_len,
            max_rhs_nonterminals,
            condition_prob,
            clear_own_forbid,
        } => {
            let shape = ShapeConfig {
                nonterminals,
                terminals,
                productions,
                max_rhs_len,
                max_rhs_nonterminals,
                condition_prob,
                clear_own_forbid,
            };
            cmd_fuzz(kind, mode, count, seed, bound, &ops, shape)
        }
    }
}

fn parse_op(s: &str) -> Result<TransformOp, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<GrammarKind, String> {
    match s {
        "rc" => Ok(GrammarKind::Rc),
        "sc" => Ok(GrammarKind::Sc { per_degree: 1, forb_degree: 1 }),
        other => Err(format!("unknown kind `{other}` (expected rc or sc)")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "def1" => Ok(Mode::Def1),
        "def2" => Ok(Mode::Def2),
        other => Err(format!("unknown mode `{other}` (expected def1 or def2)")),
    }
}

fn fail(exit: u8, msg: impl Into<String>) -> CommandOutcome {
    CommandOutcome { exit, stdout: String::new(), stderr: format!("error: {}\n", msg.into()) }
}

fn read_device(path: &Path) -> Result<Device, CommandOutcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_LIMIT, format!("{}: {e}", path.display())))?;
    parse_device(&text).map_err(|e| fail(EXIT_FINDING, format!("{}: {e}", path.display())))
}

fn enum_config() -> Result<EnumConfig, CommandOutcome> {
    let mut cfg = EnumConfig::default();
    if let Some(raw) = std::env::var_os(MAX_FORMS_VAR) {
        let raw = raw.to_string_lossy();
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => cfg.max_forms = n,
            _ => {
                return Err(fail(
                    EXIT_LIMIT,
                    format!("{MAX_FORMS_VAR} must be a positive integer, got `{raw}`"),
                ))
            }
        }
    }
    Ok(cfg)
}

fn word_line(prefix: &str, word: &[Symbol]) -> String {
    let mut line = String::from(prefix);
    for s in word {
        line.push(' ');
        line.push_str(&s.to_string());
    }
    line.push('\n');
    line
}

/// Resolve space-separated names against the device's terminal alphabet.
fn parse_word(device: &Device, text: &str) -> Result<Vec<Symbol>, String> {
    let terminals = match device {
        Device::Grammar(g) => &g.terminals,
        Device::System(s) => &s.terminals,
    };
    let mut word = Vec::new();
    for tok in text.split_whitespace() {
        let sym = terminals
            .iter()
            .find(|s| s.atom_name() == Some(tok))
            .cloned()
            .ok_or_else(|| format!("`{tok}` is not a declared terminal"))?;
        word.push(sym);
    }
    Ok(word)
}

fn sample_device(d: &Device, bound: usize, cfg: &EnumConfig) -> LanguageSample {
    match d {
        Device::Grammar(g) => enumerate_bounded_with(g, bound, cfg),
        Device::System(s) => enumerate_bounded_cd_with(s, bound, cfg),
    }
}

fn transform_exit(e: &TransformError) -> u8 {
    match e {
        TransformError::StateCapExceeded { .. } | TransformError::Internal(_) => EXIT_LIMIT,
        _ => EXIT_FINDING,
    }
}

/// Render, then require the text to parse back to the same device before
/// letting it out of the process.
fn stable_text(device: &Device) -> Result<String, String> {
    let text = render_device(device).map_err(|e| format!("output failed to render: {e}"))?;
    let back =
        parse_device(&text).map_err(|e| format!("rendered output failed to re-parse: {e}"))?;
    if device_digest(&back) != device_digest(device) {
        return Err("rendered output re-parsed to a different device".to_string());
    }
    Ok(text)
}

fn emit_device(result: &Device, output: Option<&Path>, diagnostics: String) -> CommandOutcome {
    // Diagnostics describe work already done; keep them even when the
    // write itself is what fails.
    let fail_with = |msg: String| CommandOutcome {
        exit: EXIT_LIMIT,
        stdout: String::new(),
        stderr: format!("{diagnostics}error: {msg}\n"),
    };
    let text = match stable_text(result) {
        Ok(t) => t,
        Err(msg) => return fail_with(msg),
    };
    match output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                return fail_with(format!("{}: {e}", path.display()));
            }
            CommandOutcome { exit: EXIT_OK, stdout: String::new(), stderr: diagnostics }
        }
        None => CommandOutcome { exit: EXIT_OK, stdout: text, stderr: diagnostics },
    }
}

fn cmd_validate(file: &Path) -> CommandOutcome {
    let device = match read_device(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let report = validate_device(&device);
    let exit = if report.ok() { EXIT_OK } else { EXIT_FINDING };
    CommandOutcome { exit, stdout: report.canonical_text(), stderr: String::new() }
}

fn cmd_stats(file: &Path) -> CommandOutcome {
    let device = match read_device(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let report = validate_device(&device);
    let mut out = String::new();
    out.push_str("stats\n");
    out.push_str(&format!("digest {}\n", device_digest(&device)));
    match &device {
        Device::Grammar(g) => {
            match g.kind {
                GrammarKind::Rc => out.push_str("kind rc\n"),
                GrammarKind::Permitting => out.push_str("kind permitting\n"),
                GrammarKind::Forbidding => out.push_str("kind forbidding\n"),
                GrammarKind::Sc { per_degree, forb_degree } => {
                    out.push_str("kind sc\n");
                    out.push_str(&format!("degree {per_degree} {forb_degree}\n"));
                }
            }
            out.push_str(&format!("mode {}\n", g.mode));
            out.push_str(&format!("nonterminals {}\n", g.nonterminals.len()));
            out.push_str(&format!("terminals {}\n", g.terminals.len()));
            out.push_str(&format!("productions {}\n", g.productions.len()));
            out.push_str(&format!("lhs-clear-of-forbidding {}\n", lhs_clear_of_forbidding(g)));
        }
        Device::System(s) => {
            out.push_str("kind cd\n");
            out.push_str("mode def1\n");
            out.push_str(&format!("nonterminals {}\n", s.nonterminals.len()));
            out.push_str(&format!("terminals {}\n", s.terminals.len()));
            out.push_str(&format!("components {}\n", s.components.len()));
            out.push_str(&format!("productions {}\n", s.production_count()));
        }
    }
    let c = report.classification;
    out.push_str(&format!("valid {}\n", report.ok()));
    out.push_str(&format!("production-limited {}\n", c.production_limited));
    out.push_str(&format!("limited {}\n", c.limited));
    out.push_str(&format!(
        "measured per-len {} forb-len {} per-card {} forb-card {}\n",
        c.max_per_len, c.max_forb_len, c.max_per_card, c.max_forb_card
    ));
    CommandOutcome { exit: EXIT_OK, stdout: out, stderr: String::new() }
}

fn cmd_enum(file: &Path, bound: usize, json: bool) -> CommandOutcome {
    let cfg = match enum_config() {
        Ok(c) => c,
        Err(o) => return o,
    };
    let device = match read_device(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let sample = sample_device(&device, bound, &cfg);
    let stdout = if json { json_sample(&sample) } else { sample.canonical_text() };
    if sample.truncated {
        let note = format!(
            "note: hit the {} visited-form budget; the word list is incomplete\n",
            sample.max_forms
        );
        CommandOutcome { exit: EXIT_LIMIT, stdout, stderr: note }
    } else {
        CommandOutcome { exit: EXIT_OK, stdout, stderr: String::new() }
    }
}

fn json_sample(sample: &LanguageSample) -> String {
    let words: Vec<Vec<String>> = sample
        .words
        .iter()
        .map(|w| w.iter().map(|s| s.to_string()).collect())
        .collect();
    let doc = serde_json::json!({
        "digest": sample.source_digest,
        "bound": sample.bound,
        "max_forms": sample.max_forms,
        "states": sample.states_explored,
        "truncated": sample.truncated,
        "words": words,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json rendering cannot fail");
    text.push('\n');
    text
}

fn cmd_member(file: &Path, word: &str) -> CommandOutcome {
    let cfg = match enum_config() {
        Ok(c) => c,
        Err(o) => return o,
    };
    let device = match read_device(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let target = match parse_word(&device, word) {
        Ok(w) => w,
        Err(msg) => return fail(EXIT_FINDING, msg),
    };
    let mut out = String::new();
    out.push_str("membership\n");
    out.push_str(&format!("digest {}\n", device_digest(&device)));
    out.push_str(&format!("max-forms {}\n", cfg.max_forms));
    out.push_str(&word_line("word", &target));
    let exit = match &device {
        Device::Grammar(g) => match membership_witness_with(g, &target, &cfg) {
            MembershipOutcome::Member(steps) => {
                out.push_str("status member\n");
                out.push_str(&format!("steps {}\n", steps.len()));
                for s in &steps {
                    out.push_str(&format!("step {} at {} form {}\n", s.label, s.position, s.result));
                }
                EXIT_OK
            }
            MembershipOutcome::NonMember => {
                out.push_str("status non-member\n");
                EXIT_FINDING
            }
            MembershipOutcome::Inconclusive => {
                out.push_str("status inconclusive\n");
                EXIT_LIMIT
            }
        },
        // No per-production witness search for systems; a t-step derives
        // many productions at once. Bounded enumeration settles the
        // question whenever it completes.
        Device::System(s) => {
            let sample = enumerate_bounded_cd_with(s, target.len(), &cfg);
            if sample.words.contains(&target) {
                out.push_str("status member\n");
                EXIT_OK
            } else if sample.truncated {
                out.push_str("status inconclusive\n");
                EXIT_LIMIT
            } else {
                out.push_str("status non-member\n");
                EXIT_FINDING
            }
        }
    };
    CommandOutcome { exit, stdout: out, stderr: String::new() }
}

fn cmd_transform(
    file: &Path,
    op: TransformOp,
    output: Option<&Path>,
    prune_unreachable: bool,
) -> CommandOutcome {
    let device = match read_device(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let opts = TransformOptions { prune_unreachable, ..TransformOptions::default() };
    match apply(op, &device, &opts) {
        Ok((result, report)) => emit_device(&result, output, report.canonical_text()),
        Err(e) => fail(transform_exit(&e), e.to_string()),
    }
}

fn parse_ops(text: &str) -> Result<Vec<TransformOp>, CommandOutcome> {
    let mut ops = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok.parse::<TransformOp>() {
            Ok(op) => ops.push(op),
            Err(e) => return Err(fail(EXIT_USAGE, e)),
        }
    }
    if ops.is_empty() {
        return Err(fail(EXIT_USAGE, "--ops needs at least one transform name"));
    }
    Ok(ops)
}

fn cmd_pipeline(
    file: &Path,
    ops_text: &str,
    output: Option<&Path>,
    prune_unreachable: bool,
) -> CommandOutcome {
    let ops = match parse_ops(ops_text) {
        Ok(o) => o,
        Err(o) => return o,
    };
    let mut device = match read_device(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let opts = TransformOptions { prune_unreachable, ..TransformOptions::default() };
    let mut diag = String::new();
    for op in ops {
        // The permitting cooperating construction needs forbidding sets
        // clear of their own left-hand sides; splice in the normalization
        // rather than bouncing a chain the combined result supports.
        if op == TransformOp::Lemma2 {
            if let Device::Grammar(g) = &device {
                if g.kind == GrammarKind::Rc && !lhs_clear_of_forbidding(g) {
                    diag.push_str(
                        "note: inserted lemma1 before lemma2 \
                         (a forbidding set mentions its own left-hand side)\n",
                    );
                    match apply(TransformOp::Lemma1, &device, &opts) {
                        Ok((d, report)) => {
                            device = d;
                            diag.push_str(&report.canonical_text());
                        }
                        Err(e) => {
                            diag.push_str(&format!("error: {e}\n"));
                            return CommandOutcome {
                                exit: transform_exit(&e),
                                stdout: String::new(),
                                stderr: diag,
                            };
                        }
                    }
                }
            }
        }
        match apply(op, &device, &opts) {
            Ok((d, report)) => {
                device = d;
                diag.push_str(&report.canonical_text());
            }
            Err(e) => {
                diag.push_str(&format!("error: {e}\n"));
                return CommandOutcome {
                    exit: transform_exit(&e),
                    stdout: String::new(),
                    stderr: diag,
                };
            }
        }
    }
    emit_device(&device, output, diag)
}

fn cmd_equiv(left: &Path, right: &Path, bound: usize) -> CommandOutcome {
    let cfg = match enum_config() {
        Ok(c) => c,
        Err(o) => return o,
    };
    let l = match read_device(left) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let r = match read_device(right) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let report = bounded_equiv_with(&l, &r, bound, &cfg);
    let exit = match report.status {
        EquivStatus::Equal => EXIT_OK,
        EquivStatus::Counterexample { .. } => EXIT_FINDING,
        EquivStatus::Inconclusive { .. } => EXIT_LIMIT,
    };
    CommandOutcome { exit, stdout: report.canonical_text(), stderr: String::new() }
}

fn cmd_fuzz(
    kind: GrammarKind,
    mode: Option<Mode>,
    count: usize,
    seed: u64,
    bound: usize,
    ops_text: &str,
    shape: ShapeConfig,
) -> CommandOutcome {
    let ops = match parse_ops(ops_text) {
        Ok(o) => o,
        Err(o) => return o,
    };
    let enum_cfg = match enum_config() {
        Ok(c) => c,
        Err(o) => return o,
    };
    let mode = mode.unwrap_or(match kind {
        GrammarKind::Rc => Mode::Def1,
        _ => Mode::Def2,
    });
    let mut cfg = FuzzConfig::new(kind, mode, ops, bound);
    cfg.cases = count;
    cfg.seed = seed;
    cfg.shape = shape;
    cfg.enum_cfg = enum_cfg;
    let report = fuzz_pipeline(&cfg);
    let exit = if report.clean() { EXIT_OK } else { EXIT_FINDING };
    CommandOutcome { exit, stdout: report.canonical_text(), stderr: String::new() }
}
