//! Randomized end-to-end checks of the constructions.
//!
//! Each case generates a grammar, pushes it through an operation
//! pipeline, and compares the bounded languages of input and output.
//! A counterexample is shrunk greedily — drop a production, then drop
//! single condition symbols, re-running the whole check after every
//! cut — so reported failures are minimal and re-verified by
//! construction.

use crate::dsl::render_grammar;
use crate::engine::EnumConfig;
use crate::equiv::{bounded_equiv_with, EquivStatus, Side};
use crate::grammar::{Device, Grammar, GrammarKind, Mode};
use crate::randgen::{random_grammar, ShapeConfig};
use crate::symbol::Symbol;
use crate::transform::{apply, TransformOp, TransformOptions};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub kind: GrammarKind,
    pub mode: Mode,
    pub ops: Vec<TransformOp>,
    pub cases: usize,
    /// First seed; case k uses seed + k.
    pub seed: u64,
    pub bound: usize,
    pub shape: ShapeConfig,
    pub enum_cfg: EnumConfig,
    pub transform: TransformOptions,
}

impl FuzzConfig {
    pub fn new(kind: GrammarKind, mode: Mode, ops: Vec<TransformOp>, bound: usize) -> FuzzConfig {
        FuzzConfig {
            kind,
            mode,
            ops,
            cases: 100,
            seed: 0,
            bound,
            shape: ShapeConfig::default(),
            enum_cfg: EnumConfig::default(),
            transform: TransformOptions::default(),
        }
    }
}

/// A shrunk counterexample: the pipeline changes this grammar's
/// bounded language, witnessed by `word`.
#[derive(Debug, Clone)]
pub struct FuzzFailure {
    pub seed: u64,
    pub grammar: Grammar,
    pub word: Vec<Symbol>,
    pub present_in: Side,
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub ops: Vec<TransformOp>,
    pub cases: usize,
    /// Form budget each case ran under.
    pub max_forms: usize,
    pub equal: usize,
    pub inconclusive: usize,
    pub errors: Vec<(u64, String)>,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    /// No counterexamples and no construction errors.
    pub fn clean(&self) -> bool {
        self.failures.is_empty() && self.errors.is_empty()
    }

    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("fuzz-report\n");
        let ops: Vec<&str> = self.ops.iter().map(|o| o.name()).collect();
        out.push_str(&format!("ops {}\n", ops.join(" ")));
        out.push_str(&format!("cases {}\n", self.cases));
        out.push_str(&format!("max-forms {}\n", self.max_forms));
        out.push_str(&format!("equal {}\n", self.equal));
        out.push_str(&format!("inconclusive {}\n", self.inconclusive));
        out.push_str(&format!("errors {}\n", self.errors.len()));
        out.push_str(&format!("failures {}\n", self.failures.len()));
        for (seed, msg) in &self.errors {
            out.push_str(&format!("error {seed} {msg}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!("failure {} {} w", f.seed, f.present_in));
            for s in &f.word {
                out.push_str(&format!(" {s}"));
            }
            out.push('\n');
            let text = render_grammar(&f.grammar)
                .unwrap_or_else(|e| format!("render failed: {e}\n"));
            for line in text.lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }
}

enum CaseOutcome {
    Equal,
    Inconclusive,
    Error(String),
    Counterexample { word: Vec<Symbol>, present_in: Side },
}

fn check(cfg: &FuzzConfig, g: &Grammar) -> CaseOutcome {
    let mut device = Device::Grammar(g.clone());
    for op in &cfg.ops {
        match apply(*op, &device, &cfg.transform) {
            Ok((next, _)) => device = next,
            Err(e) => return CaseOutcome::Error(e.to_string()),
        }
    }
    let report =
        bounded_equiv_with(&Device::Grammar(g.clone()), &device, cfg.bound, &cfg.enum_cfg);
    match report.status {
        EquivStatus::Equal => CaseOutcome::Equal,
        EquivStatus::Inconclusive { .. } => CaseOutcome::Inconclusive,
        EquivStatus::Counterexample { word, present_in } => {
            CaseOutcome::Counterexample { word, present_in }
        }
    }
}

fn relabeled(mut g: Grammar) -> Grammar {
    for (i, p) in g.productions.iter_mut().enumerate() {
        p.label = i as u32 + 1;
    }
    g
}

/// Greedy minimization. Every accepted cut re-ran the full pipeline
/// and still produced a counterexample, so the result needs no
/// separate re-verification.
fn shrink(
    cfg: &FuzzConfig,
    g: Grammar,
    word: Vec<Symbol>,
    present_in: Side,
) -> (Grammar, Vec<Symbol>, Side) {
    let mut current = g;
    let mut witness = (word, present_in);
    'grow: loop {
        if current.productions.len() > 1 {
            for skip in 0..current.productions.len() {
                let mut candidate = current.clone();
                candidate.productions.remove(skip);
                let candidate = relabeled(candidate);
                if let CaseOutcome::Counterexample { word, present_in } =
                    check(cfg, &candidate)
                {
                    current = candidate;
                    witness = (word, present_in);
                    continue 'grow;
                }
            }
        }
        for idx in 0..current.productions.len() {
            for per_side in [true, false] {
                let set = if per_side {
                    &current.productions[idx].per
                } else {
                    &current.productions[idx].forb
                };
                for cond in set.clone() {
                    let mut candidate = current.clone();
                    let set = if per_side {
                        &mut candidate.productions[idx].per
                    } else {
                        &mut candidate.productions[idx].forb
                    };
                    set.remove(&cond);
                    if let CaseOutcome::Counterexample { word, present_in } =
                        check(cfg, &candidate)
                    {
                        current = candidate;
                        witness = (word, present_in);
                        continue 'grow;
                    }
                }
            }
        }
        let (word, present_in) = witness;
        return (current, word, present_in);
    }
}

enum Resolved {
    Equal,
    Inconclusive,
    Error(String),
    Failure(FuzzFailure),
}

fn run_seed(cfg: &FuzzConfig, seed: u64) -> Resolved {
    let g = random_grammar(cfg.kind, cfg.mode, &cfg.shape, seed);
    match check(cfg, &g) {
        CaseOutcome::Equal => Resolved::Equal,
        CaseOutcome::Inconclusive => Resolved::Inconclusive,
        CaseOutcome::Error(e) => Resolved::Error(e),
        CaseOutcome::Counterexample { word, present_in } => {
            let (grammar, word, present_in) = shrink(cfg, g, word, present_in);
            Resolved::Failure(FuzzFailure { seed, grammar, word, present_in })
        }
    }
}

pub fn fuzz_pipeline(cfg: &FuzzConfig) -> FuzzReport {
    let seeds: Vec<u64> = (0..cfg.cases as u64).map(|k| cfg.seed + k).collect();
    let resolve_all = || seeds.iter().map(|s| run_seed(cfg, *s)).collect();
    #[cfg(feature = "parallel")]
    let results: Vec<Resolved> = if cfg.enum_cfg.parallel && cfg.cases > 1 {
        use rayon::prelude::*;
        seeds.par_iter().map(|s| run_seed(cfg, *s)).collect()
    } else {
        resolve_all()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Resolved> = resolve_all();

    let mut report = FuzzReport {
        ops: cfg.ops.clone(),
        cases: cfg.cases,
        max_forms: cfg.enum_cfg.max_forms,
        equal: 0,
        inconclusive: 0,
        errors: Vec::new(),
        failures: Vec::new(),
    };
    for (seed, outcome) in seeds.iter().zip(results) {
        match outcome {
            Resolved::Equal => report.equal += 1,
            Resolved::Inconclusive => report.inconclusive += 1,
            Resolved::Error(e) => report.errors.push((*seed, e)),
            Resolved::Failure(f) => report.failures.push(f),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_grammar;

    #[test]
    fn preserving_pipeline_comes_back_clean() {
        let mut cfg = FuzzConfig::new(
            GrammarKind::Rc,
            Mode::Def1,
            vec![TransformOp::Lemma1],
            4,
        );
        cfg.cases = 25;
        let report = fuzz_pipeline(&cfg);
        assert!(report.clean(), "{}", report.canonical_text());
        assert_eq!(report.equal + report.inconclusive, report.cases);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let mut cfg = FuzzConfig::new(
            GrammarKind::Rc,
            Mode::Def2,
            vec![TransformOp::RcDef2To1],
            4,
        );
        cfg.cases = 15;
        cfg.enum_cfg.parallel = false;
        let seq = fuzz_pipeline(&cfg).canonical_text();
        cfg.enum_cfg.parallel = true;
        let par = fuzz_pipeline(&cfg).canonical_text();
        assert_eq!(seq, par);
    }

    #[test]
    fn precondition_misuse_lands_in_errors() {
        let mut cfg = FuzzConfig::new(
            GrammarKind::Rc,
            Mode::Def1,
            vec![TransformOp::RcDef2To1],
            3,
        );
        cfg.cases = 3;
        let report = fuzz_pipeline(&cfg);
        assert_eq!(report.errors.len(), 3);
        assert!(!report.clean());
        assert!(report.canonical_text().contains("errors 3"));
    }

    #[test]
    fn failure_rendering_includes_the_grammar() {
        let g = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap();
        let report = FuzzReport {
            ops: vec![TransformOp::Lemma1],
            cases: 1,
            max_forms: 1_000_000,
            equal: 0,
            inconclusive: 0,
            errors: Vec::new(),
            failures: vec![FuzzFailure {
                seed: 7,
                grammar: g,
                word: vec![Symbol::terminal("a").unwrap()],
                present_in: Side::Left,
            }],
        };
        let text = report.canonical_text();
        assert!(text.contains("failure 7 left w a\n"));
        assert!(text.contains("  kind rc\n"));
    }
}
