//! Derivation steps and exact bounded language enumeration.
//!
//! Two step relations are implemented. Under `def1` a production's
//! conditions are checked against the form with the rewritten occurrence
//! deleted; under `def2` against the whole form. Length-1 conditions
//! reduce to alphabet membership, longer ones are contiguous-substring
//! checks.
//!
//! Because every right-hand side is nonempty, form length never shrinks
//! along a derivation, so the language restricted to words of length at
//! most `n` is computable by exhausting the finitely many forms of
//! length at most `n`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::digest;
use crate::grammar::{Grammar, Mode};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;

pub(crate) mod compile;

use compile::CompiledGrammar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("sentential forms must be nonempty")]
    EmptyForm,
    #[error("position {position} out of range for a form of length {len}")]
    BadPosition { position: usize, len: usize },
    #[error("form symbol at position {position} does not match the production's left-hand side")]
    LhsMismatch { position: usize },
    #[error("component {component} out of range; the system has {count} components")]
    BadComponent { component: usize, count: usize },
    #[error("resource cap of {cap} forms exhausted")]
    ResourceCap { cap: usize },
}

/// A nonempty string of symbols being rewritten.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SententialForm(Vec<Symbol>);

impl SententialForm {
    pub fn new(symbols: Vec<Symbol>) -> Result<SententialForm, EngineError> {
        if symbols.is_empty() {
            return Err(EngineError::EmptyForm);
        }
        Ok(SententialForm(symbols))
    }

    pub fn singleton(s: Symbol) -> SententialForm {
        SententialForm(vec![s])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digest(&self) -> String {
        digest::form_digest(&self.0)
    }
}

impl fmt::Display for SententialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// One application of a production.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub label: u32,
    /// 0-based index of the rewritten occurrence in the source form.
    pub position: usize,
    pub result: SententialForm,
}

/// Limits and execution strategy for the bounded searches.
#[derive(Debug, Clone)]
pub struct EnumConfig {
    /// Visited-form budget per closure. Hitting it marks the result
    /// truncated (inconclusive), never silently incomplete.
    pub max_forms: usize,
    pub parallel: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { max_forms: 1_000_000, parallel: cfg!(feature = "parallel") }
    }
}

/// Exact bounded language slice: all words of length <= `bound`,
/// unless `truncated` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSample {
    pub source_digest: String,
    pub bound: usize,
    pub max_forms: usize,
    pub words: BTreeSet<Vec<Symbol>>,
    pub truncated: bool,
    pub states_explored: usize,
}

impl LanguageSample {
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("language-sample\n");
        out.push_str(&format!("digest {}\n", self.source_digest));
        out.push_str(&format!("bound {}\n", self.bound));
        out.push_str(&format!("max-forms {}\n", self.max_forms));
        out.push_str(&format!("states {}\n", self.states_explored));
        out.push_str(&format!("truncated {}\n", self.truncated));
        out.push_str(&format!("words {}\n", self.words.len()));
        for w in &self.words {
            out.push('w');
            for s in w {
                out.push(' ');
                out.push_str(&s.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Whether production `p` may rewrite `form[pos]` under `mode`.
///
/// This is the direct, uncompiled reading of the two step relations;
/// the search loops use an interned equivalent and the test suite holds
/// the two implementations against each other.
pub fn applicable(
    p: &Production,
    form: &SententialForm,
    pos: usize,
    mode: Mode,
) -> Result<bool, EngineError> {
    let syms = form.symbols();
    if pos >= syms.len() {
        return Err(EngineError::BadPosition { position: pos, len: syms.len() });
    }
    if syms[pos] != p.lhs {
        return Err(EngineError::LhsMismatch { position: pos });
    }
    let holds = |c: &Condition, ctx: &[Symbol]| -> bool {
        let w = c.symbols();
        w.len() <= ctx.len() && ctx.windows(w.len()).any(|win| win == w)
    };
    let ok = match mode {
        Mode::Def2 => {
            p.per.iter().all(|c| holds(c, syms)) && !p.forb.iter().any(|c| holds(c, syms))
        }
        Mode::Def1 => {
            let mut ctx = Vec::with_capacity(syms.len() - 1);
            ctx.extend_from_slice(&syms[..pos]);
            ctx.extend_from_slice(&syms[pos + 1..]);
            p.per.iter().all(|c| holds(c, &ctx)) && !p.forb.iter().any(|c| holds(c, &ctx))
        }
    };
    Ok(ok)
}

/// All derivation steps from `form`, ordered by (position, label).
pub fn successors(g: &Grammar, form: &SententialForm) -> Vec<DerivationStep> {
    let mut by_label: Vec<&Production> = g.productions.iter().collect();
    by_label.sort_by_key(|p| p.label);
    let syms = form.symbols();
    let mut out = Vec::new();
    for pos in 0..syms.len() {
        for p in &by_label {
            if p.lhs != syms[pos] {
                continue;
            }
            if applicable(p, form, pos, g.mode).expect("position and lhs checked") {
                let mut result = Vec::with_capacity(syms.len() - 1 + p.rhs.len());
                result.extend_from_slice(&syms[..pos]);
                result.extend_from_slice(&p.rhs);
                result.extend_from_slice(&syms[pos + 1..]);
                debug_assert!(result.len() >= syms.len());
                out.push(DerivationStep {
                    label: p.label,
                    position: pos,
                    result: SententialForm(result),
                });
            }
        }
    }
    out
}

fn expand_frontier(
    cg: &CompiledGrammar,
    frontier: &[Arc<[u32]>],
    bound: usize,
    parallel: bool,
) -> Vec<Vec<Vec<u32>>> {
    #[cfg(feature = "parallel")]
    if parallel && frontier.len() > 1 {
        use rayon::prelude::*;
        return frontier
            .par_iter()
            .map(|f| compile::successor_forms(&cg.set, cg.mode, f, bound).1)
            .collect();
    }
    let _ = parallel;
    frontier.iter().map(|f| compile::successor_forms(&cg.set, cg.mode, f, bound).1).collect()
}

pub fn enumerate_bounded(g: &Grammar, bound: usize) -> LanguageSample {
    enumerate_bounded_with(g, bound, &EnumConfig::default())
}

/// Breadth-first closure over all sentential forms of length <= `bound`
/// reachable from the start symbol. Frontier expansion may run in
/// parallel; visited-set updates happen on generation boundaries in
/// frontier order, so the outcome is identical for any worker count.
pub fn enumerate_bounded_with(g: &Grammar, bound: usize, cfg: &EnumConfig) -> LanguageSample {
    assert!(bound >= 1, "bound must be positive");
    let cg = CompiledGrammar::new(g);
    let mut sample = LanguageSample {
        source_digest: digest::grammar_digest(g),
        bound,
        max_forms: cfg.max_forms,
        words: BTreeSet::new(),
        truncated: false,
        states_explored: 0,
    };

    let start: Arc<[u32]> = Arc::from(vec![cg.start]);
    let mut visited: HashSet<Arc<[u32]>> = HashSet::new();
    visited.insert(start.clone());
    if cg.table.is_all_terminal(&start) {
        sample.words.insert(cg.table.decode(&start));
    }
    let mut frontier = vec![start];

    'search: while !frontier.is_empty() {
        let expanded = expand_frontier(&cg, &frontier, bound, cfg.parallel);
        let mut next = Vec::new();
        for succs in expanded {
            for s in succs {
                if visited.contains(&s[..]) {
                    continue;
                }
                if visited.len() >= cfg.max_forms {
                    sample.truncated = true;
                    break 'search;
                }
                let form: Arc<[u32]> = Arc::from(s);
                visited.insert(form.clone());
                if cg.table.is_all_terminal(&form) {
                    sample.words.insert(cg.table.decode(&form));
                }
                next.push(form);
            }
        }
        frontier = next;
    }

    sample.states_explored = visited.len();
    sample
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipOutcome {
    /// A full derivation from the start symbol to the word, in order.
    Member(Vec<DerivationStep>),
    NonMember,
    /// The search hit its resource cap before settling the question.
    Inconclusive,
}

pub fn membership_witness(g: &Grammar, word: &[Symbol]) -> MembershipOutcome {
    membership_witness_with(g, word, &EnumConfig::default())
}

/// Bounded search for a derivation of `word`, with parent links for
/// witness reconstruction. Sequential: witness choice depends on visit
/// order, and a stable (position, label)-first witness is worth more
/// than parallel speed here.
/// Backpointer for witness reconstruction: parent form, production
/// label, rewrite position.
type ParentLink = (Arc<[u32]>, u32, usize);

pub fn membership_witness_with(g: &Grammar, word: &[Symbol], cfg: &EnumConfig) -> MembershipOutcome {
    if word.is_empty() {
        return MembershipOutcome::NonMember;
    }
    let cg = CompiledGrammar::new(g);
    let Some(target) = cg.table.encode(word) else {
        // A symbol the grammar never mentions cannot be derived.
        return MembershipOutcome::NonMember;
    };
    let bound = word.len();

    let start: Arc<[u32]> = Arc::from(vec![cg.start]);
    if target == start[..] {
        return MembershipOutcome::Member(Vec::new());
    }
    let mut parents: HashMap<Arc<[u32]>, ParentLink> = HashMap::new();
    let mut visited: HashSet<Arc<[u32]>> = HashSet::new();
    visited.insert(start.clone());
    let mut frontier = vec![start];
    let mut found: Option<Arc<[u32]>> = None;

    'search: while !frontier.is_empty() && found.is_none() {
        let mut next = Vec::new();
        for f in &frontier {
            for (label, pos, s) in compile::successor_steps(&cg.set, cg.mode, f) {
                if s.len() > bound || visited.contains(&s[..]) {
                    continue;
                }
                if visited.len() >= cfg.max_forms {
                    return MembershipOutcome::Inconclusive;
                }
                let form: Arc<[u32]> = Arc::from(s);
                visited.insert(form.clone());
                parents.insert(form.clone(), (f.clone(), label, pos));
                if form[..] == target[..] {
                    found = Some(form);
                    break 'search;
                }
                next.push(form);
            }
        }
        frontier = next;
    }

    let Some(end) = found else {
        return MembershipOutcome::NonMember;
    };
    let mut steps = Vec::new();
    let mut cur = end;
    while let Some((parent, label, pos)) = parents.get(&cur) {
        steps.push(DerivationStep {
            label: *label,
            position: *pos,
            result: SententialForm(cg.table.decode(&cur)),
        });
        cur = parent.clone();
    }
    steps.reverse();
    MembershipOutcome::Member(steps)
}
