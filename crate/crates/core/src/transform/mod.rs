//! Grammar-to-grammar and grammar-to-system constructions.
//!
//! Every operation here consumes a validated device and emits a new one
//! together with a [`TransformReport`] that attributes each output
//! production to the construction clause that introduced it. The
//! constructions never mutate their input and never share `Production`
//! values with it.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::digest::device_digest;
use crate::grammar::{CDSystem, Device, Grammar, Mode};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;
use crate::validate::validate_device;

mod cd_to_sc;
mod limited;
mod rc_modes;
mod rc_to_cd;
mod sc_modes;
mod sc_to_rc;
#[cfg(test)]
mod tests;

pub use cd_to_sc::pcd_to_sc;
pub use limited::rc_limited_normal_form;
pub use rc_modes::{rc_def1_to_def2, rc_def2_to_def1, rc_normalize_forbid};
pub use rc_to_cd::rc_to_permitting_cd;
pub use sc_modes::{sc_def1_to_def2, sc_def2_to_def1};
pub use sc_to_rc::sc_def2_to_rc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransformOp {
    ScToRc,
    ScDef2To1,
    ScDef1To2,
    RcDef2To1,
    RcDef1To2,
    Lemma1,
    Lemma2,
    Thm3,
    LimitedNf,
}

impl TransformOp {
    pub const ALL: [TransformOp; 9] = [
        TransformOp::ScToRc,
        TransformOp::ScDef2To1,
        TransformOp::ScDef1To2,
        TransformOp::RcDef2To1,
        TransformOp::RcDef1To2,
        TransformOp::Lemma1,
        TransformOp::Lemma2,
        TransformOp::Thm3,
        TransformOp::LimitedNf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TransformOp::ScToRc => "sc-to-rc",
            TransformOp::ScDef2To1 => "sc-def2to1",
            TransformOp::ScDef1To2 => "sc-def1to2",
            TransformOp::RcDef2To1 => "rc-def2to1",
            TransformOp::RcDef1To2 => "rc-def1to2",
            TransformOp::Lemma1 => "lemma1",
            TransformOp::Lemma2 => "lemma2",
            TransformOp::Thm3 => "thm3",
            TransformOp::LimitedNf => "limited-nf",
        }
    }
}

impl fmt::Display for TransformOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TransformOp::ALL
            .iter()
            .copied()
            .find(|op| op.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = TransformOp::ALL.iter().map(|o| o.name()).collect();
                format!("unknown operation `{s}`; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct TransformOptions {
    /// Drop output productions whose left-hand side can never occur in
    /// a sentential form, then relabel. Off by default: the untouched
    /// output mirrors the construction one-to-one.
    pub prune_unreachable: bool,
    /// Upper bound on bookkeeping states instantiated per component by
    /// the CD-to-SC construction.
    pub state_cap: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { prune_unreachable: false, state_cap: 4096 }
    }
}

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("operation expects {expected}, got {found}")]
    WrongKind { expected: &'static str, found: String },
    #[error("operation expects mode {expected}, got {found}")]
    WrongMode { expected: Mode, found: Mode },
    #[error("input failed validation:\n{0}")]
    InvalidInput(String),
    #[error("operation requires every left-hand side to stay out of its own forbidding set")]
    ForbidsOwnLhs,
    #[error("operation expects a production-limited grammar")]
    NotProductionLimited,
    #[error("construction needs `{symbol}` to be fresh, but the input already declares it")]
    SymbolCollision { symbol: String },
    #[error("component {component} needs {needed} bookkeeping states, over the cap of {cap}")]
    StateCapExceeded { component: usize, needed: usize, cap: usize },
    #[error("component {component} production {label} carries more than one permitting symbol")]
    ConditionTooWide { component: usize, label: u32 },
    #[error("construction produced an invalid device, which is a bug:\n{0}")]
    Internal(String),
}

/// Where an output production came from: the clause tag plus its final
/// position. `component` is 1-based and absent for plain grammars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseEntry {
    pub component: Option<u32>,
    pub label: u32,
    pub clause: &'static str,
}

#[derive(Debug, Clone)]
pub struct TransformReport {
    pub op: TransformOp,
    pub input_digest: String,
    pub output_digest: String,
    pub input_symbols: usize,
    pub output_symbols: usize,
    pub input_productions: usize,
    pub output_productions: usize,
    /// Names of the output components in order, empty for grammars.
    pub component_names: Vec<String>,
    /// One entry per output production, in output order.
    pub clauses: Vec<ClauseEntry>,
    pub pruned_productions: usize,
    pub warnings: Vec<String>,
}

impl TransformReport {
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("transform-report\n");
        out.push_str(&format!("op {}\n", self.op));
        out.push_str(&format!("input-digest {}\n", self.input_digest));
        out.push_str(&format!("output-digest {}\n", self.output_digest));
        out.push_str(&format!("symbols {} -> {}\n", self.input_symbols, self.output_symbols));
        out.push_str(&format!(
            "productions {} -> {}\n",
            self.input_productions, self.output_productions
        ));
        if self.pruned_productions > 0 {
            out.push_str(&format!("pruned {}\n", self.pruned_productions));
        }
        if !self.component_names.is_empty() {
            out.push_str(&format!("components {}\n", self.component_names.join(" ")));
        }
        for entry in &self.clauses {
            match entry.component {
                Some(c) => out.push_str(&format!("clause {}:{} {}\n", c, entry.label, entry.clause)),
                None => out.push_str(&format!("clause {} {}\n", entry.label, entry.clause)),
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning {w}\n"));
        }
        out
    }
}

/// Apply one operation to a device. Grammar-only operations reject
/// systems and vice versa; see the typed entry points for the exact
/// signatures.
pub fn apply(
    op: TransformOp,
    input: &Device,
    opts: &TransformOptions,
) -> Result<(Device, TransformReport), TransformError> {
    match op {
        TransformOp::Thm3 => {
            let sys = expect_system(input)?;
            let (g, report) = pcd_to_sc(sys, opts)?;
            Ok((Device::Grammar(g), report))
        }
        TransformOp::Lemma2 => {
            let g = expect_grammar(input)?;
            let (sys, report) = rc_to_permitting_cd(g, opts)?;
            Ok((Device::System(sys), report))
        }
        _ => {
            let g = expect_grammar(input)?;
            let (out, report) = match op {
                TransformOp::ScToRc => sc_def2_to_rc(g, opts)?,
                TransformOp::ScDef2To1 => sc_def2_to_def1(g, opts)?,
                TransformOp::ScDef1To2 => sc_def1_to_def2(g, opts)?,
                TransformOp::RcDef2To1 => rc_def2_to_def1(g, opts)?,
                TransformOp::RcDef1To2 => rc_def1_to_def2(g, opts)?,
                TransformOp::Lemma1 => rc_normalize_forbid(g, opts)?,
                TransformOp::LimitedNf => rc_limited_normal_form(g, opts)?,
                _ => unreachable!("system ops handled above"),
            };
            Ok((Device::Grammar(out), report))
        }
    }
}

fn expect_grammar(d: &Device) -> Result<&Grammar, TransformError> {
    d.as_grammar().ok_or(TransformError::WrongKind {
        expected: "a grammar",
        found: "cd system".to_string(),
    })
}

fn expect_system(d: &Device) -> Result<&CDSystem, TransformError> {
    d.as_system().ok_or(TransformError::WrongKind {
        expected: "a cd system",
        found: "grammar".to_string(),
    })
}

/// Shared precondition: the input must pass validation.
pub(crate) fn require_valid(d: &Device) -> Result<(), TransformError> {
    let report = validate_device(d);
    if report.ok() {
        Ok(())
    } else {
        Err(TransformError::InvalidInput(report.canonical_text()))
    }
}

/// Symbols that can ever occur in a sentential form: closure from the
/// start symbol over left-hand sides, through right-hand sides.
/// Condition symbols are only observed, never produced, so they do not
/// extend the closure.
fn reachable_symbols(start: &Symbol, prod_lists: &[&[Production]]) -> BTreeSet<Symbol> {
    let mut reach: BTreeSet<Symbol> = BTreeSet::new();
    reach.insert(start.clone());
    loop {
        let mut grew = false;
        for prods in prod_lists {
            for p in *prods {
                if reach.contains(&p.lhs) {
                    for s in &p.rhs {
                        if reach.insert(s.clone()) {
                            grew = true;
                        }
                    }
                }
            }
        }
        if !grew {
            return reach;
        }
    }
}

type ProductionKey = (Symbol, Vec<Symbol>, BTreeSet<Condition>, BTreeSet<Condition>);

/// Builder that collects output productions with their clause tags,
/// deduplicates structurally identical ones (first tag wins), and
/// finalizes labels, optional pruning, and the report.
pub(crate) struct OutputBuilder {
    op: TransformOp,
    input_digest: String,
    input_symbols: usize,
    input_productions: usize,
    components: Vec<(String, Vec<(Production, &'static str)>)>,
    seen: HashSet<ProductionKey>,
    warnings: Vec<String>,
}

impl OutputBuilder {
    pub(crate) fn new(op: TransformOp, input: &Device) -> OutputBuilder {
        let (input_symbols, input_productions) = match input {
            Device::Grammar(g) => {
                (g.nonterminals.len() + g.terminals.len(), g.productions.len())
            }
            Device::System(s) => {
                (s.nonterminals.len() + s.terminals.len(), s.production_count())
            }
        };
        OutputBuilder {
            op,
            input_digest: device_digest(input),
            input_symbols,
            input_productions,
            components: Vec::new(),
            seen: HashSet::new(),
            warnings: Vec::new(),
        }
    }

    /// Open a new output component; grammar-producing ops use exactly
    /// one. Deduplication is scoped to the component: distinct
    /// components may deliberately hold identical productions.
    pub(crate) fn component(&mut self, name: &str) {
        self.components.push((name.to_string(), Vec::new()));
        self.seen.clear();
    }

    /// Add a production to the current component unless an identical one
    /// (same lhs, rhs, and condition sets) is already there. The label
    /// on `p` is ignored; final labels are assigned on `finish`.
    pub(crate) fn push(&mut self, p: Production, clause: &'static str) {
        let comp = self.components.last_mut().expect("component opened before push");
        let key = (p.lhs.clone(), p.rhs.clone(), p.per.clone(), p.forb.clone());
        if self.seen.insert(key) {
            comp.1.push((p, clause));
        }
    }

    pub(crate) fn warn(&mut self, text: String) {
        self.warnings.push(text);
    }

    /// Assemble a grammar from the single collected component.
    pub(crate) fn finish_grammar(
        mut self,
        mut g: Grammar,
        opts: &TransformOptions,
    ) -> Result<(Grammar, TransformReport), TransformError> {
        assert_eq!(self.components.len(), 1, "grammar output uses one component");
        let (_, mut prods) = self.components.pop().unwrap();
        let mut pruned = 0;
        if opts.prune_unreachable {
            let all: Vec<Production> = prods.iter().map(|(p, _)| p.clone()).collect();
            let reach = reachable_symbols(&g.start, &[&all]);
            let before = prods.len();
            prods.retain(|(p, _)| reach.contains(&p.lhs));
            pruned = before - prods.len();
        }
        let mut clauses = Vec::with_capacity(prods.len());
        g.productions = prods
            .into_iter()
            .enumerate()
            .map(|(i, (mut p, clause))| {
                p.label = (i + 1) as u32;
                clauses.push(ClauseEntry { component: None, label: p.label, clause });
                p
            })
            .collect();
        let out = Device::Grammar(g);
        require_output_valid(&out)?;
        let report = self.report(&out, Vec::new(), clauses, pruned);
        match out {
            Device::Grammar(g) => Ok((g, report)),
            Device::System(_) => unreachable!(),
        }
    }

    /// Assemble a system from all collected components, in order.
    pub(crate) fn finish_system(
        mut self,
        mut sys: CDSystem,
        opts: &TransformOptions,
    ) -> Result<(CDSystem, TransformReport), TransformError> {
        let mut names = Vec::with_capacity(self.components.len());
        let mut lists = std::mem::take(&mut self.components);
        let mut pruned = 0;
        if opts.prune_unreachable {
            let all: Vec<Production> = lists
                .iter()
                .flat_map(|(_, prods)| prods.iter().map(|(p, _)| p.clone()))
                .collect();
            let reach = reachable_symbols(&sys.start, &[&all]);
            for (_, prods) in &mut lists {
                let before = prods.len();
                prods.retain(|(p, _)| reach.contains(&p.lhs));
                pruned += before - prods.len();
            }
        }
        let mut clauses = Vec::new();
        sys.components = lists
            .into_iter()
            .enumerate()
            .map(|(ci, (name, prods))| {
                names.push(name);
                prods
                    .into_iter()
                    .enumerate()
                    .map(|(i, (mut p, clause))| {
                        p.label = (i + 1) as u32;
                        clauses.push(ClauseEntry {
                            component: Some((ci + 1) as u32),
                            label: p.label,
                            clause,
                        });
                        p
                    })
                    .collect()
            })
            .collect();
        let out = Device::System(sys);
        require_output_valid(&out)?;
        let report = self.report(&out, names, clauses, pruned);
        match out {
            Device::System(s) => Ok((s, report)),
            Device::Grammar(_) => unreachable!(),
        }
    }

    fn report(
        &self,
        out: &Device,
        component_names: Vec<String>,
        clauses: Vec<ClauseEntry>,
        pruned: usize,
    ) -> TransformReport {
        let (output_symbols, output_productions) = match out {
            Device::Grammar(g) => {
                (g.nonterminals.len() + g.terminals.len(), g.productions.len())
            }
            Device::System(s) => {
                (s.nonterminals.len() + s.terminals.len(), s.production_count())
            }
        };
        TransformReport {
            op: self.op,
            input_digest: self.input_digest.clone(),
            output_digest: device_digest(out),
            input_symbols: self.input_symbols,
            output_symbols,
            input_productions: self.input_productions,
            output_productions,
            component_names,
            clauses,
            pruned_productions: pruned,
            warnings: self.warnings.clone(),
        }
    }
}

/// Double-check a finished construction; a failure here is a bug in the
/// construction, not in the caller's input.
fn require_output_valid(d: &Device) -> Result<(), TransformError> {
    let report = validate_device(d);
    if report.ok() {
        Ok(())
    } else {
        Err(TransformError::Internal(report.canonical_text()))
    }
}
