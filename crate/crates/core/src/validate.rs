//! Structural validation and classification.
//!
//! Validation never aborts on the first problem; it reports every
//! violation it finds, each with a stable code, so tests can pin down
//! exactly which rule a bad input breaks.

use std::collections::BTreeSet;
use std::fmt;

use crate::grammar::{CDSystem, Device, Grammar, GrammarKind};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    /// A symbol appears in both alphabets.
    AlphabetOverlap,
    /// The nonterminal list holds a terminal-classed atom, or the
    /// terminal list holds anything but a terminal-classed atom.
    AlphabetClassMismatch,
    /// Start symbol is not a declared nonterminal.
    StartNotDeclared,
    /// A production mentions a symbol outside N union T.
    SymbolUndeclared,
    /// A production's left-hand side is not a nonterminal.
    TerminalLhs,
    /// A production has an empty right-hand side.
    EmptyRhs,
    /// A condition is an empty string.
    EmptyCondition,
    /// Two productions in the same list share a label.
    DuplicateLabel,
    /// Random context condition that is not a single nonterminal.
    RcConditionShape,
    /// More than one permitting or forbidding condition on a
    /// semi-conditional production.
    ScConditionCount,
    /// A condition string longer than the declared degree.
    ScDegreeExceeded,
    /// A permitting grammar with a forbidding condition.
    PermittingHasForbidding,
    /// A forbidding grammar with a permitting condition.
    ForbiddingHasPermitting,
    /// A CD system component with no productions.
    EmptyComponent,
    /// A CD system production with a forbidding condition.
    CdForbiddingPresent,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ViolationCode::AlphabetOverlap => "alphabet-overlap",
            ViolationCode::AlphabetClassMismatch => "alphabet-class-mismatch",
            ViolationCode::StartNotDeclared => "start-not-declared",
            ViolationCode::SymbolUndeclared => "symbol-undeclared",
            ViolationCode::TerminalLhs => "terminal-lhs",
            ViolationCode::EmptyRhs => "empty-rhs",
            ViolationCode::EmptyCondition => "empty-condition",
            ViolationCode::DuplicateLabel => "duplicate-label",
            ViolationCode::RcConditionShape => "rc-condition-shape",
            ViolationCode::ScConditionCount => "sc-condition-count",
            ViolationCode::ScDegreeExceeded => "sc-degree-exceeded",
            ViolationCode::PermittingHasForbidding => "permitting-has-forbidding",
            ViolationCode::ForbiddingHasPermitting => "forbidding-has-permitting",
            ViolationCode::EmptyComponent => "empty-component",
            ViolationCode::CdForbiddingPresent => "cd-forbidding-present",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub location: String,
    pub message: String,
}

/// Shape measurements, computed even when validation fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    /// Every production is `A -> B C`, `A -> B`, or `A -> a` with the
    /// terminal case unconditioned.
    pub production_limited: bool,
    /// Production-limited, and every condition set is empty or a single
    /// length-1 nonterminal condition.
    pub limited: bool,
    pub max_per_len: u32,
    pub max_forb_len: u32,
    pub max_per_card: u32,
    pub max_forb_card: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub classification: Classification,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("ok {}\n", self.ok()));
        out.push_str(&format!("violations {}\n", self.violations.len()));
        for v in &self.violations {
            out.push_str(&format!("{} at {}: {}\n", v.code, v.location, v.message));
        }
        let c = &self.classification;
        out.push_str(&format!("production-limited {}\n", c.production_limited));
        out.push_str(&format!("limited {}\n", c.limited));
        out.push_str(&format!(
            "degree per-len {} forb-len {} per-card {} forb-card {}\n",
            c.max_per_len, c.max_forb_len, c.max_per_card, c.max_forb_card
        ));
        out
    }
}

struct Checker<'a> {
    nonterminals: &'a BTreeSet<Symbol>,
    terminals: &'a BTreeSet<Symbol>,
    violations: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn new(nonterminals: &'a BTreeSet<Symbol>, terminals: &'a BTreeSet<Symbol>) -> Self {
        Checker { nonterminals, terminals, violations: Vec::new() }
    }

    fn push(&mut self, code: ViolationCode, location: &str, message: String) {
        self.violations.push(Violation { code, location: location.to_string(), message });
    }

    fn declared(&self, s: &Symbol) -> bool {
        self.nonterminals.contains(s) || self.terminals.contains(s)
    }

    fn check_alphabets(&mut self, start: &Symbol) {
        for s in self.nonterminals.intersection(self.terminals) {
            self.push(
                ViolationCode::AlphabetOverlap,
                "alphabet",
                format!("`{s}` declared as both nonterminal and terminal"),
            );
        }
        for s in self.nonterminals {
            if s.is_terminal() {
                self.push(
                    ViolationCode::AlphabetClassMismatch,
                    "alphabet",
                    format!("terminal-classed `{s}` listed as a nonterminal"),
                );
            }
        }
        for s in self.terminals {
            if !s.is_terminal() {
                self.push(
                    ViolationCode::AlphabetClassMismatch,
                    "alphabet",
                    format!("`{s}` listed as a terminal but is not a terminal atom"),
                );
            }
        }
        if !self.nonterminals.contains(start) {
            self.push(
                ViolationCode::StartNotDeclared,
                "start",
                format!("start symbol `{start}` is not a declared nonterminal"),
            );
        }
    }

    fn check_labels(&mut self, prods: &[Production], loc_prefix: &str) {
        let mut seen = BTreeSet::new();
        for p in prods {
            if !seen.insert(p.label) {
                self.push(
                    ViolationCode::DuplicateLabel,
                    &format!("{loc_prefix}production {}", p.label),
                    format!("label {} used more than once", p.label),
                );
            }
        }
    }

    fn check_production_core(&mut self, p: &Production, loc: &str) {
        if p.lhs.is_terminal() {
            self.push(ViolationCode::TerminalLhs, loc, format!("left-hand side `{}` is terminal", p.lhs));
        }
        if p.rhs.is_empty() {
            self.push(ViolationCode::EmptyRhs, loc, "empty right-hand side".to_string());
        }
        for s in p.symbols() {
            if !self.declared(s) {
                self.push(ViolationCode::SymbolUndeclared, loc, format!("`{s}` is not declared"));
            }
        }
        for c in p.per.iter().chain(p.forb.iter()) {
            if c.symbols().is_empty() {
                self.push(ViolationCode::EmptyCondition, loc, "empty condition string".to_string());
            }
        }
    }

    fn check_rc_conditions(&mut self, p: &Production, loc: &str) {
        for c in p.per.iter().chain(p.forb.iter()) {
            match c.as_single() {
                Some(s) if s.is_nonterminal() => {}
                _ => self.push(
                    ViolationCode::RcConditionShape,
                    loc,
                    format!("condition `{c}` is not a single nonterminal"),
                ),
            }
        }
    }
}

fn classify(prod_lists: &[&[Production]]) -> Classification {
    let mut c = Classification { production_limited: true, limited: true, ..Default::default() };
    let cond_stats = |set: &BTreeSet<Condition>, max_len: &mut u32, max_card: &mut u32| {
        *max_card = (*max_card).max(set.len() as u32);
        for cond in set {
            *max_len = (*max_len).max(cond.len() as u32);
        }
    };
    let limited_conds = |set: &BTreeSet<Condition>| {
        set.len() <= 1
            && set.iter().all(|c| matches!(c.as_single(), Some(s) if s.is_nonterminal()))
    };
    for prods in prod_lists {
        for p in *prods {
            cond_stats(&p.per, &mut c.max_per_len, &mut c.max_per_card);
            cond_stats(&p.forb, &mut c.max_forb_len, &mut c.max_forb_card);
            let shape_ok = match p.rhs.as_slice() {
                [a] if a.is_terminal() => p.per.is_empty() && p.forb.is_empty(),
                [b] => b.is_nonterminal(),
                [b, d] => b.is_nonterminal() && d.is_nonterminal(),
                _ => false,
            };
            if !shape_ok {
                c.production_limited = false;
            }
            if !(shape_ok && limited_conds(&p.per) && limited_conds(&p.forb)) {
                c.limited = false;
            }
        }
    }
    c
}

pub fn validate_grammar(g: &Grammar) -> ValidationReport {
    let mut ck = Checker::new(&g.nonterminals, &g.terminals);
    ck.check_alphabets(&g.start);
    ck.check_labels(&g.productions, "");
    for p in &g.productions {
        let loc = format!("production {}", p.label);
        ck.check_production_core(p, &loc);
        match g.kind {
            GrammarKind::Rc => ck.check_rc_conditions(p, &loc),
            GrammarKind::Permitting => {
                ck.check_rc_conditions(p, &loc);
                if !p.forb.is_empty() {
                    ck.push(
                        ViolationCode::PermittingHasForbidding,
                        &loc,
                        "forbidding condition in a permitting grammar".to_string(),
                    );
                }
            }
            GrammarKind::Forbidding => {
                ck.check_rc_conditions(p, &loc);
                if !p.per.is_empty() {
                    ck.push(
                        ViolationCode::ForbiddingHasPermitting,
                        &loc,
                        "permitting condition in a forbidding grammar".to_string(),
                    );
                }
            }
            GrammarKind::Sc { per_degree, forb_degree } => {
                if p.per.len() > 1 || p.forb.len() > 1 {
                    ck.push(
                        ViolationCode::ScConditionCount,
                        &loc,
                        "at most one permitting and one forbidding condition allowed".to_string(),
                    );
                }
                for c in &p.per {
                    if c.len() as u32 > per_degree {
                        ck.push(
                            ViolationCode::ScDegreeExceeded,
                            &loc,
                            format!("permitting condition `{c}` exceeds degree {per_degree}"),
                        );
                    }
                }
                for c in &p.forb {
                    if c.len() as u32 > forb_degree {
                        ck.push(
                            ViolationCode::ScDegreeExceeded,
                            &loc,
                            format!("forbidding condition `{c}` exceeds degree {forb_degree}"),
                        );
                    }
                }
            }
        }
    }
    let lists = [g.productions.as_slice()];
    ValidationReport { violations: ck.violations, classification: classify(&lists) }
}

pub fn validate_system(sys: &CDSystem) -> ValidationReport {
    let mut ck = Checker::new(&sys.nonterminals, &sys.terminals);
    ck.check_alphabets(&sys.start);
    for (k, comp) in sys.components.iter().enumerate() {
        let comp_loc = format!("component {}", k + 1);
        if comp.is_empty() {
            ck.push(ViolationCode::EmptyComponent, &comp_loc, "component has no productions".to_string());
        }
        ck.check_labels(comp, &format!("{comp_loc} "));
        for p in comp {
            let loc = format!("{comp_loc} production {}", p.label);
            ck.check_production_core(p, &loc);
            ck.check_rc_conditions(p, &loc);
            if !p.forb.is_empty() {
                ck.push(
                    ViolationCode::CdForbiddingPresent,
                    &loc,
                    "forbidding condition in a permitting CD system".to_string(),
                );
            }
        }
    }
    let lists: Vec<&[Production]> = sys.components.iter().map(|c| c.as_slice()).collect();
    ValidationReport { violations: ck.violations, classification: classify(&lists) }
}

pub fn validate_device(d: &Device) -> ValidationReport {
    match d {
        Device::Grammar(g) => validate_grammar(g),
        Device::System(s) => validate_system(s),
    }
}

/// True when every production of an RC grammar keeps its own left-hand
/// side out of its forbidding set. Constructions that track "rewrite in
/// progress" via primed copies need this property on their input.
pub fn lhs_clear_of_forbidding(g: &Grammar) -> bool {
    g.productions.iter().all(|p| {
        p.forb.iter().all(|c| c.as_single().map(|s| *s != p.lhs).unwrap_or(true))
    })
}
