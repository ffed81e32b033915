//! Semi-conditional to random context. Terminals cannot appear in
//! random context conditions, so every terminal gets a primed
//! nonterminal stand-in that only collapses once no original
//! nonterminal is left — at that point all conditions have been
//! resolved, and the collapse cannot unlock anything retroactively.

use std::collections::BTreeSet;

use crate::grammar::{Device, Grammar, GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;

use super::{
    require_valid, OutputBuilder, TransformError, TransformOp, TransformOptions, TransformReport,
};

fn prime_terminals(s: &Symbol) -> Symbol {
    if s.is_terminal() {
        s.primed()
    } else {
        s.clone()
    }
}

fn prime_condition_set(set: &BTreeSet<Condition>) -> BTreeSet<Condition> {
    set.iter()
        .map(|c| {
            Condition::new(c.symbols().iter().map(prime_terminals).collect())
                .expect("condition stays nonempty")
        })
        .collect()
}

pub fn sc_def2_to_rc(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    match g.kind {
        GrammarKind::Sc { per_degree, forb_degree } if per_degree <= 1 && forb_degree <= 1 => {}
        _ => {
            return Err(TransformError::WrongKind {
                expected: "an sc grammar of degree (1,1)",
                found: g.kind.name().to_string(),
            })
        }
    }
    if g.mode != Mode::Def2 {
        return Err(TransformError::WrongMode { expected: Mode::Def2, found: g.mode });
    }
    require_valid(&Device::Grammar(g.clone()))?;

    for t in &g.terminals {
        if g.contains(&t.primed()) {
            return Err(TransformError::SymbolCollision { symbol: t.primed().to_string() });
        }
    }

    let mut builder = OutputBuilder::new(TransformOp::ScToRc, &Device::Grammar(g.clone()));
    builder.component("main");

    let mut dropped = 0usize;
    for p in &g.productions {
        // A condition that names the production's own left-hand side is
        // decided by the rewritten occurrence itself: forbidding it
        // kills the production, permitting it is free.
        let own = Condition::sym(p.lhs.clone());
        if p.forb.contains(&own) {
            dropped += 1;
            continue;
        }
        let rhs: Vec<Symbol> = p.rhs.iter().map(prime_terminals).collect();
        let mut per = prime_condition_set(&p.per);
        per.remove(&own);
        let forb = prime_condition_set(&p.forb);
        builder.push(
            Production::new(0, p.lhs.clone(), rhs, per, forb).expect("shape preserved"),
            "rewrite",
        );
    }
    if dropped > 0 {
        builder.warn(format!("dropped {dropped} productions that forbid their own left-hand side"));
    }

    for t in &g.terminals {
        builder.push(
            Production::ctx(0, t.primed(), vec![t.clone()], [], g.nonterminals.iter().cloned()),
            "unprime",
        );
    }

    let mut nonterminals = g.nonterminals.clone();
    nonterminals.extend(g.terminals.iter().map(|t| t.primed()));
    let out = Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def1,
        nonterminals,
        terminals: g.terminals.clone(),
        start: g.start.clone(),
        productions: Vec::new(),
    };
    builder.finish_grammar(out, opts)
}
