//! Random-context constructions that adjust how conditions meet the
//! rewritten occurrence: the prime-split that clears forbidding sets of
//! their own left-hand sides, and the two definition flips.

use std::collections::BTreeSet;

use crate::grammar::{Device, Grammar, GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;

use super::{
    require_valid, OutputBuilder, TransformError, TransformOp, TransformOptions, TransformReport,
};

fn expect_rc(g: &Grammar, mode: Mode) -> Result<(), TransformError> {
    if g.kind != GrammarKind::Rc {
        return Err(TransformError::WrongKind {
            expected: "an rc grammar",
            found: g.kind.name().to_string(),
        });
    }
    if g.mode != mode {
        return Err(TransformError::WrongMode { expected: mode, found: g.mode });
    }
    require_valid(&Device::Grammar(g.clone()))
}

/// Split every production `A -> x` into a priming step `A -> A'` that
/// forbids the whole primed family, plus the original rewrite moved onto
/// `A'`. At most one primed symbol can exist at a time, so the rewrite
/// fires exactly where the priming step chose. The output's forbidding
/// sets never contain their own left-hand side: priming forbids only
/// primed symbols, and the moved rewrite has a primed left-hand side
/// while its forbidding set kept only original nonterminals.
fn split_prime(
    g: &Grammar,
    op: TransformOp,
) -> Result<(OutputBuilder, Grammar), TransformError> {
    let mut builder = OutputBuilder::new(op, &Device::Grammar(g.clone()));
    builder.component("main");

    let primed_family: BTreeSet<Symbol> =
        g.nonterminals.iter().map(|a| a.primed()).collect();
    for p in &primed_family {
        if g.contains(p) {
            return Err(TransformError::SymbolCollision { symbol: p.to_string() });
        }
    }

    for p in &g.productions {
        builder.push(
            Production::ctx(0, p.lhs.clone(), vec![p.lhs.primed()], [], primed_family.iter().cloned()),
            "prime",
        );
        let mut moved = p.clone();
        moved.lhs = p.lhs.primed();
        builder.push(moved, "rewrite");
    }

    let mut nonterminals = g.nonterminals.clone();
    nonterminals.extend(primed_family);
    let out = Grammar {
        kind: GrammarKind::Rc,
        mode: g.mode,
        nonterminals,
        terminals: g.terminals.clone(),
        start: g.start.clone(),
        productions: Vec::new(),
    };
    Ok((builder, out))
}

/// Rebuild an RC grammar so that no production's forbidding set contains
/// its own left-hand side, keeping the bounded language intact.
pub fn rc_normalize_forbid(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    expect_rc(g, Mode::Def1)?;
    let (builder, out) = split_prime(g, TransformOp::Lemma1)?;
    builder.finish_grammar(out, opts)
}

/// Context checked without the rewritten occurrence, re-expressed with
/// the occurrence included: the prime-split makes the rewritten symbol
/// a primed copy that no original condition can see, so both readings
/// coincide on the output.
pub fn rc_def1_to_def2(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    expect_rc(g, Mode::Def1)?;
    let (builder, mut out) = split_prime(g, TransformOp::RcDef1To2)?;
    out.mode = Mode::Def2;
    builder.finish_grammar(out, opts)
}

/// Context checked with the rewritten occurrence included, re-expressed
/// without it. With the occurrence in view, a permitting condition on
/// the production's own left-hand side always holds, so it is dropped;
/// a forbidding condition on it can never hold, so the production is
/// removed.
pub fn rc_def2_to_def1(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    expect_rc(g, Mode::Def2)?;
    let mut builder = OutputBuilder::new(TransformOp::RcDef2To1, &Device::Grammar(g.clone()));
    builder.component("main");

    let mut dropped = 0usize;
    for p in &g.productions {
        let own = Condition::sym(p.lhs.clone());
        if p.forb.contains(&own) {
            dropped += 1;
            continue;
        }
        let mut kept = p.clone();
        kept.per.remove(&own);
        builder.push(kept, "carry");
    }
    if dropped > 0 {
        builder.warn(format!("dropped {dropped} productions that forbid their own left-hand side"));
    }

    let out = Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def1,
        nonterminals: g.nonterminals.clone(),
        terminals: g.terminals.clone(),
        start: g.start.clone(),
        productions: Vec::new(),
    };
    builder.finish_grammar(out, opts)
}

