//! Semi-conditional definition flips. Dropping the rewritten occurrence
//! from the context is easy in one direction (the occurrence decides
//! its own conditions) and needs a probe protocol in the other: the
//! grammar guesses a symbol that will still be present after the
//! rewrite, marks the rewrite position with a primed copy, re-checks
//! the original conditions while the occurrence is hidden behind the
//! mark, and only then performs the rewrite.

use crate::grammar::{Device, Grammar, GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;

use super::{
    require_valid, OutputBuilder, TransformError, TransformOp, TransformOptions, TransformReport,
};

fn expect_sc11(g: &Grammar, mode: Mode) -> Result<(), TransformError> {
    match g.kind {
        GrammarKind::Sc { per_degree, forb_degree } if per_degree <= 1 && forb_degree <= 1 => {}
        _ => {
            return Err(TransformError::WrongKind {
                expected: "an sc grammar of degree (1,1)",
                found: g.kind.name().to_string(),
            })
        }
    }
    if g.mode != mode {
        return Err(TransformError::WrongMode { expected: mode, found: g.mode });
    }
    require_valid(&Device::Grammar(g.clone()))
}

/// Whole-form context reduced to occurrence-free context: a permitting
/// condition equal to the left-hand side always holds, a forbidding one
/// never does.
pub fn sc_def2_to_def1(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    expect_sc11(g, Mode::Def2)?;
    let mut builder = OutputBuilder::new(TransformOp::ScDef2To1, &Device::Grammar(g.clone()));
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
        kind: g.kind,
        mode: Mode::Def1,
        nonterminals: g.nonterminals.clone(),
        terminals: g.terminals.clone(),
        start: g.start.clone(),
        productions: Vec::new(),
    };
    builder.finish_grammar(out, opts)
}

/// Occurrence-free context re-expressed against the whole form. The
/// head of every sentential form carries a bracket so bookkeeping
/// symbols have somewhere to live; bracketed bookkeeping never matches
/// an original condition symbol.
pub fn sc_def1_to_def2(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    expect_sc11(g, Mode::Def1)?;

    let alphabet: Vec<Symbol> = g.alphabet().cloned().collect();
    let start1 = g.start.indexed(1);
    let mut fresh: Vec<Symbol> = vec![start1.clone()];
    fresh.extend(alphabet.iter().map(|b| Symbol::packed(vec![b.clone()])));
    fresh.extend(g.nonterminals.iter().map(|a| a.primed()));
    for p in &g.productions {
        for b in &alphabet {
            for stage in 1..=3 {
                fresh.push(b.staged(p.label, stage));
            }
        }
    }
    for s in &fresh {
        if g.contains(s) {
            return Err(TransformError::SymbolCollision { symbol: s.to_string() });
        }
    }

    let mut builder = OutputBuilder::new(TransformOp::ScDef1To2, &Device::Grammar(g.clone()));
    builder.component("main");

    let bracket = |s: &Symbol| Symbol::packed(vec![s.clone()]);

    builder.push(Production::cf(0, start1.clone(), vec![bracket(&g.start)]), "seed");
    for t in &g.terminals {
        builder.push(Production::cf(0, bracket(t), vec![t.clone()]), "unbracket");
    }

    for p in &g.productions {
        let u = p.per.iter().next().cloned();
        let v = p.forb.iter().next().cloned();
        let conds = |c: &Option<Condition>| c.iter().cloned().collect::<std::collections::BTreeSet<_>>();

        // Rewrite at the head: the bracket moves to the new first
        // symbol and the original conditions transfer unchanged — the
        // occurrence is hidden inside the bracket, so the whole-form
        // check sees exactly the old occurrence-free context.
        let mut rhs = vec![bracket(&p.rhs[0])];
        rhs.extend(p.rhs[1..].iter().cloned());
        builder.push(
            Production::new(0, bracket(&p.lhs), rhs, conds(&u), conds(&v))
                .expect("shape preserved"),
            "head-rewrite",
        );

        let marked = p.lhs.primed();
        for b in &alphabet {
            let probe = [b.staged(p.label, 1), b.staged(p.label, 2), b.staged(p.label, 3)];
            builder.push(Production::cf(0, bracket(b), vec![probe[0].clone()]), "probe-enter");
            builder.push(
                Production::ctx(0, p.lhs.clone(), vec![marked.clone()], [probe[0].clone()], [marked.clone()]),
                "lhs-mark",
            );
            builder.push(
                Production::ctx(0, probe[0].clone(), vec![probe[1].clone()], [marked.clone()], []),
                "probe-arm",
            );
            // The guessed head symbol b must survive the rewrite, so a
            // forbidding condition on b itself can never be probed this
            // way; the permitting variant is skipped when the probe
            // symbol already witnesses it.
            let v_is_b = v.as_ref().and_then(|c| c.as_single()) == Some(b);
            let u_is_b = u.as_ref().and_then(|c| c.as_single()) == Some(b);
            if !v_is_b {
                builder.push(
                    Production::new(0, probe[1].clone(), vec![probe[2].clone()], conds(&u), conds(&v))
                        .expect("shape preserved"),
                    "probe-check",
                );
                if u_is_b {
                    builder.push(
                        Production::new(
                            0,
                            probe[1].clone(),
                            vec![probe[2].clone()],
                            Default::default(),
                            conds(&v),
                        )
                        .expect("shape preserved"),
                        "probe-check-lhs",
                    );
                }
            }
            builder.push(
                Production::ctx(0, marked.clone(), p.rhs.clone(), [probe[2].clone()], []),
                "rewrite",
            );
            builder.push(
                Production::ctx(0, probe[2].clone(), vec![bracket(b)], [], [marked.clone()]),
                "probe-close",
            );
        }
    }

    let mut nonterminals = g.nonterminals.clone();
    nonterminals.extend(fresh);
    let out = Grammar {
        kind: GrammarKind::Sc { per_degree: 1, forb_degree: 1 },
        mode: Mode::Def2,
        nonterminals,
        terminals: g.terminals.clone(),
        start: start1,
        productions: Vec::new(),
    };
    builder.finish_grammar(out, opts)
}
