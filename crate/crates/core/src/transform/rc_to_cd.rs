//! Random context to a permitting cooperating system. Each production
//! gets a pair of components: a worker that checks the permitting set
//! one symbol at a time, packs the right-hand side into a single
//! capsule, and stalls forever if a forbidden symbol is around (an
//! exhausted run is the only way to hand off, so stalling vetoes the
//! branch); and a switcher that re-points every symbol's component
//! index. A shared unpacking component opens capsules and strips the
//! "already rewrote" primes.
//!
//! Indices on symbols name the production whose worker is being
//! simulated, so a worker only ever sees symbols addressed to it.

use std::collections::BTreeSet;

use crate::grammar::{CDSystem, Device, Grammar, GrammarKind, Mode};
use crate::production::Production;
use crate::symbol::{fresh_primed, Symbol};
use crate::validate::lhs_clear_of_forbidding;

use super::{
    require_valid, OutputBuilder, TransformError, TransformOp, TransformOptions, TransformReport,
};

pub fn rc_to_permitting_cd(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(CDSystem, TransformReport), TransformError> {
    if g.kind != GrammarKind::Rc {
        return Err(TransformError::WrongKind {
            expected: "an rc grammar",
            found: g.kind.name().to_string(),
        });
    }
    if g.mode != Mode::Def1 {
        return Err(TransformError::WrongMode { expected: Mode::Def1, found: g.mode });
    }
    require_valid(&Device::Grammar(g.clone()))?;
    if !lhs_clear_of_forbidding(g) {
        return Err(TransformError::ForbidsOwnLhs);
    }
    if g.productions.is_empty() {
        return Err(TransformError::InvalidInput(
            "the construction needs at least one production".to_string(),
        ));
    }

    let n = g.productions.len() as u32;
    let indexed = |a: &Symbol, i: u32| a.indexed(i);
    // Production indices are positional: the i-th listed production
    // owns components P_i and its switcher, 1-based.
    let image = |s: &Symbol, i: u32| -> Symbol {
        if s.is_terminal() {
            s.clone()
        } else {
            s.indexed(i)
        }
    };
    let capsule = |p: &Production, i: u32| -> Symbol {
        Symbol::packed(p.rhs.iter().map(|s| image(s, i)).collect())
    };

    // The constructed families must be fresh with respect to the input
    // alphabet; the start symbol is primed past anything taken.
    let mut constructed: Vec<Symbol> = Vec::new();
    for a in &g.nonterminals {
        for i in 1..=n {
            constructed.push(indexed(a, i));
            constructed.push(indexed(a, i).primed());
        }
    }
    for (pos, p) in g.productions.iter().enumerate() {
        let i = (pos + 1) as u32;
        for j in 1..=(p.per.len() as u32 + 1) {
            constructed.push(p.lhs.staged(i, j));
        }
        for k in 1..=n {
            constructed.push(capsule(p, k));
        }
    }
    for s in &constructed {
        if g.contains(s) {
            return Err(TransformError::SymbolCollision { symbol: s.to_string() });
        }
    }
    let mut taken: BTreeSet<Symbol> = g.alphabet().cloned().collect();
    taken.extend(constructed.iter().cloned());
    let start = fresh_primed(&g.start, &taken);

    let mut builder = OutputBuilder::new(TransformOp::Lemma2, &Device::Grammar(g.clone()));

    // Shared opener: seeds the simulation, unwraps capsules, strips
    // primes. Unpackers are emitted for every production under every
    // index so the capsule family is uniformly covered.
    builder.component("P0");
    for i in 1..=n {
        builder.push(
            Production::cf(0, start.clone(), vec![indexed(&g.start, i)]),
            "seed",
        );
    }
    for a in &g.nonterminals {
        for i in 1..=n {
            builder.push(
                Production::cf(0, indexed(a, i).primed(), vec![indexed(a, i)]),
                "unprime",
            );
        }
    }
    for p in &g.productions {
        for i in 1..=n {
            builder.push(
                Production::cf(0, capsule(p, i), p.rhs.iter().map(|s| image(s, i)).collect()),
                "unpack",
            );
        }
    }

    // The switcher block shared by every switcher component: any symbol
    // may re-point to any index, witnessed by a symbol that already
    // points elsewhere, so a switch can only finish once everyone has
    // left the old index.
    let mut witness_block: Vec<(Production, &'static str)> = Vec::new();
    for x in &g.nonterminals {
        for k in 1..=n {
            for l in 1..=n {
                for y in &g.nonterminals {
                    for m in 1..=n {
                        if k == m {
                            continue;
                        }
                        witness_block.push((
                            Production::ctx(
                                0,
                                indexed(x, k),
                                vec![indexed(x, l)],
                                [indexed(y, m)],
                                [],
                            ),
                            "reindex-witness",
                        ));
                    }
                }
            }
        }
    }

    for (pos, p) in g.productions.iter().enumerate() {
        let i = (pos + 1) as u32;
        let per: Vec<&Symbol> =
            p.per.iter().map(|c| c.as_single().expect("rc condition shape")).collect();
        let forb: BTreeSet<&Symbol> =
            p.forb.iter().map(|c| c.as_single().expect("rc condition shape")).collect();
        let k = per.len() as u32;
        let cap = capsule(p, i);

        builder.component(&format!("P{i}"));
        builder.push(
            Production::cf(0, indexed(&p.lhs, i), vec![p.lhs.staged(i, 1)]),
            "stage-enter",
        );
        for (j, x) in per.iter().enumerate() {
            builder.push(
                Production::ctx(
                    0,
                    p.lhs.staged(i, j as u32 + 1),
                    vec![p.lhs.staged(i, j as u32 + 2)],
                    [indexed(x, i)],
                    [],
                ),
                "stage-check",
            );
        }
        builder.push(
            Production::cf(0, p.lhs.staged(i, k + 1), vec![cap.clone()]),
            "pack",
        );
        builder.push(
            Production::ctx(0, cap.clone(), vec![cap.clone()], [cap.clone()], []),
            "pack-loop",
        );
        for x in &forb {
            builder.push(
                Production::cf(0, indexed(x, i), vec![indexed(x, i)]),
                "forbid-loop",
            );
        }
        for x in &g.nonterminals {
            if !forb.contains(x) {
                builder.push(
                    Production::ctx(
                        0,
                        indexed(x, i),
                        vec![indexed(x, i).primed()],
                        [cap.clone()],
                        [],
                    ),
                    "prime",
                );
            }
        }
        for j in 1..=k {
            builder.push(
                Production::cf(0, p.lhs.staged(i, j), vec![p.lhs.staged(i, j)]),
                "stage-loop",
            );
        }

        builder.component(&format!("P{i}bar"));
        for x in &g.nonterminals {
            for j in 1..=n {
                builder.push(
                    Production::cf(0, indexed(x, i), vec![indexed(x, j)]),
                    "reindex",
                );
            }
        }
        for (prod, tag) in &witness_block {
            builder.push(prod.clone(), tag);
        }
    }

    let mut nonterminals: BTreeSet<Symbol> = constructed.into_iter().collect();
    nonterminals.insert(start.clone());
    let out = CDSystem {
        nonterminals,
        terminals: g.terminals.clone(),
        start,
        components: Vec::new(),
    };
    builder.finish_system(out, opts)
}
