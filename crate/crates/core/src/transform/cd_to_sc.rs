//! Permitting cooperating system to semi-conditional of degree (1,1).
//!
//! One distinguished "walker" symbol rides on the first position of
//! every sentential form and remembers the active component. Ordinary
//! rewrites go through single-use capsules: a symbol packs into a
//! capsule while some walker for the component is present, and the
//! capsule releases the right-hand side once the production's
//! permitting symbol is visible. A component hand-off is a walk of the
//! walker through two bookkeeping chains: the first confirms no capsule
//! is left half-open, the second confirms component exhaustion by
//! checking, production by production, that the left-hand side is
//! absent or its permitting witness is missing.
//!
//! A production whose witness is its own left-hand side is exhausted
//! exactly when that symbol occurs at most once, and a single
//! forbidding condition cannot tell one occurrence from two. For those
//! checks the chain takes a two-hop detour: the lone occurrence is
//! marked, the first hop confirms no unmarked one remains, the mark is
//! restored, and the second hop confirms no mark survived. Both hops
//! re-check the mark, so a stranded mark can never leak past its link.
//!
//! The chains visit their items in one fixed order. Chain conditions
//! only inspect symbols the chain itself never rewrites — the mark
//! detour touches one symbol but restores it inside its own link — so
//! an out-of-order walk succeeds exactly when the in-order walk does,
//! and the in-order states are the only ones instantiated: their count
//! is linear in the component size, bounded by `state_cap`.

use std::collections::BTreeSet;

use crate::grammar::{CDSystem, Device, Grammar, GrammarKind, Mode};
use crate::production::Production;
use crate::symbol::{fresh_primed, Symbol, TagItem, TagSet};

use super::{
    require_valid, OutputBuilder, TransformError, TransformOp, TransformOptions, TransformReport,
};

pub fn pcd_to_sc(
    sys: &CDSystem,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    require_valid(&Device::System(sys.clone()))?;
    for (ci, comp) in sys.components.iter().enumerate() {
        for p in comp {
            if p.per.len() > 1 {
                return Err(TransformError::ConditionTooWide {
                    component: ci + 1,
                    label: p.label,
                });
            }
        }
    }

    let v: Vec<Symbol> = sys.alphabet().cloned().collect();
    let n = sys.components.len() as u32;

    // Freshness: the walker and state families are built over the input
    // alphabet, so the input must not already use them.
    for s in &v {
        if matches!(s, Symbol::SetTagged { .. }) {
            return Err(TransformError::SymbolCollision { symbol: s.to_string() });
        }
        for i in 1..=n {
            if sys.contains(&s.indexed(i)) {
                return Err(TransformError::SymbolCollision {
                    symbol: s.indexed(i).to_string(),
                });
            }
        }
    }
    let taken: BTreeSet<Symbol> = v.iter().cloned().collect();
    let start = fresh_primed(&sys.start, &taken);

    let capsule = |p: &Production| -> Symbol {
        let tag: BTreeSet<TagItem> = p
            .per
            .iter()
            .map(|c| TagItem::Sym {
                sym: c.as_single().expect("cd condition shape").clone(),
                primed: false,
            })
            .collect();
        Symbol::set_tagged(&Symbol::packed(p.rhs.clone()), tag)
    };
    // Primed self-tag keeps marks apart from capsules, whose tags are
    // never primed.
    let marked = |a: &Symbol| -> Symbol {
        Symbol::set_tagged(a, BTreeSet::from([TagItem::Sym { sym: a.clone(), primed: true }]))
    };

    // Production identity across components, for the audit-state tags.
    let global_base: Vec<u32> = {
        let mut acc = 0u32;
        let mut bases = Vec::with_capacity(sys.components.len());
        for comp in &sys.components {
            bases.push(acc);
            acc += comp.len() as u32;
        }
        bases
    };

    let mut builder = OutputBuilder::new(TransformOp::Thm3, &Device::System(sys.clone()));
    builder.component("main");
    let mut nonterminals: BTreeSet<Symbol> = sys.nonterminals.clone();
    nonterminals.insert(start.clone());
    for x in &v {
        for i in 1..=n {
            nonterminals.insert(x.indexed(i));
        }
    }

    for i in 1..=n {
        builder.push(
            Production::cf(0, start.clone(), vec![sys.start.indexed(i)]),
            "seed",
        );
    }

    for (ci, comp) in sys.components.iter().enumerate() {
        let i = (ci + 1) as u32;

        let capsules: BTreeSet<Symbol> = comp.iter().map(capsule).collect();
        let capsules: Vec<Symbol> = capsules.into_iter().collect();
        let t = capsules.len();
        let m = comp.len();
        let self_witness: Vec<bool> = comp
            .iter()
            .map(|p| {
                p.per
                    .iter()
                    .next()
                    .map(|c| c.as_single().expect("cd condition shape") == &p.lhs)
                    .unwrap_or(false)
            })
            .collect();
        let detours = self_witness.iter().filter(|b| **b).count();
        let needed = (t + 1) + (m + 1) + detours;
        if needed > opts.state_cap {
            return Err(TransformError::StateCapExceeded {
                component: ci + 1,
                needed,
                cap: opts.state_cap,
            });
        }

        // Chain states: one tag per position, shared by every base
        // symbol it decorates.
        let sweep_tags: Vec<TagSet> = (0..=t)
            .map(|r| {
                TagSet::new(
                    capsules
                        .iter()
                        .enumerate()
                        .map(|(s, q)| TagItem::Sym { sym: q.clone(), primed: s < r })
                        .collect(),
                )
            })
            .collect();
        let audit_tags: Vec<TagSet> = (0..=m)
            .map(|r| {
                TagSet::new(
                    (0..m)
                        .map(|s| TagItem::Label {
                            label: global_base[ci] + s as u32 + 1,
                            primed: s < r,
                        })
                        .collect(),
                )
            })
            .collect();
        // Half-way states for the mark detours; the zero label cannot
        // clash with production labels, which start at one.
        let half_tags: Vec<Option<TagSet>> = (0..m)
            .map(|r| {
                self_witness[r].then(|| {
                    let mut items: BTreeSet<TagItem> = (0..m)
                        .map(|s| TagItem::Label {
                            label: global_base[ci] + s as u32 + 1,
                            primed: s <= r,
                        })
                        .collect();
                    items.insert(TagItem::Label { label: 0, primed: false });
                    TagSet::new(items)
                })
            })
            .collect();
        let sweep = |x: &Symbol, r: usize| Symbol::set_tagged_shared(x, sweep_tags[r].clone());
        let audit = |x: &Symbol, r: usize| Symbol::set_tagged_shared(x, audit_tags[r].clone());
        for x in &v {
            for r in 0..=t {
                nonterminals.insert(sweep(x, r));
            }
            for r in 0..=m {
                nonterminals.insert(audit(x, r));
            }
        }
        nonterminals.extend(capsules.iter().cloned());

        for p in comp {
            let cap = capsule(p);
            let per_sym = p.per.iter().next().map(|c| {
                c.as_single().expect("cd condition shape").clone()
            });
            for x in &v {
                builder.push(
                    Production::ctx(
                        0,
                        p.lhs.clone(),
                        vec![cap.clone()],
                        [x.indexed(i)],
                        [],
                    ),
                    "pack",
                );
            }
            builder.push(
                Production::ctx(0, cap.clone(), p.rhs.clone(), per_sym.clone(), []),
                "unpack",
            );
            if let Some(z) = &per_sym {
                builder.push(
                    Production::ctx(0, cap.clone(), p.rhs.clone(), [z.indexed(i)], []),
                    "unpack-permitted",
                );
            }
            let mut head_rhs = vec![p.rhs[0].indexed(i)];
            head_rhs.extend(p.rhs[1..].iter().cloned());
            builder.push(
                Production::ctx(0, p.lhs.indexed(i), head_rhs, per_sym.clone(), []),
                "head-rewrite",
            );
        }

        for x in &v {
            builder.push(Production::cf(0, x.indexed(i), vec![sweep(x, 0)]), "sweep-enter");
        }
        for (r, swept) in capsules.iter().enumerate() {
            for x in &v {
                builder.push(
                    Production::ctx(0, sweep(x, r), vec![sweep(x, r + 1)], [], [swept.clone()]),
                    "sweep-step",
                );
            }
        }
        for x in &v {
            builder.push(Production::cf(0, sweep(x, t), vec![audit(x, 0)]), "audit-enter");
        }
        for (r, p) in comp.iter().enumerate() {
            let audited = &p.lhs;
            let per_sym = p.per.iter().next().map(|c| {
                c.as_single().expect("cd condition shape").clone()
            });
            if self_witness[r] {
                // The witness is the left-hand side itself: the check
                // is "at most one occurrence", walker included, so the
                // chain counts via a mark-and-restore detour.
                let mark = marked(audited);
                nonterminals.insert(mark.clone());
                let half_tag = half_tags[r].clone().expect("detour stage has a half state");
                for x in &v {
                    if x == audited {
                        continue;
                    }
                    let half = Symbol::set_tagged_shared(x, half_tag.clone());
                    nonterminals.insert(half.clone());
                    builder.push(
                        Production::ctx(
                            0,
                            audited.clone(),
                            vec![mark.clone()],
                            [audit(x, r)],
                            [mark.clone()],
                        ),
                        "audit-mark",
                    );
                    builder.push(
                        Production::ctx(0, audit(x, r), vec![half.clone()], [], [audited.clone()]),
                        "audit-lone",
                    );
                    builder.push(
                        Production::ctx(0, mark.clone(), vec![audited.clone()], [half.clone()], []),
                        "audit-unmark",
                    );
                    builder.push(
                        Production::ctx(0, half, vec![audit(x, r + 1)], [], [mark.clone()]),
                        "audit-resume",
                    );
                }
            } else {
                for x in &v {
                    if x != audited {
                        builder.push(
                            Production::ctx(
                                0,
                                audit(x, r),
                                vec![audit(x, r + 1)],
                                [],
                                [audited.clone()],
                            ),
                            "audit-absent",
                        );
                    }
                }
                if let Some(y) = &per_sym {
                    for x in &v {
                        if x != y {
                            builder.push(
                                Production::ctx(
                                    0,
                                    audit(x, r),
                                    vec![audit(x, r + 1)],
                                    [audited.clone()],
                                    [y.clone()],
                                ),
                                "audit-witness",
                            );
                        }
                    }
                }
            }
            if let Some(y) = &per_sym {
                builder.push(
                    Production::ctx(
                        0,
                        audit(audited, r),
                        vec![audit(audited, r + 1)],
                        [],
                        [y.clone()],
                    ),
                    "audit-self",
                );
            }
        }
        for x in &v {
            for j in 1..=n {
                builder.push(
                    Production::cf(0, audit(x, m), vec![x.indexed(j)]),
                    "switch",
                );
            }
        }
        for x in &sys.terminals {
            builder.push(Production::cf(0, audit(x, m), vec![x.clone()]), "finish");
        }
    }

    let out = Grammar {
        kind: GrammarKind::Sc { per_degree: 1, forb_degree: 1 },
        mode: Mode::Def2,
        nonterminals,
        terminals: sys.terminals.clone(),
        start,
        productions: Vec::new(),
    };
    builder.finish_grammar(out, opts)
}
