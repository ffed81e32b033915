use std::collections::BTreeSet;

use super::*;
use crate::dsl::parse_grammar;
use crate::grammar::{CDSystem, Device, Grammar, GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::{Symbol, TagItem};
use crate::validate::{lhs_clear_of_forbidding, validate_grammar, validate_system};

fn nt(name: &str) -> Symbol {
    Symbol::nonterminal(name).unwrap()
}

fn t(name: &str) -> Symbol {
    Symbol::terminal(name).unwrap()
}

fn opts() -> TransformOptions {
    TransformOptions::default()
}

fn has(prods: &[Production], lhs: &Symbol, rhs: &[Symbol], per: &[Symbol], forb: &[Symbol]) -> bool {
    let per: BTreeSet<Condition> = per.iter().cloned().map(Condition::sym).collect();
    let forb: BTreeSet<Condition> = forb.iter().cloned().map(Condition::sym).collect();
    prods.iter().any(|p| p.lhs == *lhs && p.rhs == rhs && p.per == per && p.forb == forb)
}

#[test]
fn forbid_split_primes_once_per_lhs() {
    let g = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap();
    let (out, report) = rc_normalize_forbid(&g, &opts()).unwrap();
    let s = nt("S");
    assert_eq!(out.mode, Mode::Def1);
    assert_eq!(out.productions.len(), 2);
    assert!(has(&out.productions, &s, &[s.primed()], &[], &[s.primed()]));
    assert!(has(&out.productions, &s.primed(), &[t("a")], &[], &[]));
    assert!(out.nonterminals.contains(&s.primed()));
    let tags: Vec<&str> = report.clauses.iter().map(|c| c.clause).collect();
    assert_eq!(tags, ["prime", "rewrite"]);

    // Two productions with the same left-hand side share one prime step.
    let g2 = parse_grammar(
        "kind rc\nnonterminals S A B\nterminals a b\nstart S\n\
         S -> A B\nA -> a for B\nA -> b per S\nB -> b\n",
    )
    .unwrap();
    let (out2, _) = rc_normalize_forbid(&g2, &opts()).unwrap();
    assert_eq!(out2.productions.len(), 4 + 3);
    assert!(lhs_clear_of_forbidding(&out2));
    assert!(has(&out2.productions, &nt("A").primed(), &[t("a")], &[], &[nt("B")]));
    let family = [nt("S").primed(), nt("A").primed(), nt("B").primed()];
    assert!(has(&out2.productions, &nt("A"), &[nt("A").primed()], &[], &family));
}

#[test]
fn forbid_split_rejects_primed_collision() {
    let s = nt("S");
    let g = Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def1,
        nonterminals: [s.clone(), s.primed()].into_iter().collect(),
        terminals: [t("a")].into_iter().collect(),
        start: s.clone(),
        productions: vec![Production::cf(1, s.clone(), vec![t("a")])],
    };
    assert!(matches!(
        rc_normalize_forbid(&g, &opts()),
        Err(TransformError::SymbolCollision { .. })
    ));
}

#[test]
fn mode_widening_keeps_split_shape() {
    let g = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap();
    let (out, _) = rc_def1_to_def2(&g, &opts()).unwrap();
    assert_eq!(out.mode, Mode::Def2);
    assert_eq!(out.kind, GrammarKind::Rc);
    assert_eq!(out.productions.len(), 2);
}

#[test]
fn mode_narrowing_strips_own_conditions() {
    let g = parse_grammar(
        "kind rc\nmode def2\nnonterminals S A\nterminals a\nstart S\n\
         S -> S A per S\nS -> a for S\nA -> a\n",
    )
    .unwrap();
    let (out, report) = rc_def2_to_def1(&g, &opts()).unwrap();
    assert_eq!(out.mode, Mode::Def1);
    assert_eq!(out.productions.len(), 2);
    assert!(has(&out.productions, &nt("S"), &[nt("S"), nt("A")], &[], &[]));
    assert!(has(&out.productions, &nt("A"), &[t("a")], &[], &[]));
    assert_eq!(report.warnings.len(), 1);
    assert!(report.warnings[0].contains("1"));
}

#[test]
fn terminal_priming_covers_conditions() {
    let g = parse_grammar(
        "kind sc\nnonterminals S A\nterminals a b\nstart S\n\
         S -> a A per b\nA -> b for A\nA -> a b\n",
    )
    .unwrap();
    let (out, report) = sc_def2_to_rc(&g, &opts()).unwrap();
    assert_eq!(out.kind, GrammarKind::Rc);
    assert_eq!(out.mode, Mode::Def1);
    let (ap, bp) = (t("a").primed(), t("b").primed());
    assert!(has(&out.productions, &nt("S"), &[ap.clone(), nt("A")], std::slice::from_ref(&bp), &[]));
    assert!(has(&out.productions, &nt("A"), &[ap.clone(), bp.clone()], &[], &[]));
    // The self-forbidding production can never fire under def2.
    assert!(!out.productions.iter().any(|p| p.rhs == [bp.clone()]));
    assert_eq!(report.warnings.len(), 1);
    // Unpriming waits until no original nonterminal is left.
    let n = [nt("S"), nt("A")];
    assert!(has(&out.productions, &ap, &[t("a")], &[], &n));
    assert!(has(&out.productions, &bp, &[t("b")], &[], &n));
    assert!(out.nonterminals.contains(&ap) && out.nonterminals.contains(&bp));
}

#[test]
fn sc_narrowing_drops_dead_productions() {
    let g = parse_grammar(
        "kind sc\nnonterminals S A\nterminals a\nstart S\n\
         S -> A per S\nA -> a for A\nA -> a\n",
    )
    .unwrap();
    let (out, _) = sc_def2_to_def1(&g, &opts()).unwrap();
    assert_eq!(out.kind, g.kind);
    assert_eq!(out.mode, Mode::Def1);
    assert_eq!(out.productions.len(), 2);
    assert!(has(&out.productions, &nt("S"), &[nt("A")], &[], &[]));
}

#[test]
fn probe_protocol_emits_lhs_bypass() {
    let g = parse_grammar(
        "kind sc\nmode def1\nnonterminals S A B\nterminals a\nstart S\n\
         S -> A A\nA -> B A per B for A\nB -> a\n",
    )
    .unwrap();
    let (out, _) = sc_def1_to_def2(&g, &opts()).unwrap();
    assert_eq!(out.mode, Mode::Def2);
    assert_eq!(out.start, nt("S").indexed(1));

    // Probe for production 2 over base B: the permitting symbol is the
    // probed symbol itself, so an unconditional-check variant exists.
    let (b1, b2) = (nt("B").staged(2, 2), nt("B").staged(2, 3));
    assert!(has(&out.productions, &b1, std::slice::from_ref(&b2), &[nt("B")], &[nt("A")]));
    assert!(has(&out.productions, &b1, std::slice::from_ref(&b2), &[], &[nt("A")]));

    // Probing A would hide the forbidden occurrence; no check step.
    let (a1, a2) = (nt("A").staged(2, 2), nt("A").staged(2, 3));
    assert!(!out.productions.iter().any(|p| p.lhs == a1 && p.rhs == [a2.clone()]));

    // Head rewrite stays bracketed.
    let bracket = |s: &Symbol| Symbol::packed(vec![s.clone()]);
    assert!(has(
        &out.productions,
        &bracket(&nt("A")),
        &[bracket(&nt("B")), nt("A")],
        &[nt("B")],
        &[nt("A")],
    ));
    assert!(validate_grammar(&out).ok());
}

#[test]
fn cd_construction_matches_block_layout() {
    let g = Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def1,
        nonterminals: ["A", "B", "C", "D", "E"].iter().map(|s| nt(s)).collect(),
        terminals: [t("a")].into_iter().collect(),
        start: nt("A"),
        productions: vec![Production::ctx(
            1,
            nt("A"),
            vec![nt("B"), nt("C")],
            [nt("D")],
            [nt("E")],
        )],
    };
    let (sys, report) = rc_to_permitting_cd(&g, &opts()).unwrap();
    assert_eq!(report.component_names, ["P0", "P1", "P1bar"]);
    assert_eq!(sys.components.len(), 3);
    assert_eq!(sys.start, nt("A").primed());

    let ix = |name: &str| nt(name).indexed(1);
    let capsule = Symbol::packed(vec![ix("B"), ix("C")]);

    let p0 = &sys.components[0];
    assert!(has(p0, &sys.start, &[ix("A")], &[], &[]));
    assert!(has(p0, &ix("E").primed(), &[ix("E")], &[], &[]));
    assert!(has(p0, &capsule, &[ix("B"), ix("C")], &[], &[]));
    assert_eq!(p0.len(), 1 + 5 + 1);

    let p1 = &sys.components[1];
    let staged = |j| nt("A").staged(1, j);
    assert!(has(p1, &ix("A"), &[staged(1)], &[], &[]));
    assert!(has(p1, &staged(1), &[staged(2)], &[ix("D")], &[]));
    assert!(has(p1, &staged(2), std::slice::from_ref(&capsule), &[], &[]));
    assert!(has(p1, &capsule, std::slice::from_ref(&capsule), std::slice::from_ref(&capsule), &[]));
    assert!(has(p1, &ix("E"), &[ix("E")], &[], &[]));
    for x in ["A", "B", "C", "D"] {
        assert!(has(p1, &ix(x), &[ix(x).primed()], std::slice::from_ref(&capsule), &[]));
    }
    assert!(has(p1, &staged(1), &[staged(1)], &[], &[]));
    assert_eq!(p1.len(), 1 + 1 + 1 + 1 + 1 + 4 + 1);

    // One production means no second index: reindexing is all loops.
    let p1bar = &sys.components[2];
    assert_eq!(p1bar.len(), 5);
    assert!(has(p1bar, &ix("A"), &[ix("A")], &[], &[]));

    assert!(validate_system(&sys).ok());
    let labels: Vec<u32> = p1.iter().map(|p| p.label).collect();
    assert_eq!(labels, (1..=p1.len() as u32).collect::<Vec<_>>());
}

#[test]
fn cd_construction_requires_clear_lhs() {
    let g = parse_grammar(
        "kind rc\nnonterminals S\nterminals a\nstart S\nS -> a for S\n",
    )
    .unwrap();
    assert!(matches!(
        rc_to_permitting_cd(&g, &opts()),
        Err(TransformError::ForbidsOwnLhs)
    ));
}

fn walker_example() -> CDSystem {
    CDSystem {
        nonterminals: ["A", "B", "C", "D"].iter().map(|s| nt(s)).collect(),
        terminals: [t("b")].into_iter().collect(),
        start: nt("A"),
        components: vec![vec![Production::ctx(
            1,
            nt("A"),
            vec![nt("B"), nt("C")],
            [nt("D")],
            [],
        )]],
    }
}

#[test]
fn walker_encoding_matches_schemas() {
    let sys = walker_example();
    let (out, report) = pcd_to_sc(&sys, &opts()).unwrap();
    assert_eq!(out.kind, GrammarKind::Sc { per_degree: 1, forb_degree: 1 });
    assert_eq!(out.mode, Mode::Def2);
    assert_eq!(out.start, nt("A").primed());

    let ix = |name: &str| nt(name).indexed(1);
    let capsule = Symbol::set_tagged(
        &Symbol::packed(vec![nt("B"), nt("C")]),
        [TagItem::Sym { sym: nt("D"), primed: false }].into_iter().collect(),
    );
    let sweep = |name: &str, r: usize| {
        Symbol::set_tagged(
            &nt(name),
            [TagItem::Sym { sym: capsule.clone(), primed: r > 0 }].into_iter().collect(),
        )
    };
    let audit = |name: &str, r: usize| {
        Symbol::set_tagged(
            &nt(name),
            [TagItem::Label { label: 1, primed: r > 0 }].into_iter().collect(),
        )
    };

    assert!(has(&out.productions, &out.start, &[ix("A")], &[], &[]));
    assert!(has(&out.productions, &nt("A"), std::slice::from_ref(&capsule), &[ix("D")], &[]));
    assert!(has(&out.productions, &capsule, &[nt("B"), nt("C")], &[nt("D")], &[]));
    assert!(has(&out.productions, &capsule, &[nt("B"), nt("C")], &[ix("D")], &[]));
    assert!(has(&out.productions, &ix("A"), &[ix("B"), nt("C")], &[nt("D")], &[]));
    assert!(has(&out.productions, &ix("B"), &[sweep("B", 0)], &[], &[]));
    assert!(has(&out.productions, &sweep("B", 0), &[sweep("B", 1)], &[], std::slice::from_ref(&capsule)));
    assert!(has(&out.productions, &sweep("B", 1), &[audit("B", 0)], &[], &[]));
    // Audit of the one production: absent, witnessed, or self-standing.
    assert!(has(&out.productions, &audit("B", 0), &[audit("B", 1)], &[], &[nt("A")]));
    assert!(has(&out.productions, &audit("B", 0), &[audit("B", 1)], &[nt("A")], &[nt("D")]));
    assert!(has(&out.productions, &audit("A", 0), &[audit("A", 1)], &[], &[nt("D")]));
    assert!(has(&out.productions, &audit("B", 1), &[ix("B")], &[], &[]));
    let audit_b = Symbol::set_tagged(
        &t("b"),
        [TagItem::Label { label: 1, primed: true }].into_iter().collect(),
    );
    assert!(has(&out.productions, &audit_b, &[t("b")], &[], &[]));

    // 5 alphabet symbols, 1 capsule, 1 production, 1 component.
    let v = 5;
    let expected = 1          // seed
        + v                   // pack
        + 1 + 1               // unpack, unpack-permitted
        + 1                   // head-rewrite
        + v + v + v           // sweep-enter, sweep-step, audit-enter
        + (v - 1) + (v - 1) + 1 // audit-absent, audit-witness, audit-self
        + v                   // switch (n = 1)
        + 1;                  // finish
    assert_eq!(out.productions.len(), expected);
    assert_eq!(report.clauses.len(), expected);
    assert!(validate_grammar(&out).ok());
}

#[test]
fn walker_encoding_rejects_wide_conditions() {
    let mut sys = walker_example();
    sys.components[0][0] =
        Production::ctx(1, nt("A"), vec![nt("B")], [nt("C"), nt("D")], []);
    assert!(matches!(
        pcd_to_sc(&sys, &opts()),
        Err(TransformError::ConditionTooWide { component: 1, label: 1 })
    ));
}

#[test]
fn walker_encoding_respects_state_cap() {
    let sys = walker_example();
    let tight = TransformOptions { state_cap: 3, ..opts() };
    assert!(matches!(
        pcd_to_sc(&sys, &tight),
        Err(TransformError::StateCapExceeded { component: 1, needed: 4, cap: 3 })
    ));
}

#[test]
fn walker_encoding_keeps_language_over_repeated_steps() {
    // One component must exhaust the start symbol in a single
    // activation, so every word takes several rewrites per hand-off.
    let sys = CDSystem {
        nonterminals: [nt("S")].into_iter().collect(),
        terminals: [t("a")].into_iter().collect(),
        start: nt("S"),
        components: vec![vec![
            Production::cf(1, nt("S"), vec![nt("S"), nt("S")]),
            Production::cf(2, nt("S"), vec![t("a")]),
        ]],
    };
    let (out, _) = pcd_to_sc(&sys, &opts()).unwrap();
    let want = crate::cd::enumerate_bounded_cd(&sys, 4);
    let got = crate::engine::enumerate_bounded(&out, 4);
    assert!(!want.truncated && !got.truncated);
    assert_eq!(want.words, got.words);
    assert_eq!(want.words.len(), 4);
}

#[test]
fn walker_audit_counts_lone_witness_occurrences() {
    // The intermediate system vetoes double-packing with productions
    // permitted by their own left-hand side. Exhaustion then means "at
    // most one occurrence", which the audit can only see by briefly
    // marking the occurrence it must not count.
    let g = parse_grammar(
        "kind rc\nnonterminals S\nterminals a\nstart S\nS -> S S\nS -> a\n",
    )
    .unwrap();
    let (sys, _) = rc_to_permitting_cd(&g, &opts()).unwrap();
    let (out, report) = pcd_to_sc(&sys, &opts()).unwrap();
    for clause in ["audit-mark", "audit-lone", "audit-unmark", "audit-resume"] {
        assert!(report.clauses.iter().any(|c| c.clause == clause), "missing {clause}");
    }
    assert!(validate_grammar(&out).ok());

    let verdict = crate::equiv::bounded_equiv(
        &Device::Grammar(g),
        &Device::Grammar(out),
        4,
    );
    assert_eq!(verdict.status, crate::equiv::EquivStatus::Equal);
}

#[test]
fn limited_normal_form_round_trips() {
    let g = parse_grammar(
        "kind rc\nnonterminals S\nterminals a\nstart S\nS -> S S\nS -> a\n",
    )
    .unwrap();
    let (out, report) = rc_limited_normal_form(&g, &opts()).unwrap();
    assert_eq!(out.kind, GrammarKind::Rc);
    assert_eq!(out.mode, Mode::Def1);
    let check = validate_grammar(&out);
    assert!(check.ok());
    assert!(check.classification.limited);
    assert_eq!(report.op, TransformOp::LimitedNf);
    assert_eq!(report.clauses.len(), out.productions.len());
    assert!(report.warnings.is_empty());
}

#[test]
fn limited_normal_form_rejects_wide_shapes() {
    let g = parse_grammar(
        "kind rc\nnonterminals S\nterminals a\nstart S\nS -> a S\nS -> a\n",
    )
    .unwrap();
    assert!(matches!(
        rc_limited_normal_form(&g, &opts()),
        Err(TransformError::NotProductionLimited)
    ));
}

#[test]
fn pruning_drops_unproducible_sides() {
    let g = parse_grammar(
        "kind rc\nnonterminals S B\nterminals a b\nstart S\nS -> a\nB -> b\n",
    )
    .unwrap();
    let keep = rc_normalize_forbid(&g, &opts()).unwrap().0;
    assert_eq!(keep.productions.len(), 4);
    let pruned = TransformOptions { prune_unreachable: true, ..opts() };
    let (out, report) = rc_normalize_forbid(&g, &pruned).unwrap();
    assert_eq!(out.productions.len(), 2);
    assert_eq!(report.pruned_productions, 2);
    let labels: Vec<u32> = out.productions.iter().map(|p| p.label).collect();
    assert_eq!(labels, [1, 2]);
}

#[test]
fn apply_dispatches_by_device_kind() {
    let g = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap();
    let device = Device::Grammar(g);
    let (out, _) = apply(TransformOp::Lemma2, &device, &opts()).unwrap();
    assert!(out.as_system().is_some());
    assert!(matches!(
        apply(TransformOp::Thm3, &device, &opts()),
        Err(TransformError::WrongKind { .. })
    ));
    let (split, _) = apply(TransformOp::Lemma1, &device, &opts()).unwrap();
    assert!(split.as_grammar().is_some());
}

#[test]
fn op_names_round_trip() {
    for op in TransformOp::ALL {
        assert_eq!(op.name().parse::<TransformOp>().unwrap(), op);
    }
    assert!("thm1".parse::<TransformOp>().is_err());
}

#[test]
fn report_text_lists_clauses_in_label_order() {
    let g = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap();
    let (_, report) = rc_normalize_forbid(&g, &opts()).unwrap();
    let text = report.canonical_text();
    assert!(text.starts_with("transform-report\nop lemma1\n"));
    assert!(text.contains("clause 1 prime\n"));
    assert!(text.contains("clause 2 rewrite\n"));
    assert!(text.contains("productions 1 -> 2\n"));
}
