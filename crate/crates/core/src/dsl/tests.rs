use std::collections::BTreeSet;

use super::*;
use crate::grammar::{GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::{Symbol, TagItem};

fn nt(name: &str) -> Symbol {
    Symbol::nonterminal(name).unwrap()
}

fn t(name: &str) -> Symbol {
    Symbol::terminal(name).unwrap()
}

#[test]
fn parses_minimal_rc_grammar() {
    let g = parse_grammar(
        "kind rc\n\
         nonterminals S A\n\
         terminals a\n\
         start S\n\
         S -> A A\n\
         A -> a for S\n",
    )
    .unwrap();
    assert_eq!(g.kind, GrammarKind::Rc);
    assert_eq!(g.mode, Mode::Def1);
    assert_eq!(g.productions.len(), 2);
    assert_eq!(g.productions[0].label, 1);
    assert_eq!(g.productions[1].label, 2);
    assert!(g.productions[1].forb.iter().any(|c| c.as_single() == Some(&nt("S"))));
}

#[test]
fn sc_degree_defaults_to_one_one() {
    let g = parse_grammar("kind sc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap();
    assert_eq!(g.kind, GrammarKind::Sc { per_degree: 1, forb_degree: 1 });
    assert_eq!(g.mode, Mode::Def2);
}

#[test]
fn sc_condition_strings_respect_degree() {
    let text = "kind sc\ndegree 2 1\nnonterminals S A\nterminals a\nstart S\n\
                S -> A per ( a S )\nA -> a\n";
    let g = parse_grammar(text).unwrap();
    let cond = g.productions[0].per.iter().next().unwrap();
    assert_eq!(cond.symbols(), &[t("a"), nt("S")]);

    let too_long = "kind sc\ndegree 2 1\nnonterminals S A\nterminals a\nstart S\n\
                    S -> A for ( a a )\nA -> a\n";
    let e = parse_grammar(too_long).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::ConditionShape);
    assert_eq!(e.line, 6);
}

#[test]
fn sc_allows_at_most_one_condition_per_side() {
    let text = "kind sc\nnonterminals S A B\nterminals a\nstart S\nS -> a per A B\n";
    let e = parse_grammar(text).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::ConditionShape);
}

#[test]
fn rc_conditions_are_single_symbols() {
    let text = "kind rc\nnonterminals S A\nterminals a\nstart S\nS -> a per ( A A )\n";
    let e = parse_grammar(text).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::ConditionShape);
}

#[test]
fn directive_words_work_as_symbol_names() {
    // `start` names a nonterminal here; the `->` in second position marks
    // the line as a production before directive dispatch sees it.
    let g = parse_grammar(
        "kind rc\nnonterminals S start\nterminals a\nstart S\nS -> start\nstart -> a\n",
    )
    .unwrap();
    assert_eq!(g.productions[1].lhs, nt("start"));
}

#[test]
fn reserved_words_are_not_symbol_names() {
    let e = parse_grammar("kind rc\nnonterminals S per\nterminals a\nstart S\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Syntax);
    assert_eq!(e.line, 2);
    assert_eq!(e.col, 16);
}

#[test]
fn comments_and_blank_lines_are_skipped() {
    let g = parse_grammar(
        "# a grammar\nkind rc\n\nnonterminals S # trailing note\nterminals a\nstart S\nS -> a\n",
    )
    .unwrap();
    assert_eq!(g.nonterminals.len(), 1);
}

#[test]
fn symtab_builds_constructed_symbols() {
    let g = parse_grammar(
        "kind rc\n\
         nonterminals S #0 #1 #2 #3\n\
         terminals a\n\
         start S\n\
         S -> #0\n\
         #0 -> #3 per #2\n\
         #3 -> a\n\
         symtab #0 = prime(S)\n\
         symtab #1 = pack(a S)\n\
         symtab #2 = stage(S,1,2)\n\
         symtab #3 = tag(#1,{sym'(#0),label(3)})\n",
    )
    .unwrap();
    let s_prime = nt("S").primed();
    let packed = Symbol::packed(vec![t("a"), nt("S")]);
    let mut items = BTreeSet::new();
    items.insert(TagItem::Sym { sym: s_prime.clone(), primed: true });
    items.insert(TagItem::Label { label: 3, primed: false });
    let tagged = Symbol::set_tagged(&packed, items);
    assert!(g.nonterminals.contains(&s_prime));
    assert!(g.nonterminals.contains(&tagged));
    assert_eq!(g.productions[1].lhs, s_prime);
    assert_eq!(g.productions[1].rhs, vec![tagged]);
    assert!(g.productions[1].per.iter().any(|c| c.as_single() == Some(&nt("S").staged(1, 2))));
}

#[test]
fn symtab_cycles_are_rejected() {
    let e = parse_grammar(
        "kind rc\nnonterminals S #0\nterminals a\nstart S\nS -> a\n\
         symtab #0 = prime(#1)\nsymtab #1 = prime(#0)\n",
    )
    .unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::CyclicSymtab);
}

#[test]
fn missing_symtab_entry_is_reported() {
    let e = parse_grammar("kind rc\nnonterminals S #4\nterminals a\nstart S\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnknownName);
}

#[test]
fn duplicate_symtab_entry_is_reported() {
    let e = parse_grammar(
        "kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n\
         symtab #0 = prime(S)\nsymtab #0 = prime(S)\n",
    )
    .unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::DuplicateSymtab);
    assert_eq!(e.line, 7);
}

#[test]
fn undeclared_symbols_are_reported_with_position() {
    let e = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS -> B\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnknownSymbol);
    assert_eq!((e.line, e.col), (5, 6));
}

#[test]
fn empty_rhs_is_rejected() {
    let e = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\nS ->\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::EmptyRhs);
}

#[test]
fn terminal_lhs_is_rejected() {
    let e = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\na -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Syntax);
    assert_eq!(e.line, 5);
}

#[test]
fn missing_kind_and_start_are_reported() {
    let e = parse_grammar("nonterminals S\nterminals a\nstart S\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::MissingSection);
    let e = parse_grammar("kind rc\nnonterminals S\nterminals a\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::MissingSection);
}

#[test]
fn duplicate_directives_are_rejected() {
    let e = parse_grammar("kind rc\nkind sc\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::DuplicateDeclaration);
    assert_eq!(e.line, 2);
}

#[test]
fn degree_outside_sc_is_rejected() {
    let e = parse_grammar("kind rc\ndegree 1 1\nnonterminals S\nterminals a\nstart S\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::WrongKind);
}

#[test]
fn parses_cd_system() {
    let sys = parse_system(
        "kind cd\n\
         nonterminals S A\n\
         terminals a\n\
         start S\n\
         component 1\n\
         S -> A A\n\
         component 2\n\
         A -> a per A\n",
    )
    .unwrap();
    assert_eq!(sys.components.len(), 2);
    assert_eq!(sys.components[0].len(), 1);
    assert_eq!(sys.components[1][0].label, 1);
}

#[test]
fn cd_rejects_def2_and_out_of_order_components() {
    let e = parse_device("kind cd\nmode def2\nnonterminals S\nterminals a\nstart S\ncomponent 1\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::WrongKind);
    let e = parse_device("kind cd\nnonterminals S\nterminals a\nstart S\ncomponent 2\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Syntax);
    let e = parse_device("kind cd\nnonterminals S\nterminals a\nstart S\nS -> a\ncomponent 1\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Syntax);
}

#[test]
fn component_lines_outside_cd_are_rejected() {
    let e = parse_grammar("kind rc\nnonterminals S\nterminals a\nstart S\ncomponent 1\nS -> a\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::WrongKind);
}

#[test]
fn kind_mismatch_helpers() {
    let cd = "kind cd\nnonterminals S\nterminals a\nstart S\ncomponent 1\nS -> a\n";
    assert_eq!(parse_grammar(cd).unwrap_err().kind, ParseErrorKind::WrongKind);
    let rc = "kind rc\nnonterminals S\nterminals a\nstart S\nS -> a\n";
    assert_eq!(parse_system(rc).unwrap_err().kind, ParseErrorKind::WrongKind);
}

fn roundtrip_grammar(g: &crate::grammar::Grammar) {
    let text = render_grammar(g).unwrap();
    let back = parse_grammar(&text).unwrap();
    assert_eq!(&back, g, "round-trip changed the grammar:\n{text}");
    // Canonical text is a fixed point.
    assert_eq!(render_grammar(&back).unwrap(), text);
}

#[test]
fn roundtrips_grammar_with_constructed_symbols() {
    let s = nt("S");
    let a = t("a");
    let s1 = s.indexed(1);
    let packed = Symbol::packed(vec![a.clone(), s.clone()]);
    let mut items = BTreeSet::new();
    items.insert(TagItem::Sym { sym: s.primed(), primed: false });
    items.insert(TagItem::Label { label: 2, primed: true });
    let tagged = Symbol::set_tagged(&packed, items);
    let empty_tag = Symbol::set_tagged(&s, BTreeSet::new());

    let g = crate::grammar::Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def2,
        nonterminals: [s.clone(), s.primed(), s1.clone(), tagged.clone(), empty_tag.clone()].into(),
        terminals: [a.clone()].into(),
        start: s.clone(),
        productions: vec![
            Production::ctx(1, s.clone(), vec![tagged.clone()], [], [s.primed()]),
            Production::ctx(2, tagged, vec![s1.clone(), empty_tag.clone()], [s.clone()], []),
            Production::cf(3, s1, vec![a.clone()]),
            Production::cf(4, empty_tag, vec![a]),
        ],
    };
    roundtrip_grammar(&g);
}

#[test]
fn roundtrips_sc_grammar_with_string_conditions() {
    let s = nt("S");
    let b = nt("B");
    let a = t("a");
    let g = crate::grammar::Grammar {
        kind: GrammarKind::Sc { per_degree: 2, forb_degree: 2 },
        mode: Mode::Def2,
        nonterminals: [s.clone(), b.clone()].into(),
        terminals: [a.clone()].into(),
        start: s.clone(),
        productions: vec![
            Production::new(
                1,
                s.clone(),
                vec![b.clone(), b.clone()],
                [Condition::new(vec![a.clone(), b.clone()]).unwrap()].into(),
                [Condition::new(vec![b.clone(), b.clone()]).unwrap()].into(),
            )
            .unwrap(),
            Production::cf(2, b, vec![a]),
        ],
    };
    roundtrip_grammar(&g);
}

#[test]
fn roundtrips_cd_system() {
    let s = nt("S");
    let a_sym = nt("A");
    let a = t("a");
    let sys = crate::grammar::CDSystem {
        nonterminals: [s.clone(), a_sym.clone(), s.indexed(2)].into(),
        terminals: [a.clone()].into(),
        start: s.clone(),
        components: vec![
            vec![Production::cf(1, s.clone(), vec![a_sym.clone(), s.indexed(2)])],
            vec![
                Production::ctx(1, a_sym.clone(), vec![a.clone()], [s.indexed(2)], []),
                Production::ctx(2, s.indexed(2), vec![a], [], [s]),
            ],
        ],
    };
    let text = render_system(&sys).unwrap();
    let back = parse_system(&text).unwrap();
    assert_eq!(back, sys, "round-trip changed the system:\n{text}");
    assert_eq!(render_system(&back).unwrap(), text);
}

#[test]
fn render_requires_contiguous_labels() {
    let s = nt("S");
    let g = crate::grammar::Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def1,
        nonterminals: [s.clone()].into(),
        terminals: [t("a")].into(),
        start: s.clone(),
        productions: vec![Production::cf(7, s, vec![t("a")])],
    };
    assert_eq!(render_grammar(&g), Err(RenderError::NonCanonicalLabels));
}

#[test]
fn roundtrips_bases_outside_the_alphabet() {
    // Constructed symbols may be built over atoms the device itself
    // never declares; those render as nt(...)/t(...) constructors.
    let s = nt("S");
    let g = crate::grammar::Grammar {
        kind: GrammarKind::Rc,
        mode: Mode::Def1,
        nonterminals: [s.primed(), s.indexed(1)].into(),
        terminals: [t("a")].into(),
        start: s.primed(),
        productions: vec![
            Production::cf(1, s.primed(), vec![s.indexed(1)]),
            Production::cf(2, s.indexed(1), vec![t("a")]),
        ],
    };
    let text = render_grammar(&g).unwrap();
    assert!(text.contains("nt(S)"), "undeclared base not wrapped:\n{text}");
    assert!(!text.contains("= prime(S)"), "bare undeclared name leaked:\n{text}");
    let back = parse_grammar(&text).unwrap();
    assert_eq!(back, g, "round-trip changed the grammar:\n{text}");
}

#[test]
fn inline_atoms_carry_their_class() {
    let g = parse_grammar(
        "kind rc\nnonterminals S #1\nterminals a\nstart S\n\
         S -> #1\n#1 -> a\nsymtab #1 = pack(t(x) nt(Y))\n",
    )
    .unwrap();
    let packed = Symbol::packed(vec![t("x"), nt("Y")]);
    assert!(g.nonterminals.contains(&packed));
    // Declared atoms still render bare; the inline ones keep wrappers.
    let text = render_grammar(&g).unwrap();
    assert!(text.contains("pack(t(x) nt(Y))"), "constructors lost:\n{text}");
    assert!(text.contains("start S\n"));
    assert_eq!(parse_grammar(&text).unwrap(), g);
}

#[test]
fn symbols_named_like_constructors_stay_plain() {
    let g = parse_grammar(
        "kind rc\nnonterminals S nt t #1\nterminals a\nstart S\n\
         S -> nt t #1\nnt -> a\nt -> a\n#1 -> a\nsymtab #1 = prime(nt)\n",
    )
    .unwrap();
    assert!(g.nonterminals.contains(&nt("nt")));
    assert!(g.nonterminals.contains(&nt("t")));
    assert!(g.nonterminals.contains(&nt("nt").primed()));
    let text = render_grammar(&g).unwrap();
    assert_eq!(parse_grammar(&text).unwrap(), g);
}
