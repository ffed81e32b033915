//! Stable digests of devices.
//!
//! The digest walks the structure directly instead of rendering to text
//! first; transform outputs can run to hundreds of thousands of
//! productions and serializing them just to fingerprint a sample would
//! dominate the cost.

use sha2::{Digest, Sha256};

use crate::grammar::{CDSystem, Device, Grammar, GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::{Symbol, SymbolClass, TagItem};

fn put_u32(h: &mut Sha256, v: u32) {
    h.update(v.to_le_bytes());
}

fn put_usize(h: &mut Sha256, v: usize) {
    h.update((v as u64).to_le_bytes());
}

fn put_symbol(h: &mut Sha256, s: &Symbol) {
    match s {
        Symbol::Atom { name, class } => {
            h.update([1u8, if *class == SymbolClass::Terminal { 1 } else { 0 }]);
            put_usize(h, name.len());
            h.update(name.as_bytes());
        }
        Symbol::Primed(b) => {
            h.update([2u8]);
            put_symbol(h, b);
        }
        Symbol::Indexed(b, i) => {
            h.update([3u8]);
            put_symbol(h, b);
            put_u32(h, *i);
        }
        Symbol::Staged(b, i, j) => {
            h.update([4u8]);
            put_symbol(h, b);
            put_u32(h, *i);
            put_u32(h, *j);
        }
        Symbol::Packed(items) => {
            h.update([5u8]);
            put_usize(h, items.len());
            for s in items.iter() {
                put_symbol(h, s);
            }
        }
        Symbol::SetTagged(b, tag) => {
            h.update([6u8]);
            put_symbol(h, b);
            put_usize(h, tag.items().len());
            for item in tag.items() {
                match item {
                    TagItem::Sym { sym, primed } => {
                        h.update([1u8, *primed as u8]);
                        put_symbol(h, sym);
                    }
                    TagItem::Label { label, primed } => {
                        h.update([2u8, *primed as u8]);
                        put_u32(h, *label);
                    }
                }
            }
        }
    }
}

fn put_condition(h: &mut Sha256, c: &Condition) {
    put_usize(h, c.len());
    for s in c.symbols() {
        put_symbol(h, s);
    }
}

fn put_production(h: &mut Sha256, p: &Production) {
    put_u32(h, p.label);
    put_symbol(h, &p.lhs);
    put_usize(h, p.rhs.len());
    for s in &p.rhs {
        put_symbol(h, s);
    }
    put_usize(h, p.per.len());
    for c in &p.per {
        put_condition(h, c);
    }
    put_usize(h, p.forb.len());
    for c in &p.forb {
        put_condition(h, c);
    }
}

fn put_alphabets(h: &mut Sha256, g_n: &std::collections::BTreeSet<Symbol>, g_t: &std::collections::BTreeSet<Symbol>, start: &Symbol) {
    put_usize(h, g_n.len());
    for s in g_n {
        put_symbol(h, s);
    }
    put_usize(h, g_t.len());
    for s in g_t {
        put_symbol(h, s);
    }
    put_symbol(h, start);
}

pub fn grammar_digest(g: &Grammar) -> String {
    let mut h = Sha256::new();
    h.update(b"grammar");
    match g.kind {
        GrammarKind::Rc => h.update([1u8]),
        GrammarKind::Sc { per_degree, forb_degree } => {
            h.update([2u8]);
            put_u32(&mut h, per_degree);
            put_u32(&mut h, forb_degree);
        }
        GrammarKind::Permitting => h.update([3u8]),
        GrammarKind::Forbidding => h.update([4u8]),
    }
    h.update([if g.mode == Mode::Def1 { 1u8 } else { 2u8 }]);
    put_alphabets(&mut h, &g.nonterminals, &g.terminals, &g.start);
    put_usize(&mut h, g.productions.len());
    for p in &g.productions {
        put_production(&mut h, p);
    }
    hex(&h.finalize())
}

pub fn system_digest(s: &CDSystem) -> String {
    let mut h = Sha256::new();
    h.update(b"cd-system");
    put_alphabets(&mut h, &s.nonterminals, &s.terminals, &s.start);
    put_usize(&mut h, s.components.len());
    for comp in &s.components {
        put_usize(&mut h, comp.len());
        for p in comp {
            put_production(&mut h, p);
        }
    }
    hex(&h.finalize())
}

pub fn form_digest(form: &[Symbol]) -> String {
    let mut h = Sha256::new();
    h.update(b"form");
    put_usize(&mut h, form.len());
    for s in form {
        put_symbol(&mut h, s);
    }
    hex(h.finalize().as_slice())
}

pub fn device_digest(d: &Device) -> String {
    match d {
        Device::Grammar(g) => grammar_digest(g),
        Device::System(s) => system_digest(s),
    }
}

fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::production::Production;
    use crate::symbol::Symbol;
    use std::collections::BTreeSet;

    fn tiny() -> Grammar {
        let s = Symbol::nonterminal("S").unwrap();
        let a = Symbol::terminal("a").unwrap();
        Grammar {
            kind: GrammarKind::Rc,
            mode: Mode::Def1,
            nonterminals: BTreeSet::from([s.clone()]),
            terminals: BTreeSet::from([a.clone()]),
            start: s.clone(),
            productions: vec![Production::cf(1, s, vec![a])],
        }
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let g = tiny();
        assert_eq!(grammar_digest(&g), grammar_digest(&g.clone()));
        let mut h = tiny();
        h.mode = Mode::Def2;
        assert_ne!(grammar_digest(&g), grammar_digest(&h));
        let mut k = tiny();
        k.productions[0].label = 2;
        assert_ne!(grammar_digest(&g), grammar_digest(&k));
    }
}
