use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::grammar::{CDSystem, Device, Grammar, GrammarKind, Mode};
use crate::production::Production;
use crate::symbol::{Symbol, TagItem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("production labels must be 1..n in listing order to render canonically")]
    NonCanonicalLabels,
}

/// Assigns `#k` names to constructed symbols in first-occurrence order.
struct Names {
    map: HashMap<Symbol, usize>,
    order: Vec<Symbol>,
    /// The device's alphabet. Atoms outside it can occur as bases of
    /// constructed symbols and render as `nt(X)`/`t(x)`, since no
    /// declaration pins down their class.
    declared: HashMap<String, Symbol>,
}

impl Names {
    fn new<'s>(alphabet: impl IntoIterator<Item = &'s Symbol>) -> Self {
        let declared = alphabet
            .into_iter()
            .filter_map(|s| s.atom_name().map(|n| (n.to_string(), s.clone())))
            .collect();
        Names { map: HashMap::new(), order: Vec::new(), declared }
    }

    fn token(&mut self, sym: &Symbol) -> String {
        if let Symbol::Atom { name, .. } = sym {
            return if self.declared.get(&**name) == Some(sym) {
                name.to_string()
            } else if sym.is_nonterminal() {
                format!("nt({name})")
            } else {
                format!("t({name})")
            };
        }
        let next = self.order.len();
        let k = *self.map.entry(sym.clone()).or_insert_with(|| {
            self.order.push(sym.clone());
            next
        });
        format!("#{k}")
    }
}

fn production_line(p: &Production, names: &mut Names) -> String {
    let mut line = names.token(&p.lhs);
    line.push_str(" ->");
    for s in &p.rhs {
        line.push(' ');
        line.push_str(&names.token(s));
    }
    for (kw, conds) in [("per", &p.per), ("for", &p.forb)] {
        if conds.is_empty() {
            continue;
        }
        line.push(' ');
        line.push_str(kw);
        for c in conds {
            if let Some(s) = c.as_single() {
                line.push(' ');
                line.push_str(&names.token(s));
            } else {
                line.push_str(" (");
                for s in c.symbols() {
                    line.push(' ');
                    line.push_str(&names.token(s));
                }
                line.push_str(" )");
            }
        }
    }
    line
}

fn check_labels(prods: &[Production]) -> Result<(), RenderError> {
    for (i, p) in prods.iter().enumerate() {
        if p.label as usize != i + 1 {
            return Err(RenderError::NonCanonicalLabels);
        }
    }
    Ok(())
}

fn alphabet_lines(
    out: &mut String,
    nonterminals: &std::collections::BTreeSet<Symbol>,
    terminals: &std::collections::BTreeSet<Symbol>,
    start: &Symbol,
    names: &mut Names,
) {
    out.push_str("nonterminals");
    for s in nonterminals {
        out.push(' ');
        out.push_str(&names.token(s));
    }
    out.push('\n');
    out.push_str("terminals");
    for s in terminals {
        out.push(' ');
        out.push_str(&names.token(s));
    }
    out.push('\n');
    let _ = writeln!(out, "start {}", names.token(start));
}

/// Emits `symtab` lines for every constructed symbol seen so far.
/// Describing one symbol can name nested constructed symbols for the
/// first time, so the queue grows while we walk it.
fn symtab_lines(out: &mut String, names: &mut Names) {
    let mut i = 0;
    while i < names.order.len() {
        let sym = names.order[i].clone();
        let desc = match &sym {
            Symbol::Atom { .. } => unreachable!("atoms never get generated names"),
            Symbol::Primed(b) => format!("prime({})", names.token(b)),
            Symbol::Indexed(b, k) => format!("index({},{k})", names.token(b)),
            Symbol::Staged(b, k, j) => format!("stage({},{k},{j})", names.token(b)),
            Symbol::Packed(items) => {
                let toks: Vec<String> = items.iter().map(|s| names.token(s)).collect();
                format!("pack({})", toks.join(" "))
            }
            Symbol::SetTagged(b, tag) => {
                let base = names.token(b);
                let items: Vec<String> = tag
                    .items()
                    .iter()
                    .map(|item| match item {
                        TagItem::Sym { sym, primed } => {
                            format!("sym{}({})", if *primed { "'" } else { "" }, names.token(sym))
                        }
                        TagItem::Label { label, primed } => {
                            format!("label{}({label})", if *primed { "'" } else { "" })
                        }
                    })
                    .collect();
                format!("tag({base},{{{}}})", items.join(","))
            }
        };
        let _ = writeln!(out, "symtab #{i} = {desc}");
        i += 1;
    }
}

pub fn render_grammar(g: &Grammar) -> Result<String, RenderError> {
    check_labels(&g.productions)?;
    let mut names = Names::new(g.nonterminals.iter().chain(&g.terminals));
    let mut out = String::new();
    let _ = writeln!(out, "kind {}", g.kind.name());
    let _ = writeln!(out, "mode {}", match g.mode { Mode::Def1 => "def1", Mode::Def2 => "def2" });
    if let GrammarKind::Sc { per_degree, forb_degree } = g.kind {
        let _ = writeln!(out, "degree {per_degree} {forb_degree}");
    }
    alphabet_lines(&mut out, &g.nonterminals, &g.terminals, &g.start, &mut names);
    for p in &g.productions {
        out.push_str(&production_line(p, &mut names));
        out.push('\n');
    }
    symtab_lines(&mut out, &mut names);
    Ok(out)
}

pub fn render_system(sys: &CDSystem) -> Result<String, RenderError> {
    for comp in &sys.components {
        check_labels(comp)?;
    }
    let mut names = Names::new(sys.nonterminals.iter().chain(&sys.terminals));
    let mut out = String::new();
    out.push_str("kind cd\n");
    alphabet_lines(&mut out, &sys.nonterminals, &sys.terminals, &sys.start, &mut names);
    for (k, comp) in sys.components.iter().enumerate() {
        let _ = writeln!(out, "component {}", k + 1);
        for p in comp {
            out.push_str(&production_line(p, &mut names));
            out.push('\n');
        }
    }
    symtab_lines(&mut out, &mut names);
    Ok(out)
}

pub fn render_device(d: &Device) -> Result<String, RenderError> {
    match d {
        Device::Grammar(g) => render_grammar(g),
        Device::System(s) => render_system(s),
    }
}
