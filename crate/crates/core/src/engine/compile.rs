//! Interned, index-based grammar representation used by the search loops.
//!
//! Symbols become dense `u32` ids so sentential forms are plain `Vec<u32>`
//! and condition checks never touch the structural symbol types.

use std::collections::HashMap;

use crate::grammar::{CDSystem, Grammar, Mode};
use crate::production::{Condition, Production};
use crate::symbol::Symbol;

pub(crate) struct SymTable {
    syms: Vec<Symbol>,
    ids: HashMap<Symbol, u32>,
    terminal: Vec<bool>,
}

impl SymTable {
    fn new() -> SymTable {
        SymTable { syms: Vec::new(), ids: HashMap::new(), terminal: Vec::new() }
    }

    fn intern(&mut self, s: &Symbol, terminal: bool) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.syms.len() as u32;
        self.syms.push(s.clone());
        self.ids.insert(s.clone(), id);
        self.terminal.push(terminal);
        id
    }

    pub(crate) fn id_of(&self, s: &Symbol) -> Option<u32> {
        self.ids.get(s).copied()
    }

    pub(crate) fn sym(&self, id: u32) -> &Symbol {
        &self.syms[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.syms.len()
    }

    pub(crate) fn is_all_terminal(&self, form: &[u32]) -> bool {
        form.iter().all(|&id| self.terminal[id as usize])
    }

    pub(crate) fn decode(&self, form: &[u32]) -> Vec<Symbol> {
        form.iter().map(|&id| self.sym(id).clone()).collect()
    }

    pub(crate) fn encode(&self, form: &[Symbol]) -> Option<Vec<u32>> {
        form.iter().map(|s| self.id_of(s)).collect()
    }

    /// Encoding that tolerates symbols outside the compiled device by
    /// interning them as inert nonterminals (nothing rewrites them).
    pub(crate) fn encode_interning(&mut self, form: &[Symbol]) -> Vec<u32> {
        form.iter().map(|s| self.intern(s, false)).collect()
    }
}

pub(crate) enum CCond {
    Single(u32),
    Str(Vec<u32>),
}

pub(crate) struct CProd {
    pub(crate) label: u32,
    pub(crate) lhs: u32,
    pub(crate) rhs: Vec<u32>,
    pub(crate) per: Vec<CCond>,
    pub(crate) forb: Vec<CCond>,
}

/// Productions of one grammar or one system component, bucketed by lhs.
pub(crate) struct ProdSet {
    pub(crate) prods: Vec<CProd>,
    /// Symbol id -> indices into `prods`, sorted by label so successor
    /// enumeration is (position, label)-ordered.
    by_lhs: Vec<Vec<u32>>,
}

fn intern_production(table: &mut SymTable, p: &Production) {
    for s in p.symbols() {
        table.intern(s, false);
    }
}

fn compile_cond(table: &SymTable, c: &Condition) -> CCond {
    let ids: Vec<u32> = c
        .symbols()
        .iter()
        .map(|s| table.id_of(s).expect("condition symbol interned during compilation"))
        .collect();
    if ids.len() == 1 {
        CCond::Single(ids[0])
    } else {
        CCond::Str(ids)
    }
}

impl ProdSet {
    fn build(table: &SymTable, prods: &[Production]) -> ProdSet {
        let compiled: Vec<CProd> = prods
            .iter()
            .map(|p| CProd {
                label: p.label,
                lhs: table.id_of(&p.lhs).expect("lhs interned"),
                rhs: p.rhs.iter().map(|s| table.id_of(s).expect("rhs interned")).collect(),
                per: p.per.iter().map(|c| compile_cond(table, c)).collect(),
                forb: p.forb.iter().map(|c| compile_cond(table, c)).collect(),
            })
            .collect();
        let mut by_lhs = vec![Vec::new(); table.len()];
        let mut order: Vec<u32> = (0..compiled.len() as u32).collect();
        order.sort_by_key(|&i| (compiled[i as usize].label, i));
        for i in order {
            by_lhs[compiled[i as usize].lhs as usize].push(i);
        }
        ProdSet { prods: compiled, by_lhs }
    }

    /// Symbols interned after the build (inert extras) have no bucket.
    pub(crate) fn candidates(&self, lhs: u32) -> &[u32] {
        self.by_lhs.get(lhs as usize).map(Vec::as_slice).unwrap_or(&[])
    }
}

pub(crate) struct CompiledGrammar {
    pub(crate) table: SymTable,
    pub(crate) mode: Mode,
    pub(crate) set: ProdSet,
    pub(crate) start: u32,
}

impl CompiledGrammar {
    pub(crate) fn new(g: &Grammar) -> CompiledGrammar {
        let mut table = SymTable::new();
        for t in &g.terminals {
            table.intern(t, true);
        }
        for n in &g.nonterminals {
            table.intern(n, false);
        }
        table.intern(&g.start, false);
        for p in &g.productions {
            intern_production(&mut table, p);
        }
        let set = ProdSet::build(&table, &g.productions);
        let start = table.id_of(&g.start).expect("start interned");
        CompiledGrammar { table, mode: g.mode, set, start }
    }
}

pub(crate) struct CompiledSystem {
    pub(crate) table: SymTable,
    pub(crate) components: Vec<ProdSet>,
    pub(crate) start: u32,
}

impl CompiledSystem {
    pub(crate) fn new(sys: &CDSystem) -> CompiledSystem {
        let mut table = SymTable::new();
        for t in &sys.terminals {
            table.intern(t, true);
        }
        for n in &sys.nonterminals {
            table.intern(n, false);
        }
        table.intern(&sys.start, false);
        for comp in &sys.components {
            for p in comp {
                intern_production(&mut table, p);
            }
        }
        let components = sys.components.iter().map(|c| ProdSet::build(&table, c)).collect();
        let start = table.id_of(&sys.start).expect("start interned");
        CompiledSystem { table, components, start }
    }

    pub(crate) fn encode_interning(&mut self, form: &[Symbol]) -> Vec<u32> {
        self.table.encode_interning(form)
    }
}

fn contains_subslice(hay: &[u32], needle: &[u32]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

fn cond_holds_def2(c: &CCond, form: &[u32]) -> bool {
    match c {
        CCond::Single(x) => form.contains(x),
        CCond::Str(w) => contains_subslice(form, w),
    }
}

/// Checks conditions against the form with position `pos` deleted.
/// Single-symbol conditions avoid materializing the deleted copy.
fn cond_holds_def1(c: &CCond, form: &[u32], pos: usize, deleted: &mut Option<Vec<u32>>) -> bool {
    match c {
        CCond::Single(x) => form.iter().enumerate().any(|(i, s)| i != pos && s == x),
        CCond::Str(w) => {
            let ctx = deleted.get_or_insert_with(|| {
                let mut v = Vec::with_capacity(form.len() - 1);
                v.extend_from_slice(&form[..pos]);
                v.extend_from_slice(&form[pos + 1..]);
                v
            });
            contains_subslice(ctx, w)
        }
    }
}

pub(crate) fn applicable_at(p: &CProd, form: &[u32], pos: usize, mode: Mode) -> bool {
    debug_assert_eq!(form[pos], p.lhs);
    match mode {
        Mode::Def2 => {
            p.per.iter().all(|c| cond_holds_def2(c, form))
                && !p.forb.iter().any(|c| cond_holds_def2(c, form))
        }
        Mode::Def1 => {
            let mut deleted = None;
            p.per.iter().all(|c| cond_holds_def1(c, form, pos, &mut deleted))
                && !p.forb.iter().any(|c| cond_holds_def1(c, form, pos, &mut deleted))
        }
    }
}

fn rewrite(form: &[u32], pos: usize, rhs: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(form.len() - 1 + rhs.len());
    out.extend_from_slice(&form[..pos]);
    out.extend_from_slice(rhs);
    out.extend_from_slice(&form[pos + 1..]);
    out
}

/// All derivation steps from `form`, ordered by (position, label).
pub(crate) fn successor_steps(
    set: &ProdSet,
    mode: Mode,
    form: &[u32],
) -> Vec<(u32, usize, Vec<u32>)> {
    let mut out = Vec::new();
    for (pos, &sym) in form.iter().enumerate() {
        for &pi in set.candidates(sym) {
            let p = &set.prods[pi as usize];
            if applicable_at(p, form, pos, mode) {
                out.push((p.label, pos, rewrite(form, pos, &p.rhs)));
            }
        }
    }
    out
}

/// Successor forms within the length bound, plus whether any production
/// was applicable at all (needed for exhaustion checks: an applicable
/// production whose result exceeds the bound still rules out terminality).
pub(crate) fn successor_forms(
    set: &ProdSet,
    mode: Mode,
    form: &[u32],
    bound: usize,
) -> (bool, Vec<Vec<u32>>) {
    let mut any = false;
    let mut out = Vec::new();
    for (pos, &sym) in form.iter().enumerate() {
        for &pi in set.candidates(sym) {
            let p = &set.prods[pi as usize];
            if applicable_at(p, form, pos, mode) {
                any = true;
                if form.len() - 1 + p.rhs.len() <= bound {
                    out.push(rewrite(form, pos, &p.rhs));
                }
            }
        }
    }
    (any, out)
}
