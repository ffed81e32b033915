//! Grammar symbols.
//!
//! A symbol is either a named atom or a form constructed from other
//! symbols. Constructed forms exist so that transforms can mint fresh
//! nonterminals (primed copies, indexed copies, staged counters, packed
//! right-hand sides, set-tagged bookkeeping symbols) without inventing
//! string names that could collide with user atoms. Equality, ordering
//! and hashing are structural throughout.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("invalid atom name `{0}`: expected [A-Za-z][A-Za-z0-9_]*")]
    BadName(String),
    #[error("`{0}` is reserved and cannot be used as an atom name")]
    Reserved(String),
}

/// Words reserved by the grammar DSL; atoms may not use them.
pub const RESERVED_NAMES: [&str; 2] = ["per", "for"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolClass {
    Nonterminal,
    Terminal,
}

/// One element of a set tag: a symbol or a production label, each with a
/// primed flag used to mark items already processed by a sweep.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagItem {
    Sym { sym: Symbol, primed: bool },
    Label { label: u32, primed: bool },
}

/// A set tag with its hash precomputed. Tags can hold hundreds of items
/// and the same tag is shared by many symbols, so hashing via the cache
/// and comparing via pointer identity first keeps symbol interning cheap.
#[derive(Debug, Clone)]
pub struct TagSet {
    items: Arc<BTreeSet<TagItem>>,
    cached_hash: u64,
}

impl TagSet {
    pub fn new(items: BTreeSet<TagItem>) -> Self {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        items.hash(&mut h);
        TagSet { items: Arc::new(items), cached_hash: h.finish() }
    }

    pub fn items(&self) -> &BTreeSet<TagItem> {
        &self.items
    }
}

impl PartialEq for TagSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.items, &other.items) || self.items == other.items
    }
}

impl Eq for TagSet {}

impl PartialOrd for TagSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TagSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.items, &other.items) {
            return std::cmp::Ordering::Equal;
        }
        self.items.cmp(&other.items)
    }
}

impl Hash for TagSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.cached_hash);
    }
}

/// A grammar symbol. Only `Atom` may be terminal; every constructed form
/// is a nonterminal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Atom { name: Arc<str>, class: SymbolClass },
    Primed(Arc<Symbol>),
    Indexed(Arc<Symbol>, u32),
    Staged(Arc<Symbol>, u32, u32),
    Packed(Arc<[Symbol]>),
    SetTagged(Arc<Symbol>, TagSet),
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Symbol {
    pub fn atom(name: &str, class: SymbolClass) -> Result<Symbol, SymbolError> {
        if !valid_name(name) {
            return Err(SymbolError::BadName(name.to_string()));
        }
        if RESERVED_NAMES.contains(&name) {
            return Err(SymbolError::Reserved(name.to_string()));
        }
        Ok(Symbol::Atom { name: Arc::from(name), class })
    }

    pub fn nonterminal(name: &str) -> Result<Symbol, SymbolError> {
        Symbol::atom(name, SymbolClass::Nonterminal)
    }

    pub fn terminal(name: &str) -> Result<Symbol, SymbolError> {
        Symbol::atom(name, SymbolClass::Terminal)
    }

    pub fn primed(&self) -> Symbol {
        Symbol::Primed(Arc::new(self.clone()))
    }

    /// `index` is 1-based; 0 is never used by any construction.
    pub fn indexed(&self, index: u32) -> Symbol {
        assert!(index >= 1, "symbol index must be positive");
        Symbol::Indexed(Arc::new(self.clone()), index)
    }

    pub fn staged(&self, index: u32, stage: u32) -> Symbol {
        assert!(index >= 1 && stage >= 1, "symbol index and stage must be positive");
        Symbol::Staged(Arc::new(self.clone()), index, stage)
    }

    pub fn packed(items: Vec<Symbol>) -> Symbol {
        assert!(!items.is_empty(), "packed symbol needs at least one item");
        Symbol::Packed(Arc::from(items))
    }

    pub fn set_tagged(base: &Symbol, items: BTreeSet<TagItem>) -> Symbol {
        Symbol::SetTagged(Arc::new(base.clone()), TagSet::new(items))
    }

    pub fn set_tagged_shared(base: &Symbol, tag: TagSet) -> Symbol {
        Symbol::SetTagged(Arc::new(base.clone()), tag)
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Atom { class: SymbolClass::Terminal, .. })
    }

    pub fn is_nonterminal(&self) -> bool {
        !self.is_terminal()
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Symbol::Atom { name, .. } => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    /// Debug-oriented rendering. The DSL renderer assigns `#k` names to
    /// constructed symbols instead; this form is for logs and errors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Atom { name, .. } => write!(f, "{name}"),
            Symbol::Primed(s) => write!(f, "{s}'"),
            Symbol::Indexed(s, i) => write!(f, "[{s},{i}]"),
            Symbol::Staged(s, i, j) => write!(f, "[{s},{i},{j}]"),
            Symbol::Packed(items) => {
                write!(f, "<")?;
                for (k, s) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ">")
            }
            Symbol::SetTagged(s, tag) => {
                write!(f, "[{s},{{")?;
                for (k, item) in tag.items().iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    match item {
                        TagItem::Sym { sym, primed } => {
                            write!(f, "{sym}{}", if *primed { "'" } else { "" })?
                        }
                        TagItem::Label { label, primed } => {
                            write!(f, "p{label}{}", if *primed { "'" } else { "" })?
                        }
                    }
                }
                write!(f, "}}]")
            }
        }
    }
}

/// Primes `base` until the result is absent from `taken`. Constructions
/// use this for their fresh start symbols so that feeding one transform's
/// output into another never collides.
pub fn fresh_primed(base: &Symbol, taken: &BTreeSet<Symbol>) -> Symbol {
    let mut candidate = base.primed();
    while taken.contains(&candidate) {
        candidate = candidate.primed();
    }
    candidate
}
