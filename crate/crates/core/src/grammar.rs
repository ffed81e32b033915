//! Grammars and cooperating-distribution systems.

use std::collections::BTreeSet;
use std::fmt;

use crate::production::Production;
use crate::symbol::Symbol;

/// How context conditions read the sentential form.
///
/// Under `Def1` (the random context reading) the rewritten occurrence is
/// excluded: for `u A v => u x v` the conditions are checked against
/// `u v`. Under `Def2` (the semi-conditional reading) they are checked
/// against the whole form `u A v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Def1,
    Def2,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Def1 => write!(f, "def1"),
            Mode::Def2 => write!(f, "def2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrammarKind {
    /// Random context: conditions are single nonterminals.
    Rc,
    /// Semi-conditional of degree (i,j): at most one permitting string of
    /// length <= i and one forbidding string of length <= j, terminals
    /// allowed inside conditions.
    Sc { per_degree: u32, forb_degree: u32 },
    /// Random context with all forbidding sets empty.
    Permitting,
    /// Random context with all permitting sets empty.
    Forbidding,
}

impl GrammarKind {
    pub fn default_mode(&self) -> Mode {
        match self {
            GrammarKind::Sc { .. } => Mode::Def2,
            _ => Mode::Def1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GrammarKind::Rc => "rc",
            GrammarKind::Sc { .. } => "sc",
            GrammarKind::Permitting => "permitting",
            GrammarKind::Forbidding => "forbidding",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub kind: GrammarKind,
    pub mode: Mode,
    pub nonterminals: BTreeSet<Symbol>,
    pub terminals: BTreeSet<Symbol>,
    pub start: Symbol,
    pub productions: Vec<Production>,
}

impl Grammar {
    pub fn contains(&self, sym: &Symbol) -> bool {
        self.nonterminals.contains(sym) || self.terminals.contains(sym)
    }

    /// Alphabet V = N union T in canonical order.
    pub fn alphabet(&self) -> impl Iterator<Item = &Symbol> {
        self.nonterminals.iter().chain(self.terminals.iter())
    }
}

/// A cooperating-distribution system: one shared alphabet, a start
/// symbol, and an ordered list of production components that take turns
/// in t-mode (a chosen component rewrites as long as it can, and hands
/// over only when no production of it applies). Components use the
/// `Def1` relation; all systems here are permitting, so forbidding sets
/// stay empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CDSystem {
    pub nonterminals: BTreeSet<Symbol>,
    pub terminals: BTreeSet<Symbol>,
    pub start: Symbol,
    pub components: Vec<Vec<Production>>,
}

impl CDSystem {
    pub fn contains(&self, sym: &Symbol) -> bool {
        self.nonterminals.contains(sym) || self.terminals.contains(sym)
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &Symbol> {
        self.nonterminals.iter().chain(self.terminals.iter())
    }

    pub fn production_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }
}

/// Either kind of rewriting device the workbench handles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Device {
    Grammar(Grammar),
    System(CDSystem),
}

impl Device {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Device::Grammar(g) => g.kind.name(),
            Device::System(_) => "cd",
        }
    }

    pub fn as_grammar(&self) -> Option<&Grammar> {
        match self {
            Device::Grammar(g) => Some(g),
            Device::System(_) => None,
        }
    }

    pub fn as_system(&self) -> Option<&CDSystem> {
        match self {
            Device::System(s) => Some(s),
            Device::Grammar(_) => None,
        }
    }
}

impl From<Grammar> for Device {
    fn from(g: Grammar) -> Device {
        Device::Grammar(g)
    }
}

impl From<CDSystem> for Device {
    fn from(s: CDSystem) -> Device {
        Device::System(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_modes_follow_kind() {
        assert_eq!(GrammarKind::Rc.default_mode(), Mode::Def1);
        assert_eq!(GrammarKind::Permitting.default_mode(), Mode::Def1);
        assert_eq!(GrammarKind::Forbidding.default_mode(), Mode::Def1);
        assert_eq!(GrammarKind::Sc { per_degree: 1, forb_degree: 1 }.default_mode(), Mode::Def2);
    }
}
