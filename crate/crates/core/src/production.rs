//! Productions with context conditions.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductionError {
    #[error("condition must be a nonempty symbol string")]
    EmptyCondition,
    #[error("right-hand side must be nonempty")]
    EmptyRhs,
    #[error("left-hand side must be a nonterminal")]
    TerminalLhs,
}

/// A context condition: a nonempty string of symbols. Random context
/// conditions are single nonterminals; semi-conditional grammars of
/// degree (i,j) allow strings up to that length, terminals included.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition(Vec<Symbol>);

impl Condition {
    pub fn new(symbols: Vec<Symbol>) -> Result<Condition, ProductionError> {
        if symbols.is_empty() {
            return Err(ProductionError::EmptyCondition);
        }
        Ok(Condition(symbols))
    }

    pub fn sym(s: Symbol) -> Condition {
        Condition(vec![s])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The symbol of a length-1 condition.
    pub fn as_single(&self) -> Option<&Symbol> {
        if self.0.len() == 1 {
            Some(&self.0[0])
        } else {
            None
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.as_single() {
            return write!(f, "{s}");
        }
        write!(f, "(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// A production `lhs -> rhs` guarded by permitting and forbidding
/// condition sets. Right-hand sides are nonempty: every system here is
/// nonerasing, which is what makes bounded enumeration sound.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub label: u32,
    pub lhs: Symbol,
    pub rhs: Vec<Symbol>,
    pub per: BTreeSet<Condition>,
    pub forb: BTreeSet<Condition>,
}

impl Production {
    pub fn new(
        label: u32,
        lhs: Symbol,
        rhs: Vec<Symbol>,
        per: BTreeSet<Condition>,
        forb: BTreeSet<Condition>,
    ) -> Result<Production, ProductionError> {
        if rhs.is_empty() {
            return Err(ProductionError::EmptyRhs);
        }
        if lhs.is_terminal() {
            return Err(ProductionError::TerminalLhs);
        }
        Ok(Production { label, lhs, rhs, per, forb })
    }

    /// Context-free production: no conditions.
    pub fn cf(label: u32, lhs: Symbol, rhs: Vec<Symbol>) -> Production {
        Production { label, lhs, rhs, per: BTreeSet::new(), forb: BTreeSet::new() }
    }

    /// Production with single-symbol conditions, the usual case.
    pub fn ctx(
        label: u32,
        lhs: Symbol,
        rhs: Vec<Symbol>,
        per: impl IntoIterator<Item = Symbol>,
        forb: impl IntoIterator<Item = Symbol>,
    ) -> Production {
        Production {
            label,
            lhs,
            rhs,
            per: per.into_iter().map(Condition::sym).collect(),
            forb: forb.into_iter().map(Condition::sym).collect(),
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        std::iter::once(&self.lhs)
            .chain(self.rhs.iter())
            .chain(self.per.iter().flat_map(|c| c.symbols()))
            .chain(self.forb.iter().flat_map(|c| c.symbols()))
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}. {} ->", self.label, self.lhs)?;
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        if !self.per.is_empty() {
            write!(f, " per")?;
            for c in &self.per {
                write!(f, " {c}")?;
            }
        }
        if !self.forb.is_empty() {
            write!(f, " for")?;
            for c in &self.forb {
                write!(f, " {c}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Symbol;

    #[test]
    fn rejects_empty_rhs_and_terminal_lhs() {
        let s = Symbol::nonterminal("S").unwrap();
        let a = Symbol::terminal("a").unwrap();
        assert_eq!(
            Production::new(1, s.clone(), vec![], BTreeSet::new(), BTreeSet::new()),
            Err(ProductionError::EmptyRhs)
        );
        assert_eq!(
            Production::new(1, a.clone(), vec![s], BTreeSet::new(), BTreeSet::new()),
            Err(ProductionError::TerminalLhs)
        );
    }

    #[test]
    fn conditions_are_nonempty_and_ordered() {
        assert_eq!(Condition::new(vec![]), Err(ProductionError::EmptyCondition));
        let a = Symbol::terminal("a").unwrap();
        let b = Symbol::terminal("b").unwrap();
        let c1 = Condition::new(vec![a.clone(), b.clone()]).unwrap();
        let c2 = Condition::sym(a);
        // Set order is deterministic regardless of insertion order.
        let s1: BTreeSet<_> = [c1.clone(), c2.clone()].into_iter().collect();
        let s2: BTreeSet<_> = [c2, c1].into_iter().collect();
        assert_eq!(s1, s2);
    }
}
