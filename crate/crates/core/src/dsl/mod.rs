//! The grammar description language.
//!
//! Documents are line-oriented. `#` followed by digits names a
//! constructed symbol; any other `#` starts a comment. A grammar:
//!
//! ```text
//! kind sc
//! mode def2
//! degree 1 0
//! nonterminals S A
//! terminals a1 a2
//! start S
//! S -> a1 A
//! A -> a1 A per a1
//! ```
//!
//! CD systems use `kind cd` and group productions under `component k`
//! headers. Conditions follow `per` / `for`: each is a single symbol or
//! a parenthesized string like `( a b )`. Constructed symbols appear as
//! `#k` wherever a symbol may, with their structure defined in trailing
//! `symtab` lines:
//!
//! ```text
//! symtab #0 = prime(A)
//! symtab #1 = index(S,2)
//! symtab #2 = stage(S,2,1)
//! symtab #3 = pack(a #0)
//! symtab #4 = tag(#1,{sym(#3),label'(2)})
//! ```
//!
//! Rendering is canonical: alphabets sorted, productions in label
//! order, condition sets in their set order, `#k` names assigned in
//! first-occurrence order. Parsing a rendered document reproduces the
//! original structure exactly; rendering requires labels to be 1..n in
//! listing order, which every constructor in this crate maintains.

mod parse;
mod render;

pub use parse::{parse_device, parse_grammar, parse_system};
pub use render::{render_device, render_grammar, render_system, RenderError};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSymbol,
    UnknownName,
    DuplicateDeclaration,
    DuplicateSymtab,
    CyclicSymtab,
    EmptyRhs,
    ConditionShape,
    MissingSection,
    WrongKind,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseError { line, col, kind, message: message.into() }
    }
}

#[cfg(test)]
mod tests;
