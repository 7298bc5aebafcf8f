//! BNF grammars: data model, text format, validation, and the builtin TinyPy
//! grammar.
//!
//! A [`Grammar`] is the usual 4-tuple: nonterminals are the keys of
//! [`Grammar::productions`], terminals are the [`Symbol::Terminal`] leaves,
//! the rules are the [`Production`]s and the start symbol is
//! [`Grammar::start`]. Two extensions let a context-free grammar describe
//! programs that never read an unbound variable:
//!
//! * **hooks** are placeholders (`expression_identifier`,
//!   `display_identifier`) that the derivation engine resolves against the
//!   variables currently in scope;
//! * **computed** symbols (`final`) get their text from an arithmetic formula
//!   over values drawn elsewhere in the derivation.

mod builtin;
mod text;
mod validate;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

pub use builtin::{builtin_tinypy, BUILTIN_GRAMMAR_TEXT};
pub use text::{parse_grammar, serialize_grammar};
pub use validate::{validate, Finding, FindingKind, ValidationReport};

/// Hook names the derivation engine knows how to resolve.
pub const KNOWN_HOOKS: [&str; 2] = ["expression_identifier", "display_identifier"];

/// Computed symbols the derivation engine knows how to evaluate.
pub const KNOWN_COMPUTED: [&str; 1] = ["final"];

/// One grammar symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(Arc<str>),
    NonTerminal(Arc<str>),
    Hook(Arc<str>),
    Computed(Arc<str>),
}

impl Symbol {
    pub fn terminal(text: &str) -> Self {
        Symbol::Terminal(Arc::from(text))
    }

    pub fn nonterminal(name: &str) -> Self {
        Symbol::NonTerminal(Arc::from(name))
    }

    pub fn hook(name: &str) -> Self {
        Symbol::Hook(Arc::from(name))
    }

    pub fn computed(name: &str) -> Self {
        Symbol::Computed(Arc::from(name))
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    /// The terminal text or the referenced name.
    pub fn text(&self) -> &str {
        match self {
            Symbol::Terminal(s)
            | Symbol::NonTerminal(s)
            | Symbol::Hook(s)
            | Symbol::Computed(s) => s,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => write!(f, "{t:?}"),
            Symbol::NonTerminal(n) | Symbol::Hook(n) | Symbol::Computed(n) => write!(f, "<{n}>"),
        }
    }
}

/// A sequence of symbols; empty for the `""` alternative.
pub type Alternative = Vec<Symbol>;

/// `lhs ::= alt_0 | alt_1 | ...`, alternatives in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: Arc<str>,
    pub alternatives: Vec<Alternative>,
}

impl Production {
    pub fn new(lhs: &str, alternatives: Vec<Alternative>) -> Self {
        Production {
            lhs: Arc::from(lhs),
            alternatives,
        }
    }

    /// Whether alternative `index` mentions this production's own lhs.
    pub fn is_self_recursive_alternative(&self, index: usize) -> bool {
        self.alternatives[index]
            .iter()
            .any(|s| matches!(s, Symbol::NonTerminal(n) if *n == self.lhs))
    }

    pub fn is_self_recursive(&self) -> bool {
        (0..self.alternatives.len()).any(|i| self.is_self_recursive_alternative(i))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("rule <{0}> is defined more than once")]
    DuplicateRule(String),
}

impl GrammarError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        GrammarError::Syntax {
            line,
            message: message.into(),
        }
    }
}

/// An immutable grammar. Cheap to share across threads behind an `Arc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    productions: IndexMap<Arc<str>, Production>,
    start: Arc<str>,
    hooks: BTreeSet<Arc<str>>,
    /// Computed symbol name -> rules its formula draws from.
    computed: IndexMap<Arc<str>, Vec<Arc<str>>>,
    /// Offset of each production's first alternative in the flat
    /// (production, alternative) numbering used by coverage bitsets.
    alt_offsets: Vec<usize>,
}

impl Grammar {
    pub fn new(
        productions: IndexMap<Arc<str>, Production>,
        start: &str,
        hooks: BTreeSet<Arc<str>>,
        computed: IndexMap<Arc<str>, Vec<Arc<str>>>,
    ) -> Self {
        let mut alt_offsets = Vec::with_capacity(productions.len());
        let mut next = 0;
        for p in productions.values() {
            alt_offsets.push(next);
            next += p.alternatives.len();
        }
        Grammar {
            productions,
            start: Arc::from(start),
            hooks,
            computed,
            alt_offsets,
        }
    }

    pub fn productions(&self) -> &IndexMap<Arc<str>, Production> {
        &self.productions
    }

    pub fn production(&self, name: &str) -> Option<&Production> {
        self.productions.get(name)
    }

    /// Index of a production in definition order.
    pub fn production_index(&self, name: &str) -> Option<usize> {
        self.productions.get_index_of(name)
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn start_production(&self) -> Option<&Production> {
        self.productions.get(&*self.start)
    }

    pub fn hooks(&self) -> &BTreeSet<Arc<str>> {
        &self.hooks
    }

    pub fn computed(&self) -> &IndexMap<Arc<str>, Vec<Arc<str>>> {
        &self.computed
    }

    pub fn is_hook(&self, name: &str) -> bool {
        self.hooks.contains(name)
    }

    pub fn is_computed(&self, name: &str) -> bool {
        self.computed.contains_key(name)
    }

    /// Total number of (production, alternative) pairs.
    pub fn alternative_count(&self) -> usize {
        self.productions
            .values()
            .map(|p| p.alternatives.len())
            .sum()
    }

    /// Flat index of alternative `alt` of the production at `production_index`.
    pub fn flat_alternative(&self, production_index: usize, alt: usize) -> usize {
        self.alt_offsets[production_index] + alt
    }

    /// Inverse of [`Grammar::flat_alternative`].
    pub fn unflatten_alternative(&self, flat: usize) -> (&str, usize) {
        let idx = self.alt_offsets.partition_point(|&o| o <= flat) - 1;
        let (name, _) = self
            .productions
            .get_index(idx)
            .expect("flat index in range");
        (name, flat - self.alt_offsets[idx])
    }
}
