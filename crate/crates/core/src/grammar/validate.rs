use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::{Grammar, Symbol, KNOWN_COMPUTED, KNOWN_HOOKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FindingKind {
    // errors
    UndefinedNonterminal,
    UndefinedStart,
    NameCollision,
    EmptyProduction,
    UnsupportedHook,
    UnsupportedComputed,
    // warnings
    UnreachableRule,
    UnusedToken,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Finding {
    pub kind: FindingKind,
    pub symbol: String,
}

impl Finding {
    fn new(kind: FindingKind, symbol: &str) -> Self {
        Finding {
            kind,
            symbol: symbol.to_string(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.kind, self.symbol)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    /// No errors: the grammar can be used for derivation.
    pub fn is_usable(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} error(s), {} warning(s)",
            self.errors.len(),
            self.warnings.len()
        )?;
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks the structural invariants a grammar needs before derivation.
pub fn validate(grammar: &Grammar) -> ValidationReport {
    let mut errors = BTreeSet::new();
    let mut warnings = BTreeSet::new();
    let defined = |name: &str| grammar.production(name).is_some();

    if !defined(grammar.start()) {
        errors.insert(Finding::new(FindingKind::UndefinedStart, grammar.start()));
    }
    for hook in grammar.hooks() {
        if defined(hook) || grammar.is_computed(hook) {
            errors.insert(Finding::new(FindingKind::NameCollision, hook));
        }
        if !KNOWN_HOOKS.contains(&&**hook) {
            errors.insert(Finding::new(FindingKind::UnsupportedHook, hook));
        }
    }
    for (name, inputs) in grammar.computed() {
        if defined(name) {
            errors.insert(Finding::new(FindingKind::NameCollision, name));
        }
        if !KNOWN_COMPUTED.contains(&&**name) {
            errors.insert(Finding::new(FindingKind::UnsupportedComputed, name));
        }
        for input in inputs {
            if !defined(input) {
                errors.insert(Finding::new(FindingKind::UndefinedNonterminal, input));
            }
        }
    }

    let mut referenced: HashSet<&str> = HashSet::new();
    for production in grammar.productions().values() {
        if production.alternatives.is_empty() {
            errors.insert(Finding::new(FindingKind::EmptyProduction, &production.lhs));
        }
        for sym in production.alternatives.iter().flatten() {
            match sym {
                Symbol::Terminal(_) => {}
                Symbol::NonTerminal(n) => {
                    referenced.insert(n);
                    if !defined(n) && !grammar.is_hook(n) && !grammar.is_computed(n) {
                        errors.insert(Finding::new(FindingKind::UndefinedNonterminal, n));
                    }
                }
                Symbol::Hook(n) | Symbol::Computed(n) => {
                    referenced.insert(n);
                    if !grammar.is_hook(n) && !grammar.is_computed(n) {
                        errors.insert(Finding::new(FindingKind::UndefinedNonterminal, n));
                    }
                }
            }
        }
    }

    let reachable = reachable_rules(grammar);
    for (name, inputs) in grammar.computed() {
        if referenced.contains(&**name) {
            referenced.extend(inputs.iter().map(|i| &**i));
        }
    }
    for name in grammar.productions().keys() {
        if !reachable.contains(&**name) {
            warnings.insert(Finding::new(FindingKind::UnreachableRule, name));
        }
        if &**name != grammar.start() && !referenced.contains(&**name) {
            warnings.insert(Finding::new(FindingKind::UnusedToken, name));
        }
    }

    ValidationReport {
        errors: errors.into_iter().collect(),
        warnings: warnings.into_iter().collect(),
    }
}

/// Rules reachable from the start symbol, following computed-symbol inputs.
pub(crate) fn reachable_rules(grammar: &Grammar) -> HashSet<&str> {
    let mut seen: HashSet<&str> = HashSet::new();
    let mut stack = vec![grammar.start()];
    while let Some(name) = stack.pop() {
        if !seen.insert(name) {
            continue;
        }
        if let Some(inputs) = grammar.computed().get(name) {
            stack.extend(inputs.iter().map(|i| &**i));
        }
        let Some(production) = grammar.production(name) else {
            continue;
        };
        for sym in production.alternatives.iter().flatten() {
            if !sym.is_terminal() {
                stack.push(sym.text());
            }
        }
    }
    seen.retain(|n| grammar.production(n).is_some());
    seen
}
