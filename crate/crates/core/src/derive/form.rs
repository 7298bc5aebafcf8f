use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use super::{DerivationConfig, DeriveError, Expander, RuleCoverage, ScopeContext};
use crate::grammar::{Grammar, Symbol};

/// A symbol in a sentential form, tagged with the production that
/// introduced it so context-aware rules can tell, say, an assignment target
/// from an initialization target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormItem {
    pub symbol: Symbol,
    /// Index of the introducing production, `None` for seed symbols.
    pub parent: Option<usize>,
}

impl FormItem {
    pub fn new(symbol: Symbol) -> Self {
        FormItem {
            symbol,
            parent: None,
        }
    }

    pub fn with_parent(symbol: Symbol, parent: usize) -> Self {
        FormItem {
            symbol,
            parent: Some(parent),
        }
    }

    pub(crate) fn terminal(text: Arc<str>) -> Self {
        FormItem::new(Symbol::Terminal(text))
    }
}

/// A mix of terminals and unexpanded symbols.
///
/// Stored as the terminal prefix already passed over plus a stack whose top
/// is the leftmost symbol not yet visited.
#[derive(Debug, Clone, Default)]
pub struct SententialForm {
    emitted: Vec<Arc<str>>,
    pending: Vec<FormItem>,
}

impl SententialForm {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        Self::from_items(symbols.into_iter().map(FormItem::new).collect())
    }

    pub fn from_items(mut items: Vec<FormItem>) -> Self {
        items.reverse();
        SententialForm {
            emitted: Vec::new(),
            pending: items,
        }
    }

    /// The form, left to right.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.emitted
            .iter()
            .map(|t| Symbol::Terminal(t.clone()))
            .chain(self.pending.iter().rev().map(|i| i.symbol.clone()))
            .collect()
    }

    pub fn is_all_terminals(&self) -> bool {
        self.pending.iter().all(|i| i.symbol.is_terminal())
    }

    /// Concatenated terminal text; non-terminal symbols are skipped.
    pub fn into_code(self) -> String {
        let mut code: String = self.emitted.iter().map(|t| &**t).collect();
        for item in self.pending.iter().rev() {
            if let Symbol::Terminal(t) = &item.symbol {
                code.push_str(t);
            }
        }
        code
    }

    /// Passes over leading terminals and pops the leftmost non-terminal.
    pub(crate) fn advance_to_nonterminal(
        &mut self,
        context: &mut ScopeContext,
    ) -> Option<FormItem> {
        while let Some(item) = self.pending.pop() {
            match item.symbol {
                Symbol::Terminal(t) => {
                    context.observe_terminal(&t);
                    self.emitted.push(t);
                }
                _ => return Some(item),
            }
        }
        None
    }

    pub(crate) fn push_replacement(&mut self, replacement: Vec<FormItem>) {
        self.pending.extend(replacement.into_iter().rev());
    }

    /// Whether a `<rule>` introduced by `parent` is still waiting to the
    /// right of the current position.
    pub(crate) fn pending_in_parent(&self, parent: Option<usize>, rule: &str) -> bool {
        self.pending
            .iter()
            .rev()
            .take_while(|i| i.parent == parent)
            .any(|i| matches!(&i.symbol, Symbol::NonTerminal(n) if &**n == rule))
    }
}

/// Re-entry depth of each self-recursive rule in the current chain.
#[derive(Debug, Clone, Default)]
pub struct DepthLedger {
    depths: HashMap<Arc<str>, u32>,
}

impl DepthLedger {
    pub fn depth(&self, rule: &str) -> u32 {
        self.depths.get(rule).copied().unwrap_or(0)
    }

    pub(crate) fn enter(&mut self, rule: &Arc<str>) {
        *self.depths.entry(rule.clone()).or_insert(0) += 1;
    }

    pub(crate) fn reset(&mut self, rule: &str) {
        self.depths.remove(rule);
    }
}

/// Replaces the leftmost non-terminal, hook, or computed symbol of `form`.
/// Symbols left of it are terminals and stay as they are.
pub fn expand_once<R: Rng + ?Sized>(
    grammar: &Grammar,
    form: &mut SententialForm,
    rng: &mut R,
    context: &mut ScopeContext,
    ledger: &mut DepthLedger,
    config: &DerivationConfig,
) -> Result<(), DeriveError> {
    let mut coverage = RuleCoverage::new(grammar);
    let mut expander = Expander {
        grammar,
        config,
        coverage: &mut coverage,
    };
    if expander.step(form, rng, context, ledger)? {
        Ok(())
    } else {
        Err(DeriveError::NothingToExpand)
    }
}
