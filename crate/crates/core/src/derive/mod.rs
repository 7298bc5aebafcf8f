//! Seeded random leftmost derivation.
//!
//! Plain rules expand to a uniformly chosen alternative. A handful of rules,
//! recognised by name, get context-aware choices so every generated program
//! only reads variables that were assigned before:
//!
//! | rule / symbol                 | policy                                                    |
//! |-------------------------------|-----------------------------------------------------------|
//! | `identifier_initialization`   | repeats `<initialization>` a uniform count of times       |
//! | `variable` in `initialization`| fresh letter, drawn without replacement                   |
//! | `variable` in an assignment   | reuse an assigned letter (p = 1/2) or a fresh one         |
//! | hook in `for_header`          | fresh loop variable                                       |
//! | `expression_identifier`       | uniform over assigned letters and the loop variable       |
//! | `display_identifier`          | loop variable with p = 1/2 inside a loop, else uniform    |
//! | `final`                       | `step * execution_count + initial - 1`                    |
//! | other self-recursive rules    | recursive alternative weighted `2^-depth`, capped         |
//!
//! A variable assigned on a line enters scope once that line's newline is
//! emitted, so `a = a + 1` with a fresh `a` cannot be produced.

mod coverage;
mod form;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Grammar, Production, Symbol};
use crate::rng::DEFAULT_SEED;

pub use coverage::RuleCoverage;
pub use form::{expand_once, DepthLedger, FormItem, SententialForm};

pub(crate) mod roles {
    pub const VARIABLE: &str = "variable";
    pub const INITIALIZATION: &str = "initialization";
    pub const INIT_REPEAT: &str = "identifier_initialization";
    pub const ASSIGNMENTS: [&str; 2] = ["simple_assignments", "advanced_assignments"];
    pub const LOOP_HEADER: &str = "for_header";
    pub const LOOP_INITIAL: &str = "initial";
    pub const STEP: &str = "step";
    pub const EXECUTION_COUNT: &str = "execution_count";
    pub const EXPRESSION_IDENTIFIER: &str = "expression_identifier";
    pub const DISPLAY_IDENTIFIER: &str = "display_identifier";
    pub const FINAL: &str = "final";
}

/// Upper bound on expansions for one program; only reachable with custom
/// grammars whose mutual recursion the depth damping does not see.
const MAX_EXPANSIONS: usize = 100_000;

/// The six program shapes, in the order of the start rule's alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelId {
    L1_1,
    L1_2,
    L2_1,
    L2_2,
    L3_1,
    L3_2,
}

impl LevelId {
    pub const ALL: [LevelId; 6] = [
        LevelId::L1_1,
        LevelId::L1_2,
        LevelId::L2_1,
        LevelId::L2_2,
        LevelId::L3_1,
        LevelId::L3_2,
    ];

    /// Position among the start rule's alternatives.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<LevelId> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        ["1.1", "1.2", "2.1", "2.2", "3.1", "3.2"][self.index()]
    }
}

impl fmt::Display for LevelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown level `{0}` (expected one of 1.1, 1.2, 2.1, 2.2, 3.1, 3.2)")]
pub struct ParseLevelError(pub String);

impl FromStr for LevelId {
    type Err = ParseLevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LevelId::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| ParseLevelError(s.to_string()))
    }
}

impl Serialize for LevelId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LevelId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeriveError {
    #[error("every level weight is zero")]
    AllWeightsZero,
    #[error("invalid derivation config: {0}")]
    InvalidConfig(String),
    #[error("level {0} is not an alternative of the start rule")]
    LevelNotInGrammar(LevelId),
    #[error("rule <{0}> is not defined")]
    UndefinedRule(String),
    #[error("recursion in <{0}> exceeded the depth limit with no way out")]
    DepthExhausted(String),
    #[error("derivation did not finish within {MAX_EXPANSIONS} expansions")]
    ExpansionLimit,
    #[error("no variable in scope for hook <{0}>")]
    EmptyScope(String),
    #[error("no unused variable name left")]
    NoFreshVariable,
    #[error("unknown hook <{0}>")]
    UnknownHook(String),
    #[error("cannot compute <{0}>: {1}")]
    Computed(String, &'static str),
    #[error("sentential form has no symbol left to expand")]
    NothingToExpand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivationConfig {
    /// Weight of each level, indexed by [`LevelId::index`].
    pub level_weights: [f64; 6],
    pub seed: u64,
    /// Deepest re-entry allowed for a self-recursive rule.
    pub max_chain_depth: u32,
    /// How many `<initialization>` lines a program starts with.
    pub init_count_range: RangeInclusive<u32>,
}

impl Default for DerivationConfig {
    fn default() -> Self {
        DerivationConfig {
            level_weights: [1.0; 6],
            seed: DEFAULT_SEED,
            max_chain_depth: 3,
            init_count_range: 1..=3,
        }
    }
}

impl DerivationConfig {
    /// All weight on one level.
    pub fn single_level(level: LevelId) -> Self {
        let mut weights = [0.0; 6];
        weights[level.index()] = 1.0;
        DerivationConfig {
            level_weights: weights,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), DeriveError> {
        if self
            .level_weights
            .iter()
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(DeriveError::InvalidConfig(
                "level weights must be finite and non-negative".into(),
            ));
        }
        if self.level_weights.iter().all(|w| *w == 0.0) {
            return Err(DeriveError::AllWeightsZero);
        }
        if self.max_chain_depth == 0 {
            return Err(DeriveError::InvalidConfig(
                "max_chain_depth must be at least 1".into(),
            ));
        }
        let (lo, hi) = (*self.init_count_range.start(), *self.init_count_range.end());
        if lo < 1 || hi > 26 || lo > hi {
            return Err(DeriveError::InvalidConfig(
                "init_count_range must be a non-empty range within 1..=26".into(),
            ));
        }
        Ok(())
    }
}

/// Variables visible to hooks, plus the bookkeeping the context-aware rules
/// need while a program is being derived.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScopeContext {
    /// Assigned variables, in order of first assignment.
    pub initialized: Vec<Arc<str>>,
    pub loop_variable: Option<Arc<str>>,
    /// Assignment target waiting for its line's newline.
    pending_binding: Option<Arc<str>>,
    init_remaining: Option<u32>,
    pending_step: Option<usize>,
    loop_initial: Option<i64>,
    execution_count: Option<u32>,
}

impl ScopeContext {
    pub fn with_variables<I, S>(initialized: I, loop_variable: Option<&str>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        ScopeContext {
            initialized: initialized
                .into_iter()
                .map(|s| Arc::from(s.as_ref()))
                .collect(),
            loop_variable: loop_variable.map(Arc::from),
            ..Default::default()
        }
    }

    fn is_taken(&self, name: &str) -> bool {
        self.initialized.iter().any(|v| &**v == name)
            || self.pending_binding.as_deref() == Some(name)
            || self.loop_variable.as_deref() == Some(name)
    }

    /// Called for every terminal as it leaves the sentential form, left to
    /// right.
    fn observe_terminal(&mut self, text: &str) {
        if text.contains('\n') {
            if let Some(name) = self.pending_binding.take() {
                if !self.initialized.contains(&name) {
                    self.initialized.push(name);
                }
            }
        }
    }

    /// Execution count drawn for the loop bound, if a loop was derived.
    pub fn execution_count(&self) -> Option<u32> {
        self.execution_count
    }
}

/// A fully derived program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedProgram {
    /// Terminal text; ends with exactly one newline.
    pub code: String,
    pub level: LevelId,
    pub rule_coverage: RuleCoverage,
    /// Iterations the loop will run, for programs with a `for` loop.
    pub loop_execution_count: Option<u32>,
}

/// Picks a level with probability proportional to its weight.
pub fn select_level<R: Rng + ?Sized>(
    config: &DerivationConfig,
    rng: &mut R,
) -> Result<LevelId, DeriveError> {
    let dist = WeightedIndex::new(config.level_weights).map_err(|e| match e {
        rand::distributions::WeightedError::AllWeightsZero => DeriveError::AllWeightsZero,
        other => DeriveError::InvalidConfig(other.to_string()),
    })?;
    Ok(LevelId::ALL[dist.sample(rng)])
}

/// Loop bound that makes `range(initial, final, step)` run exactly
/// `execution_count` times: `step * execution_count + initial - 1`, raised to
/// `step * (execution_count - 1) + initial + 1` when smaller. The two agree
/// on iteration count for `step >= 2`; for `step == 1` the first is one
/// iteration short.
pub fn compute_final(initial: i64, step: i64, execution_count: i64) -> i64 {
    let bound = step * execution_count + initial - 1;
    bound.max(step * (execution_count - 1) + initial + 1)
}

/// Resolves a hook to a variable name from `context`.
pub fn resolve_hook<R: Rng + ?Sized>(
    name: &str,
    context: &ScopeContext,
    rng: &mut R,
) -> Result<Arc<str>, DeriveError> {
    let initialized = &context.initialized;
    match (name, &context.loop_variable) {
        (roles::EXPRESSION_IDENTIFIER | roles::DISPLAY_IDENTIFIER, None) => {
            if initialized.is_empty() {
                return Err(DeriveError::EmptyScope(name.to_string()));
            }
            Ok(initialized[rng.gen_range(0..initialized.len())].clone())
        }
        (roles::EXPRESSION_IDENTIFIER, Some(lv)) => {
            let i = rng.gen_range(0..=initialized.len());
            Ok(initialized.get(i).unwrap_or(lv).clone())
        }
        (roles::DISPLAY_IDENTIFIER, Some(lv)) => {
            if initialized.is_empty() || rng.gen_bool(0.5) {
                Ok(lv.clone())
            } else {
                Ok(initialized[rng.gen_range(0..initialized.len())].clone())
            }
        }
        _ => Err(DeriveError::UnknownHook(name.to_string())),
    }
}

/// Derives one program of the given level.
pub fn derive<R: Rng + ?Sized>(
    grammar: &Grammar,
    level: LevelId,
    rng: &mut R,
    config: &DerivationConfig,
) -> Result<DerivedProgram, DeriveError> {
    let (start_index, _, start) = grammar
        .productions()
        .get_full(grammar.start())
        .ok_or_else(|| DeriveError::UndefinedRule(grammar.start().to_string()))?;
    let alternative = start
        .alternatives
        .get(level.index())
        .ok_or(DeriveError::LevelNotInGrammar(level))?;

    let mut coverage = RuleCoverage::new(grammar);
    coverage.insert(grammar.flat_alternative(start_index, level.index()));
    let mut form = SententialForm::from_items(
        alternative
            .iter()
            .map(|s| FormItem::with_parent(s.clone(), start_index))
            .collect(),
    );
    let mut context = ScopeContext::default();
    let mut ledger = DepthLedger::default();
    let mut expander = Expander {
        grammar,
        config,
        coverage: &mut coverage,
    };

    let mut expansions = 0;
    while expander.step(&mut form, rng, &mut context, &mut ledger)? {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(DeriveError::ExpansionLimit);
        }
    }

    let mut code = form.into_code();
    let trimmed = code.trim_end_matches('\n').len();
    code.truncate(trimmed);
    code.push('\n');
    Ok(DerivedProgram {
        code,
        level,
        rule_coverage: coverage,
        loop_execution_count: context.execution_count,
    })
}

/// The expansion step shared by [`derive`] and [`expand_once`].
pub(crate) struct Expander<'a> {
    pub grammar: &'a Grammar,
    pub config: &'a DerivationConfig,
    pub coverage: &'a mut RuleCoverage,
}

impl Expander<'_> {
    /// Moves leading terminals out of the form and expands the leftmost
    /// non-terminal. Returns `false` once the form is all terminals.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        form: &mut SententialForm,
        rng: &mut R,
        context: &mut ScopeContext,
        ledger: &mut DepthLedger,
    ) -> Result<bool, DeriveError> {
        let Some(item) = form.advance_to_nonterminal(context) else {
            return Ok(false);
        };
        let replacement = self.expand(&item, form, rng, context, ledger)?;
        form.push_replacement(replacement);
        Ok(true)
    }

    fn parent_is(&self, item: &FormItem, rule: &str) -> bool {
        item.parent
            .and_then(|p| self.grammar.productions().get_index(p))
            .is_some_and(|(name, _)| &**name == rule)
    }

    fn expand<R: Rng + ?Sized>(
        &mut self,
        item: &FormItem,
        form: &SententialForm,
        rng: &mut R,
        context: &mut ScopeContext,
        ledger: &mut DepthLedger,
    ) -> Result<Vec<FormItem>, DeriveError> {
        match &item.symbol {
            Symbol::Terminal(_) => unreachable!("terminals are consumed before expansion"),
            Symbol::NonTerminal(name) => self.expand_rule(name, item, rng, context, ledger),
            Symbol::Hook(name) => {
                let var = if self.parent_is(item, roles::LOOP_HEADER)
                    && &**name == roles::EXPRESSION_IDENTIFIER
                {
                    let var = self.fresh_variable(rng, context)?;
                    context.loop_variable = Some(var.clone());
                    var
                } else {
                    resolve_hook(name, context, rng)?
                };
                Ok(vec![FormItem::terminal(var)])
            }
            Symbol::Computed(name) => {
                let value = self.compute(name, item, form, rng, context)?;
                Ok(vec![FormItem::terminal(Arc::from(value.to_string()))])
            }
        }
    }

    fn expand_rule<R: Rng + ?Sized>(
        &mut self,
        name: &str,
        item: &FormItem,
        rng: &mut R,
        context: &mut ScopeContext,
        ledger: &mut DepthLedger,
    ) -> Result<Vec<FormItem>, DeriveError> {
        let (index, _, production) = self
            .grammar
            .productions()
            .get_full(name)
            .ok_or_else(|| DeriveError::UndefinedRule(name.to_string()))?;
        if production.alternatives.is_empty() {
            return Err(DeriveError::UndefinedRule(name.to_string()));
        }

        let alt = match name {
            roles::INIT_REPEAT if production.is_self_recursive() => {
                self.choose_repeat(production, rng, context)
            }
            roles::STEP if context.pending_step.is_some() => context.pending_step.take().unwrap(),
            roles::VARIABLE => {
                let chosen = if self.parent_is(item, roles::INITIALIZATION) {
                    Some(self.fresh_variable(rng, context)?)
                } else if roles::ASSIGNMENTS.iter().any(|r| self.parent_is(item, r)) {
                    Some(self.assignment_target(rng, context)?)
                } else {
                    None
                };
                match chosen {
                    Some(var) => {
                        context.pending_binding = Some(var.clone());
                        alternative_for_text(production, &var).unwrap_or(0)
                    }
                    None => rng.gen_range(0..production.alternatives.len()),
                }
            }
            _ if production.is_self_recursive() => self.choose_damped(production, rng, ledger)?,
            _ => rng.gen_range(0..production.alternatives.len()),
        };
        self.coverage
            .insert(self.grammar.flat_alternative(index, alt));

        let symbols = &production.alternatives[alt];
        if self.parent_is(item, roles::LOOP_INITIAL) {
            if let [Symbol::Terminal(t)] = symbols.as_slice() {
                context.loop_initial = t.parse().ok();
            }
        }
        Ok(symbols
            .iter()
            .map(|s| FormItem::with_parent(s.clone(), index))
            .collect())
    }

    fn choose_repeat<R: Rng + ?Sized>(
        &self,
        production: &Production,
        rng: &mut R,
        context: &mut ScopeContext,
    ) -> usize {
        let remaining = context
            .init_remaining
            .unwrap_or_else(|| rng.gen_range(self.config.init_count_range.clone()));
        let recursive = (0..production.alternatives.len())
            .find(|&i| production.is_self_recursive_alternative(i));
        let base = (0..production.alternatives.len())
            .find(|&i| !production.is_self_recursive_alternative(i));
        match (recursive, base) {
            (Some(r), _) if remaining > 1 => {
                context.init_remaining = Some(remaining - 1);
                r
            }
            (_, Some(b)) => {
                context.init_remaining = None;
                b
            }
            (Some(r), None) => r,
            (None, None) => 0,
        }
    }

    fn choose_damped<R: Rng + ?Sized>(
        &self,
        production: &Production,
        rng: &mut R,
        ledger: &mut DepthLedger,
    ) -> Result<usize, DeriveError> {
        let depth = ledger.depth(&production.lhs);
        let weights: Vec<f64> = (0..production.alternatives.len())
            .map(|i| {
                if !production.is_self_recursive_alternative(i) {
                    1.0
                } else if depth >= self.config.max_chain_depth {
                    0.0
                } else {
                    0.5f64.powi(depth as i32)
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            return Err(DeriveError::DepthExhausted(production.lhs.to_string()));
        }
        let mut target = rng.gen::<f64>() * total;
        let mut chosen = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if *w > 0.0 && target < *w {
                chosen = i;
                break;
            }
            target -= w;
        }
        if production.is_self_recursive_alternative(chosen) {
            ledger.enter(&production.lhs);
        } else {
            ledger.reset(&production.lhs);
        }
        Ok(chosen)
    }

    fn variable_names(&self) -> Vec<Arc<str>> {
        self.grammar
            .production(roles::VARIABLE)
            .map(|p| {
                p.alternatives
                    .iter()
                    .filter_map(|alt| match alt.as_slice() {
                        [Symbol::Terminal(t)] => Some(t.clone()),
                        _ => None,
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    fn fresh_variable<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        context: &ScopeContext,
    ) -> Result<Arc<str>, DeriveError> {
        let free: Vec<Arc<str>> = self
            .variable_names()
            .into_iter()
            .filter(|v| !context.is_taken(v))
            .collect();
        if free.is_empty() {
            return Err(DeriveError::NoFreshVariable);
        }
        Ok(free[rng.gen_range(0..free.len())].clone())
    }

    fn assignment_target<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        context: &ScopeContext,
    ) -> Result<Arc<str>, DeriveError> {
        let reusable = &context.initialized;
        if !reusable.is_empty() && rng.gen_bool(0.5) {
            return Ok(reusable[rng.gen_range(0..reusable.len())].clone());
        }
        match self.fresh_variable(rng, context) {
            Err(DeriveError::NoFreshVariable) if !reusable.is_empty() => {
                Ok(reusable[rng.gen_range(0..reusable.len())].clone())
            }
            other => other,
        }
    }

    fn compute<R: Rng + ?Sized>(
        &mut self,
        name: &str,
        item: &FormItem,
        form: &SententialForm,
        rng: &mut R,
        context: &mut ScopeContext,
    ) -> Result<i64, DeriveError> {
        if name != roles::FINAL {
            return Err(DeriveError::Computed(
                name.to_string(),
                "no formula for this symbol",
            ));
        }
        let initial = context.loop_initial.ok_or(DeriveError::Computed(
            name.to_string(),
            "no <initial> derived before it",
        ))?;
        let (_, count) = self.draw_number_alt(roles::EXECUTION_COUNT, rng)?;
        // a <step> later in the same header must agree with the bound
        let step = if form.pending_in_parent(item.parent, roles::STEP) {
            let (alt, step) = self.draw_number_alt(roles::STEP, rng)?;
            context.pending_step = Some(alt);
            step
        } else {
            1
        };
        context.execution_count = Some(count as u32);
        Ok(compute_final(initial, step, count))
    }

    /// Draws a uniform alternative of a rule whose alternatives are integer
    /// literals, recording coverage.
    fn draw_number_alt<R: Rng + ?Sized>(
        &mut self,
        rule: &str,
        rng: &mut R,
    ) -> Result<(usize, i64), DeriveError> {
        let (index, _, production) = self
            .grammar
            .productions()
            .get_full(rule)
            .ok_or_else(|| DeriveError::UndefinedRule(rule.to_string()))?;
        if production.alternatives.is_empty() {
            return Err(DeriveError::UndefinedRule(rule.to_string()));
        }
        let alt = rng.gen_range(0..production.alternatives.len());
        let value = match production.alternatives[alt].as_slice() {
            [Symbol::Terminal(t)] => t.parse::<i64>().ok(),
            _ => None,
        }
        .ok_or(DeriveError::Computed(
            roles::FINAL.to_string(),
            "loop parameters must be integer literals",
        ))?;
        self.coverage
            .insert(self.grammar.flat_alternative(index, alt));
        Ok((alt, value))
    }
}

fn alternative_for_text(production: &Production, text: &str) -> Option<usize> {
    production
        .alternatives
        .iter()
        .position(|alt| matches!(alt.as_slice(), [Symbol::Terminal(t)] if &**t == text))
}
