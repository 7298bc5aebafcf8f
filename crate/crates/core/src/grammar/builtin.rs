use std::sync::OnceLock;

use super::{parse_grammar, Grammar};

/// Source of the builtin grammar, in the grammar file format.
pub const BUILTIN_GRAMMAR_TEXT: &str = include_str!("../../grammar/tinypy.bnf");

/// The TinyPy grammar: six program levels under the start symbol `all`.
pub fn builtin_tinypy() -> Grammar {
    static GRAMMAR: OnceLock<Grammar> = OnceLock::new();
    GRAMMAR
        .get_or_init(|| parse_grammar(BUILTIN_GRAMMAR_TEXT).expect("builtin grammar parses"))
        .clone()
}
