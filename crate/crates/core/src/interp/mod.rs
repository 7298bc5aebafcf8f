//! Tokenizer, parser, and evaluator for the Python subset the generator
//! emits: integer literals, variables, `+ - * /`, comparisons, `and`/`or`/
//! `not`, assignment, `print`, `if`/`elif`/`else`, and `for ... in range`.
//!
//! Semantics follow Python 3: `/` is true division, ints and floats mix by
//! promotion, floats print like `repr`. Conditions evaluate to booleans.

mod ast;
mod eval;
mod lexer;
mod parser;
mod value;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{BinOp, Expr, Stmt};
pub use eval::evaluate;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_program;
pub use value::{format_value, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ErrorKind {
    DivisionByZero,
    OverflowGuard,
    StepLimit,
    UnboundVariable,
    ParseError,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A failed run: what went wrong and on which line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{kind} at line {line}")]
pub struct RunError {
    pub kind: ErrorKind,
    pub line: usize,
}

impl RunError {
    pub fn new(kind: ErrorKind, line: usize) -> Self {
        RunError { kind, line }
    }
}

/// Captured output (one `\n`-terminated line per print) or the error.
pub type RunResult = Result<String, RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Statement executions allowed before [`ErrorKind::StepLimit`].
    pub max_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 100_000 }
    }
}

/// Tokenizes, parses, and evaluates `source`.
pub fn run(source: &str, limits: &Limits) -> RunResult {
    let tokens = tokenize(source)?;
    let program = parse_program(&tokens)?;
    evaluate(&program, limits)
}
