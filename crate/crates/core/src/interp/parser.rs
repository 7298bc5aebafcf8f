//! Recursive-descent parser for the generated subset.
//!
//! Precedence, loosest first: `or`, `and`, `not`, comparison (not chained),
//! `+ -`, `* /`, atoms. Block bodies are exactly one tab-indented simple
//! statement.

use super::ast::{BinOp, Expr, Stmt};
use super::lexer::{Token, TokenKind};
use super::{ErrorKind, RunError};

struct Parser<'t, 'a> {
    tokens: &'t [Token<'a>],
    pos: usize,
}

pub fn parse_program(tokens: &[Token<'_>]) -> Result<Vec<Stmt>, RunError> {
    let mut parser = Parser { tokens, pos: 0 };
    let mut program = Vec::new();
    loop {
        while parser.eat(TokenKind::Newline).is_some() {}
        if parser.at_end() {
            return Ok(program);
        }
        program.push(parser.statement()?);
    }
}

impl<'a> Parser<'_, 'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<TokenKind> {
        self.tokens.get(self.pos).map(|t| t.kind)
    }

    fn line(&self) -> usize {
        match self.tokens.get(self.pos) {
            Some(t) => t.line,
            None => self
                .tokens
                .last()
                .map_or(1, |t| t.line + usize::from(t.kind == TokenKind::Newline)),
        }
    }

    fn error<T>(&self) -> Result<T, RunError> {
        Err(RunError::new(ErrorKind::ParseError, self.line()))
    }

    fn eat(&mut self, kind: TokenKind) -> Option<&Token<'a>> {
        if self.peek() == Some(kind) {
            self.pos += 1;
            Some(&self.tokens[self.pos - 1])
        } else {
            None
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<&Token<'a>, RunError> {
        if self.peek() == Some(kind) {
            self.pos += 1;
            Ok(&self.tokens[self.pos - 1])
        } else {
            self.error()
        }
    }

    fn end_of_line(&mut self) -> Result<(), RunError> {
        if self.at_end() || self.eat(TokenKind::Newline).is_some() {
            Ok(())
        } else {
            self.error()
        }
    }

    fn statement(&mut self) -> Result<Stmt, RunError> {
        match self.peek() {
            Some(TokenKind::If) => self.if_statement(),
            Some(TokenKind::For) => self.for_statement(),
            _ => {
                let stmt = self.simple_statement()?;
                self.end_of_line()?;
                Ok(stmt)
            }
        }
    }

    fn simple_statement(&mut self) -> Result<Stmt, RunError> {
        let line = self.line();
        match self.peek() {
            Some(TokenKind::Print) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let value = self.expression()?;
                self.expect(TokenKind::RParen)?;
                Ok(Stmt::Print { value, line })
            }
            Some(TokenKind::Ident) => {
                let target = self.expect(TokenKind::Ident)?.text.to_string();
                self.expect(TokenKind::Assign)?;
                let value = self.expression()?;
                Ok(Stmt::Assign {
                    target,
                    value,
                    line,
                })
            }
            _ => self.error(),
        }
    }

    /// `:` NEWLINE INDENT simple-statement end-of-line
    fn block(&mut self) -> Result<Stmt, RunError> {
        self.expect(TokenKind::Colon)?;
        self.expect(TokenKind::Newline)?;
        self.expect(TokenKind::Indent)?;
        let body = self.simple_statement()?;
        self.end_of_line()?;
        Ok(body)
    }

    fn if_statement(&mut self) -> Result<Stmt, RunError> {
        let line = self.line();
        self.expect(TokenKind::If)?;
        let condition = self.expression()?;
        let mut arms = vec![(condition, self.block()?)];
        while self.eat(TokenKind::Elif).is_some() {
            let condition = self.expression()?;
            arms.push((condition, self.block()?));
        }
        let else_body = match self.eat(TokenKind::Else) {
            Some(_) => Some(Box::new(self.block()?)),
            None => None,
        };
        Ok(Stmt::If {
            arms,
            else_body,
            line,
        })
    }

    fn for_statement(&mut self) -> Result<Stmt, RunError> {
        let line = self.line();
        self.expect(TokenKind::For)?;
        let var = self.expect(TokenKind::Ident)?.text.to_string();
        self.expect(TokenKind::In)?;
        self.expect(TokenKind::Range)?;
        self.expect(TokenKind::LParen)?;
        let start = self.int_literal()?;
        self.expect(TokenKind::Comma)?;
        let stop = self.int_literal()?;
        let step = match self.eat(TokenKind::Comma) {
            Some(_) => {
                let step = self.int_literal()?;
                if step <= 0 {
                    return self.error();
                }
                Some(step)
            }
            None => None,
        };
        self.expect(TokenKind::RParen)?;
        let body = Box::new(self.block()?);
        Ok(Stmt::For {
            var,
            start,
            stop,
            step,
            body,
            line,
        })
    }

    fn int_literal(&mut self) -> Result<i64, RunError> {
        let line = self.line();
        let text = self.expect(TokenKind::Int)?.text;
        // Python rejects leading zeros except in all-zero literals
        if text.len() > 1 && text.starts_with('0') && text.bytes().any(|b| b != b'0') {
            return Err(RunError::new(ErrorKind::ParseError, line));
        }
        text.parse()
            .map_err(|_| RunError::new(ErrorKind::OverflowGuard, line))
    }

    fn expression(&mut self) -> Result<Expr, RunError> {
        let mut lhs = self.and_expression()?;
        while self.eat(TokenKind::Or).is_some() {
            lhs = Expr::binary(BinOp::Or, lhs, self.and_expression()?);
        }
        Ok(lhs)
    }

    fn and_expression(&mut self) -> Result<Expr, RunError> {
        let mut lhs = self.not_expression()?;
        while self.eat(TokenKind::And).is_some() {
            lhs = Expr::binary(BinOp::And, lhs, self.not_expression()?);
        }
        Ok(lhs)
    }

    fn not_expression(&mut self) -> Result<Expr, RunError> {
        if self.eat(TokenKind::Not).is_some() {
            return Ok(Expr::Not(Box::new(self.not_expression()?)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, RunError> {
        let lhs = self.arithmetic()?;
        let op = match self.peek() {
            Some(TokenKind::Lt) => BinOp::Lt,
            Some(TokenKind::Gt) => BinOp::Gt,
            Some(TokenKind::Le) => BinOp::Le,
            Some(TokenKind::Ge) => BinOp::Ge,
            Some(TokenKind::Ne) => BinOp::Ne,
            Some(TokenKind::EqEq) => BinOp::Eq,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.arithmetic()?;
        if matches!(
            self.peek(),
            Some(
                TokenKind::Lt
                    | TokenKind::Gt
                    | TokenKind::Le
                    | TokenKind::Ge
                    | TokenKind::Ne
                    | TokenKind::EqEq
            )
        ) {
            // chained comparisons are outside the subset
            return self.error();
        }
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn arithmetic(&mut self) -> Result<Expr, RunError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, RunError> {
        let mut lhs = self.atom()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.atom()?);
        }
    }

    fn atom(&mut self) -> Result<Expr, RunError> {
        match self.peek() {
            Some(TokenKind::Int) => Ok(Expr::IntLit(self.int_literal()?)),
            Some(TokenKind::Ident) => {
                let name = self.expect(TokenKind::Ident)?.text;
                Ok(Expr::Var(name.to_string()))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let inner = self.expression()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Paren(Box::new(inner)))
            }
            _ => self.error(),
        }
    }
}
