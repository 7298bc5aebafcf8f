use std::collections::HashMap;

use super::ast::{BinOp, Expr, Stmt};
use super::value::{format_value, Value};
use super::{ErrorKind, Limits, RunError};

struct Machine {
    env: HashMap<String, Value>,
    output: String,
    steps_left: u64,
}

/// Executes a parsed program and returns everything it printed.
pub fn evaluate(program: &[Stmt], limits: &Limits) -> Result<String, RunError> {
    let mut machine = Machine {
        env: HashMap::new(),
        output: String::new(),
        steps_left: limits.max_steps,
    };
    for stmt in program {
        machine.exec(stmt)?;
    }
    Ok(machine.output)
}

impl Machine {
    fn exec(&mut self, stmt: &Stmt) -> Result<(), RunError> {
        let line = stmt.line();
        if self.steps_left == 0 {
            return Err(RunError::new(ErrorKind::StepLimit, line));
        }
        self.steps_left -= 1;
        let at_line = |kind| RunError::new(kind, line);

        match stmt {
            Stmt::Assign { target, value, .. } => {
                let v = self.eval(value).map_err(at_line)?;
                self.env.insert(target.clone(), v);
            }
            Stmt::Print { value, .. } => {
                let v = self.eval(value).map_err(at_line)?;
                self.output.push_str(&format_value(v));
                self.output.push('\n');
            }
            Stmt::If {
                arms, else_body, ..
            } => {
                for (i, (condition, body)) in arms.iter().enumerate() {
                    // an elif header sits on the line above its body
                    let cond_line = if i == 0 { line } else { body.line() - 1 };
                    let truth = self
                        .eval(condition)
                        .map_err(|k| RunError::new(k, cond_line))?
                        .truthy();
                    if truth {
                        return self.exec(body);
                    }
                }
                if let Some(body) = else_body {
                    self.exec(body)?;
                }
            }
            Stmt::For {
                var,
                start,
                stop,
                step,
                body,
                ..
            } => {
                let step = step.unwrap_or(1);
                let mut i = *start;
                while i < *stop {
                    self.env.insert(var.clone(), Value::Int(i));
                    self.exec(body)?;
                    i = match i.checked_add(step) {
                        Some(next) => next,
                        None => break,
                    };
                }
            }
        }
        Ok(())
    }

    fn eval(&self, expr: &Expr) -> Result<Value, ErrorKind> {
        match expr {
            Expr::IntLit(i) => Ok(Value::Int(*i)),
            Expr::Var(name) => self
                .env
                .get(name)
                .copied()
                .ok_or(ErrorKind::UnboundVariable),
            Expr::Paren(inner) => self.eval(inner),
            Expr::Not(inner) => Ok(Value::Bool(!self.eval(inner)?.truthy())),
            // like python, yield the deciding operand rather than a bool
            Expr::Binary(BinOp::And, lhs, rhs) => {
                let a = self.eval(lhs)?;
                if a.truthy() {
                    self.eval(rhs)
                } else {
                    Ok(a)
                }
            }
            Expr::Binary(BinOp::Or, lhs, rhs) => {
                let a = self.eval(lhs)?;
                if a.truthy() {
                    Ok(a)
                } else {
                    self.eval(rhs)
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let (a, b) = (self.eval(lhs)?, self.eval(rhs)?);
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                        Value::arithmetic(*op, a, b)
                    }
                    _ => Ok(Value::compare(*op, a, b)),
                }
            }
        }
    }
}
