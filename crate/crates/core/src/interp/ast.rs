#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
    Eq,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    IntLit(i64),
    Var(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Paren(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }
}

/// A statement; `line` is where it starts (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign {
        target: String,
        value: Expr,
        line: usize,
    },
    Print {
        value: Expr,
        line: usize,
    },
    /// `if`/`elif` arms in order, then the optional `else` body.
    If {
        arms: Vec<(Expr, Stmt)>,
        else_body: Option<Box<Stmt>>,
        line: usize,
    },
    /// `for var in range(start, stop[, step])`. Range arguments are integer
    /// literals and `step` is positive.
    For {
        var: String,
        start: i64,
        stop: i64,
        step: Option<i64>,
        body: Box<Stmt>,
        line: usize,
    },
}

impl Stmt {
    pub fn line(&self) -> usize {
        match self {
            Stmt::Assign { line, .. }
            | Stmt::Print { line, .. }
            | Stmt::If { line, .. }
            | Stmt::For { line, .. } => *line,
        }
    }
}
