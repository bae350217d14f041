//! The embedding description language.
//!
//! ```text
//! embedding "unit-sphere" {
//!   chart theta in (0.1, 3.04), phi in (-3.1, 3.1);
//!   ambient signature (+, +, +);
//!   map sin(theta)*cos(phi); sin(theta)*sin(phi); cos(theta);
//! }
//! ```
//!
//! Comments run from `#` to the end of the line. Expressions support
//! `+ - * / ^`, unary minus, numeric literals, the declared chart variables
//! and the functions `sin cos sinh cosh exp log sqrt`. Exponents must be
//! numeric constants.

mod eval;
mod lexer;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

pub use eval::{eval_ast, jet_eval, EvalError, EvalErrorKind};
pub use parser::{parse_embedding, parse_embedding_bytes, parse_expression};

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Line/column (both 1-based) of a byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn locate(source: &str, offset: usize) -> Position {
        let offset = offset.min(source.len());
        let before = &source.as_bytes()[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
        Position { offset, line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: Position, message: String },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("unknown identifier `{name}` at {position}")]
    UnknownIdentifier { name: String, position: Position },
    #[error("domain error for `{variable}`: {message}")]
    Domain { variable: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
}

impl Function {
    pub const ALL: [Function; 7] =
        [Function::Sin, Function::Cos, Function::Sinh, Function::Cosh, Function::Exp, Function::Log, Function::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Sinh => "sinh",
            Function::Cosh => "cosh",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Const(f64),
    /// Index into the chart variables.
    Var(usize),
    Neg(Box<Expr>),
    Call(Function, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
}

/// Expression node. Equality compares structure only; spans are ignored.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match &self.kind {
            ExprKind::Const(_) => None,
            ExprKind::Var(i) => Some(*i),
            ExprKind::Neg(e) | ExprKind::Call(_, e) | ExprKind::Pow(e, _) => e.max_var(),
            ExprKind::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }
}

/// Diagonal flat metric `η = diag(signs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    signs: Vec<i8>,
}

impl Signature {
    pub fn new(signs: Vec<i8>) -> Result<Signature, ParseError> {
        if signs.is_empty() {
            return Err(ParseError::Dimension("signature must have at least one entry".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(ParseError::Dimension(format!("signature entry {bad} is not ±1")));
        }
        Ok(Signature { signs })
    }

    pub fn euclidean(dim: usize) -> Signature {
        Signature { signs: vec![1; dim] }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `η_μμ` as a float.
    pub fn eta(&self, mu: usize) -> f64 {
        f64::from(self.signs[mu])
    }

    /// Number of `+1` entries.
    pub fn p(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    /// Number of `-1` entries.
    pub fn q(&self) -> usize {
        self.signs.len() - self.p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A parsed and validated embedding `Y: chart box → (R^D, η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMap {
    pub name: String,
    pub variables: Vec<String>,
    pub domain: Vec<Interval>,
    pub signature: Signature,
    pub components: Vec<Expr>,
}

impl EmbeddingMap {
    /// Chart dimension `n`.
    pub fn n(&self) -> usize {
        self.variables.len()
    }

    /// Ambient dimension `D`.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn codimension(&self) -> usize {
        self.dim() - self.n()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.n() && self.domain.iter().zip(point).all(|(iv, &x)| iv.contains_open(x))
    }
}
