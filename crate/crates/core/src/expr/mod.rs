//! Expression language for data-point selection, axis ranges and indicator
//! levels.
//!
//! ```text
//! datum.temp > 30 && datum.city == "Oslo"
//! datum.t == max(t)
//! mean(price) + 2 * 10
//! ```
//!
//! Precedence, tightest first: unary `!`/`-`, `* /`, `+ -`, comparisons
//! (non-associative), `&&`, `||`. Aggregates (`min`, `max`, `mean`, `sum`,
//! `count`) take a bare column name and range over the whole table,
//! skipping nulls.

mod eval;
mod parse;

use std::fmt;

use thiserror::Error;

pub use eval::{eval_constant, eval_row, select_rows, typecheck, Scalar};
pub use parse::parse;

use crate::data::{format_temporal, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFn {
    Min,
    Max,
    Mean,
    Sum,
    Count,
}

impl AggFn {
    pub fn name(self) -> &'static str {
        match self {
            AggFn::Min => "min",
            AggFn::Max => "max",
            AggFn::Mean => "mean",
            AggFn::Sum => "sum",
            AggFn::Count => "count",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "min" => AggFn::Min,
            "max" => AggFn::Max,
            "mean" => AggFn::Mean,
            "sum" => AggFn::Sum,
            "count" => AggFn::Count,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Number(f64),
    String(String),
    Bool(bool),
    /// Only produced by type checking, from a string literal compared
    /// against a temporal operand.
    Temporal(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal),
    Field(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Agg(AggFn, String),
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// True when the expression reads a row field.
    pub fn references_row(&self) -> bool {
        match self {
            Expr::Field(_) => true,
            Expr::Lit(_) | Expr::Agg(..) => false,
            Expr::Unary(_, e) => e.references_row(),
            Expr::Binary(_, l, r) => l.references_row() || r.references_row(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprType {
    Number,
    String,
    Temporal,
    Bool,
}

impl fmt::Display for ExprType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExprType::Number => "number",
            ExprType::String => "string",
            ExprType::Temporal => "temporal",
            ExprType::Bool => "boolean",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("null operand in field `{0}`")]
    NullOperand(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite arithmetic result")]
    NonFinite,
}

impl ExprError {
    pub fn code(&self) -> &'static str {
        match self {
            ExprError::Syntax { .. } => "SyntaxError",
            ExprError::Type(_) => "TypeError",
            ExprError::UnknownField(_) => "UnknownField",
            ExprError::NullOperand(_) => "NullOperand",
            ExprError::DivisionByZero => "DivisionByZero",
            ExprError::NonFinite => "NonFinite",
        }
    }

    /// Row-level evaluation failures; callers skip the row.
    pub fn is_row_error(&self) -> bool {
        matches!(self, ExprError::NullOperand(_) | ExprError::DivisionByZero | ExprError::NonFinite)
    }
}

/// Parses and type-checks `src` against a table schema.
pub fn parse_expr(src: &str, schema: &Schema) -> Result<Expr, ExprError> {
    let e = parse(src)?;
    Ok(typecheck(&e, schema)?.0)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "true" | "false" | "datum")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Fully parenthesized source form; parsing it yields an identical AST.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(Literal::Number(n)) => write!(f, "{}", crate::data::format_number(*n)),
            Expr::Lit(Literal::String(s)) => f.write_str(&quote(s)),
            Expr::Lit(Literal::Bool(b)) => write!(f, "{b}"),
            Expr::Lit(Literal::Temporal(t)) => f.write_str(&quote(&format_temporal(*t))),
            Expr::Field(name) if is_ident(name) => write!(f, "datum.{name}"),
            Expr::Field(name) => write!(f, "datum[{}]", quote(name)),
            Expr::Unary(UnOp::Not, e) => write!(f, "!({e})"),
            Expr::Unary(UnOp::Neg, e) => write!(f, "-({e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Agg(a, name) if is_ident(name) => write!(f, "{}({name})", a.name()),
            Expr::Agg(a, name) => write!(f, "{}({})", a.name(), quote(name)),
        }
    }
}

#[cfg(test)]
mod tests;
