use std::cmp::Ordering;
use std::collections::HashMap;

use super::{AggFn, BinOp, Expr, ExprError, ExprType, Literal, UnOp};
use crate::data::{parse_temporal, ColumnType, DataTable, Schema, Value};
use crate::diag::Diagnostics;

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Number(f64),
    String(String),
    Temporal(i64),
    Bool(bool),
}

impl Scalar {
    /// Converts to a data value (booleans have no data representation).
    pub fn to_value(&self) -> Option<Value> {
        match self {
            Scalar::Number(n) => Some(Value::Number(*n)),
            Scalar::String(s) => Some(Value::String(s.clone())),
            Scalar::Temporal(t) => Some(Value::Temporal(*t)),
            Scalar::Bool(_) => None,
        }
    }
}

fn column_expr_type(t: ColumnType) -> ExprType {
    match t {
        ColumnType::Number => ExprType::Number,
        ColumnType::String => ExprType::String,
        ColumnType::Temporal => ExprType::Temporal,
    }
}

fn type_err(msg: String) -> ExprError {
    ExprError::Type(msg)
}

/// Checks field references and operand types, returning a copy in which
/// string literals compared against temporal operands are converted to
/// epoch milliseconds.
pub fn typecheck(e: &Expr, schema: &Schema) -> Result<(Expr, ExprType), ExprError> {
    match e {
        Expr::Lit(l) => Ok((
            e.clone(),
            match l {
                Literal::Number(_) => ExprType::Number,
                Literal::String(_) => ExprType::String,
                Literal::Bool(_) => ExprType::Bool,
                Literal::Temporal(_) => ExprType::Temporal,
            },
        )),
        Expr::Field(name) => {
            let t = schema.get(name).ok_or_else(|| ExprError::UnknownField(name.clone()))?;
            Ok((e.clone(), column_expr_type(t)))
        }
        Expr::Agg(agg, name) => {
            let t = schema.get(name).ok_or_else(|| ExprError::UnknownField(name.clone()))?;
            let out = match (agg, t) {
                (AggFn::Count, _) => ExprType::Number,
                (AggFn::Min | AggFn::Max, ColumnType::Number | ColumnType::Temporal) => column_expr_type(t),
                (AggFn::Mean | AggFn::Sum, ColumnType::Number) => ExprType::Number,
                _ => return Err(type_err(format!("{}() is not defined over {t} column `{name}`", agg.name()))),
            };
            Ok((e.clone(), out))
        }
        Expr::Unary(op, inner) => {
            let (ie, it) = typecheck(inner, schema)?;
            let want = match op {
                UnOp::Not => ExprType::Bool,
                UnOp::Neg => ExprType::Number,
            };
            if it != want {
                return Err(type_err(format!("unary operator expects {want}, found {it}")));
            }
            Ok((Expr::Unary(*op, Box::new(ie)), want))
        }
        Expr::Binary(op, l, r) => {
            let (mut le, lt) = typecheck(l, schema)?;
            let (mut re, rt) = typecheck(r, schema)?;
            let sym = op.symbol();
            if op.is_arithmetic() {
                if lt != ExprType::Number || rt != ExprType::Number {
                    return Err(type_err(format!("`{sym}` expects numbers, found {lt} and {rt}")));
                }
                return Ok((Expr::binary(*op, le, re), ExprType::Number));
            }
            if matches!(op, BinOp::And | BinOp::Or) {
                if lt != ExprType::Bool || rt != ExprType::Bool {
                    return Err(type_err(format!("`{sym}` expects booleans, found {lt} and {rt}")));
                }
                return Ok((Expr::binary(*op, le, re), ExprType::Bool));
            }
            // Comparison.
            let (lt, rt) = match (lt, rt) {
                (ExprType::Temporal, ExprType::String) => {
                    re = coerce_temporal(&re)?;
                    (lt, ExprType::Temporal)
                }
                (ExprType::String, ExprType::Temporal) => {
                    le = coerce_temporal(&le)?;
                    (ExprType::Temporal, rt)
                }
                other => other,
            };
            if lt != rt {
                return Err(type_err(format!("cannot compare {lt} with {rt} using `{sym}`")));
            }
            if lt == ExprType::Bool && !matches!(op, BinOp::Eq | BinOp::Ne) {
                return Err(type_err(format!("booleans are not ordered (`{sym}`)")));
            }
            Ok((Expr::binary(*op, le, re), ExprType::Bool))
        }
    }
}

fn coerce_temporal(e: &Expr) -> Result<Expr, ExprError> {
    match e {
        Expr::Lit(Literal::String(s)) => parse_temporal(s)
            .map(|t| Expr::Lit(Literal::Temporal(t)))
            .ok_or_else(|| type_err(format!("\"{s}\" is not an ISO-8601 timestamp"))),
        _ => Err(type_err("only string literals can be compared with temporal values".into())),
    }
}

/// Evaluation context: one table plus memoized aggregates.
struct Ctx<'a> {
    table: &'a DataTable,
    aggs: HashMap<(AggFn, String), Option<Scalar>>,
}

impl<'a> Ctx<'a> {
    fn new(table: &'a DataTable) -> Self {
        Self { table, aggs: HashMap::new() }
    }

    fn aggregate(&mut self, agg: AggFn, field: &str) -> Result<Scalar, ExprError> {
        let key = (agg, field.to_string());
        if !self.aggs.contains_key(&key) {
            let v = compute_aggregate(self.table, agg, field)?;
            self.aggs.insert(key.clone(), v);
        }
        self.aggs[&key].clone().ok_or_else(|| ExprError::NullOperand(format!("{}({field})", agg.name())))
    }

    fn eval(&mut self, e: &Expr, row: Option<usize>) -> Result<Scalar, ExprError> {
        match e {
            Expr::Lit(Literal::Number(n)) => Ok(Scalar::Number(*n)),
            Expr::Lit(Literal::String(s)) => Ok(Scalar::String(s.clone())),
            Expr::Lit(Literal::Bool(b)) => Ok(Scalar::Bool(*b)),
            Expr::Lit(Literal::Temporal(t)) => Ok(Scalar::Temporal(*t)),
            Expr::Field(name) => {
                let Some(row) = row else {
                    return Err(type_err(format!("`datum.{name}` is not available outside a row context")));
                };
                let ci = self.table.column_index(name).ok_or_else(|| ExprError::UnknownField(name.clone()))?;
                match self.table.value(row, ci) {
                    Value::Number(n) => Ok(Scalar::Number(*n)),
                    Value::String(s) => Ok(Scalar::String(s.clone())),
                    Value::Temporal(t) => Ok(Scalar::Temporal(*t)),
                    Value::Null => Err(ExprError::NullOperand(name.clone())),
                }
            }
            Expr::Agg(agg, name) => self.aggregate(*agg, name),
            Expr::Unary(UnOp::Not, inner) => match self.eval(inner, row)? {
                Scalar::Bool(b) => Ok(Scalar::Bool(!b)),
                other => Err(type_err(format!("`!` applied to {other:?}"))),
            },
            Expr::Unary(UnOp::Neg, inner) => match self.eval(inner, row)? {
                Scalar::Number(n) => Ok(Scalar::Number(-n)),
                other => Err(type_err(format!("`-` applied to {other:?}"))),
            },
            Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
                let lv = self.bool_of(l, row)?;
                // Short-circuit: the right side is not evaluated when decided.
                match (op, lv) {
                    (BinOp::And, false) => Ok(Scalar::Bool(false)),
                    (BinOp::Or, true) => Ok(Scalar::Bool(true)),
                    _ => Ok(Scalar::Bool(self.bool_of(r, row)?)),
                }
            }
            Expr::Binary(op, l, r) => {
                let lv = self.eval(l, row)?;
                let rv = self.eval(r, row)?;
                if op.is_arithmetic() {
                    let (Scalar::Number(a), Scalar::Number(b)) = (&lv, &rv) else {
                        return Err(type_err(format!("arithmetic on {lv:?} and {rv:?}")));
                    };
                    let out = match op {
                        BinOp::Add => a + b,
                        BinOp::Sub => a - b,
                        BinOp::Mul => a * b,
                        BinOp::Div => {
                            if *b == 0.0 {
                                return Err(ExprError::DivisionByZero);
                            }
                            a / b
                        }
                        _ => unreachable!(),
                    };
                    if !out.is_finite() {
                        return Err(ExprError::NonFinite);
                    }
                    return Ok(Scalar::Number(out));
                }
                let ord = compare(&lv, &rv)?;
                let res = match op {
                    BinOp::Lt => ord == Ordering::Less,
                    BinOp::Le => ord != Ordering::Greater,
                    BinOp::Gt => ord == Ordering::Greater,
                    BinOp::Ge => ord != Ordering::Less,
                    BinOp::Eq => ord == Ordering::Equal,
                    BinOp::Ne => ord != Ordering::Equal,
                    _ => unreachable!(),
                };
                Ok(Scalar::Bool(res))
            }
        }
    }

    fn bool_of(&mut self, e: &Expr, row: Option<usize>) -> Result<bool, ExprError> {
        match self.eval(e, row)? {
            Scalar::Bool(b) => Ok(b),
            other => Err(type_err(format!("expected a boolean, found {other:?}"))),
        }
    }
}

fn compare(a: &Scalar, b: &Scalar) -> Result<Ordering, ExprError> {
    Ok(match (a, b) {
        (Scalar::Number(x), Scalar::Number(y)) => x.partial_cmp(y).expect("finite numbers"),
        (Scalar::String(x), Scalar::String(y)) => x.cmp(y),
        (Scalar::Temporal(x), Scalar::Temporal(y)) => x.cmp(y),
        (Scalar::Bool(x), Scalar::Bool(y)) => x.cmp(y),
        _ => return Err(type_err(format!("cannot compare {a:?} with {b:?}"))),
    })
}

/// Null-skipping aggregate over a whole column. `None` when there is no
/// value to aggregate (min/max/mean of an all-null column).
fn compute_aggregate(table: &DataTable, agg: AggFn, field: &str) -> Result<Option<Scalar>, ExprError> {
    let ci = table.column_index(field).ok_or_else(|| ExprError::UnknownField(field.to_string()))?;
    let ty = table.columns()[ci].ty;
    let vals = table.column_values(ci).filter(|v| !v.is_null());
    Ok(match agg {
        AggFn::Count => Some(Scalar::Number(vals.count() as f64)),
        AggFn::Sum => {
            let s: f64 = vals.filter_map(Value::as_f64).sum();
            if !s.is_finite() {
                return Err(ExprError::NonFinite);
            }
            Some(Scalar::Number(s))
        }
        AggFn::Mean => {
            let xs: Vec<f64> = vals.filter_map(Value::as_f64).collect();
            if xs.is_empty() {
                None
            } else {
                let m = xs.iter().sum::<f64>() / xs.len() as f64;
                if !m.is_finite() {
                    return Err(ExprError::NonFinite);
                }
                Some(Scalar::Number(m))
            }
        }
        AggFn::Min | AggFn::Max => {
            let pick = |a: f64, b: f64| if agg == AggFn::Min { a.min(b) } else { a.max(b) };
            let best = vals.filter_map(Value::as_f64).reduce(pick);
            best.map(|b| match ty {
                ColumnType::Temporal => Scalar::Temporal(b as i64),
                _ => Scalar::Number(b),
            })
        }
    })
}

/// Evaluates `e` for one row. Aggregates range over the whole table.
pub fn eval_row(e: &Expr, row: usize, table: &DataTable) -> Result<Scalar, ExprError> {
    Ctx::new(table).eval(e, Some(row))
}

/// Evaluates a row-independent expression (literals and aggregates).
pub fn eval_constant(e: &Expr, table: &DataTable) -> Result<Scalar, ExprError> {
    if e.references_row() {
        return Err(type_err("expression refers to `datum` but no row is in scope".into()));
    }
    Ctx::new(table).eval(e, None)
}

/// Ascending indices of rows for which the boolean expression holds. Rows
/// whose evaluation fails (null operand, division by zero, overflow) are
/// skipped and reported in one `RowsSkipped` warning.
pub fn select_rows(e: &Expr, table: &DataTable, diags: &mut Diagnostics) -> Result<Vec<usize>, ExprError> {
    let (e, ty) = typecheck(e, &table.schema())?;
    if ty != ExprType::Bool {
        return Err(type_err(format!("selection expression must be boolean, found {ty}")));
    }
    let mut ctx = Ctx::new(table);
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for r in 0..table.row_count() {
        match ctx.eval(&e, Some(r)) {
            Ok(Scalar::Bool(true)) => out.push(r),
            Ok(_) => {}
            Err(err) if err.is_row_error() => skipped.push((r, err)),
            Err(err) => return Err(err),
        }
    }
    if !skipped.is_empty() {
        let list: Vec<String> = skipped.iter().take(5).map(|(r, e)| format!("row {r}: {e}")).collect();
        diags.warn(
            "RowsSkipped",
            "",
            format!("{} row(s) excluded from `{e}` ({})", skipped.len(), list.join("; ")),
        );
    }
    Ok(out)
}
