use super::*;
use crate::chart::{ChartSpec, EncodingType};
use crate::data::{parse_temporal, ColumnType, Schema};
use crate::expr::{typecheck, ExprType, Literal};

type Result<T> = std::result::Result<T, SpecError>;

fn expr_err(path: String, source: ExprError) -> SpecError {
    SpecError::Expr { path, source }
}

fn type_err(path: String, msg: impl Into<String>) -> SpecError {
    expr_err(path, ExprError::Type(msg.into()))
}

fn check(e: &Expr, schema: &Schema, path: &str, want: ExprType) -> Result<Expr> {
    let (typed, ty) = typecheck(e, schema).map_err(|s| expr_err(path.to_string(), s))?;
    if ty == want {
        return Ok(typed);
    }
    // A bare date string stands for a temporal value.
    if let (ExprType::Temporal, Expr::Lit(Literal::String(s))) = (want, &typed) {
        if let Some(t) = parse_temporal(s) {
            return Ok(Expr::Lit(Literal::Temporal(t)));
        }
    }
    Err(type_err(path.to_string(), format!("expected a {want} expression, found {ty}")))
}

fn column_type(t: ColumnType) -> ExprType {
    match t {
        ColumnType::Number => ExprType::Number,
        ColumnType::String => ExprType::String,
        ColumnType::Temporal => ExprType::Temporal,
    }
}

/// Value type of the field encoded on `axis`.
fn axis_type(chart: &ChartSpec, schema: &Schema, axis: AxisName) -> Result<ExprType> {
    let enc = match axis {
        AxisName::X => &chart.x,
        AxisName::Y => &chart.y,
    };
    let col = schema.get(&enc.field).ok_or_else(|| {
        SpecError::Chart(ChartError::UnknownField {
            channel: match axis {
                AxisName::X => crate::chart::Channel::X,
                AxisName::Y => crate::chart::Channel::Y,
            },
            field: enc.field.clone(),
        })
    })?;
    Ok(match (enc.ty, col) {
        (EncodingType::Temporal, _) => ExprType::Temporal,
        (_, c) => column_type(c),
    })
}

fn constant(e: Expr, path: &str) -> Result<Expr> {
    if e.references_row() {
        return Err(type_err(path.to_string(), "an indicator value cannot reference datum fields"));
    }
    Ok(e)
}

/// Type-checks every expression in `spec` against the data schema and
/// returns a copy with typed expressions (temporal literals resolved).
pub fn bind(spec: &Spec, schema: &Schema) -> Result<Spec> {
    let mut out = spec.clone();
    for (ri, root) in out.annotations.iter_mut().enumerate() {
        let rp = format!("/annotations/{ri}");
        for (ti, t) in root.targets.iter_mut().enumerate() {
            let tp = format!("{rp}/targets/{ti}");
            match t {
                Target::DataPoint(DataSelector::Expr(e)) => {
                    *e = check(e, schema, &format!("{tp}/dataPoint/expr"), ExprType::Bool)?;
                }
                Target::Axis { axis, range: Some(AxisRange::Expr(e)), .. } => {
                    let vt = axis_type(&spec.chart, schema, *axis)?;
                    let col = match vt {
                        ExprType::Number => ColumnType::Number,
                        ExprType::Temporal => ColumnType::Temporal,
                        _ => ColumnType::String,
                    };
                    let tick_schema = Schema::new([("value".to_string(), col)]);
                    *e = check(e, &tick_schema, &format!("{tp}/axis/range"), ExprType::Bool)?;
                }
                _ => {}
            }
        }
        if let Some(ind) = &mut root.indicator {
            let ip = format!("{rp}/indicator/expr");
            let vt = axis_type(&spec.chart, schema, ind.body.axis)?;
            if ind.body.kind != IndicatorKind::Area && vt == ExprType::String {
                return Err(type_err(ip, "indicator levels need a continuous axis"));
            }
            ind.body.expr = match &ind.body.expr {
                IndicatorExpr::Single(e) if ind.body.kind == IndicatorKind::Area => {
                    IndicatorExpr::Single(check(e, schema, &ip, ExprType::Bool)?)
                }
                IndicatorExpr::Single(e) => IndicatorExpr::Single(constant(check(e, schema, &ip, vt)?, &ip)?),
                IndicatorExpr::Interval(a, b) => {
                    let (pa, pb) = (format!("{ip}/0"), format!("{ip}/1"));
                    IndicatorExpr::Interval(
                        constant(check(a, schema, &pa, vt)?, &pa)?,
                        constant(check(b, schema, &pb, vt)?, &pb)?,
                    )
                }
            };
        }
    }
    Ok(out)
}
