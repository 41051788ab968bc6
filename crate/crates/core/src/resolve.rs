//! Binds annotation targets to scene nodes.

use thiserror::Error;

use crate::chart::{ChartError, Coord, Scale, ScaleKind, Scales};
use crate::data::{Column, ColumnType, DataTable, Value};
use crate::diag::Diagnostics;
use crate::expr::{select_rows, ExprError};
use crate::geom::{Point, Rect};
use crate::scene::{ChartPartKind, SceneGraph, SemanticTag};
use crate::spec::{Anchor2D, AxisRange, DataSelector, FixedPos, Space, Target};

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTarget {
    pub source: Target,
    /// Matched scene node ids with their boxes, in scene order.
    pub nodes: Vec<(String, Rect)>,
    pub union_bbox: Rect,
}

impl ResolvedTarget {
    pub fn new(source: Target, nodes: Vec<(String, Rect)>) -> Option<Self> {
        let union_bbox = Rect::union_all(nodes.iter().map(|n| &n.1))?;
        Some(ResolvedTarget { source, nodes, union_bbox })
    }

    /// One of the nine box anchors; `Auto` is the center.
    pub fn anchor_point(&self, a: Anchor2D) -> Point {
        anchor_point(&self.union_bbox, a)
    }

    pub fn is_none(&self) -> bool {
        self.source == Target::None
    }
}

pub fn anchor_point(r: &Rect, a: Anchor2D) -> Point {
    let (dx, dy) = a.direction();
    let c = r.center();
    Point::new(c.x + f64::from(dx) * r.w / 2.0, c.y + f64::from(dy) * r.h / 2.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error("target matched no chart element: {0}")]
    TargetEmpty(String),
    #[error("chart has no {} to target", .0.name())]
    MissingChartPart(ChartPartKind),
    #[error("{0}")]
    DomainMiss(String),
    #[error("{0}")]
    Expr(ExprError),
}

impl ResolveError {
    pub fn code(&self) -> &'static str {
        match self {
            ResolveError::TargetEmpty(_) => "TargetEmpty",
            ResolveError::MissingChartPart(_) => "MissingChartPart",
            ResolveError::DomainMiss(_) => "DomainMiss",
            ResolveError::Expr(e) => e.code(),
        }
    }
}

fn coord_px(scale: &Scale, c: &Coord, axis: &str) -> Result<f64, ResolveError> {
    let v = scale
        .coord_value(c)
        .ok_or_else(|| ResolveError::DomainMiss(format!("{axis} coordinate {c:?} does not fit the {axis} scale")))?;
    if !scale.in_domain(&v) {
        return Err(ResolveError::DomainMiss(format!("{axis} value {} is outside the scale domain", v.display())));
    }
    scale.apply(&v).map_err(|e: ChartError| ResolveError::DomainMiss(e.to_string()))
}

/// Maps a fixed position to canvas pixels. Pixel coordinates are relative
/// to the plot-area origin.
pub fn map_fixed(fp: &FixedPos, scales: &Scales, plot: Rect) -> Result<Point, ResolveError> {
    match fp.space {
        Space::Pixel => {
            let n = |c: &Coord| match c {
                Coord::Number(n) => *n,
                Coord::String(_) => 0.0,
            };
            Ok(Point::new(plot.x + n(&fp.x), plot.y + n(&fp.y)))
        }
        Space::Data => Ok(Point::new(coord_px(&scales.x, &fp.x, "x")?, coord_px(&scales.y, &fp.y, "y")?)),
    }
}

fn sort_key(scale: &Scale, v: &Value) -> Option<f64> {
    match scale.kind {
        ScaleKind::Band | ScaleKind::PointOrdinal => scale.category_index(v).map(|i| i as f64),
        _ => v.as_f64(),
    }
}

fn range_filter(
    range: &AxisRange,
    scale: &Scale,
    values: &[Option<Value>],
) -> Result<Vec<bool>, ResolveError> {
    match range {
        AxisRange::Interval(a, b) => {
            let key = |c: &Coord| {
                scale
                    .coord_value(c)
                    .and_then(|v| sort_key(scale, &v))
                    .ok_or_else(|| ResolveError::DomainMiss(format!("axis range bound {c:?} does not fit the scale")))
            };
            let (ka, kb) = (key(a)?, key(b)?);
            let (lo, hi) = (ka.min(kb), ka.max(kb));
            Ok(values
                .iter()
                .map(|v| v.as_ref().and_then(|v| sort_key(scale, v)).is_some_and(|k| k >= lo - 1e-9 && k <= hi + 1e-9))
                .collect())
        }
        AxisRange::Expr(e) => {
            let ty = match scale.kind {
                ScaleKind::Linear => ColumnType::Number,
                ScaleKind::Time => ColumnType::Temporal,
                _ => match scale.categories().first() {
                    Some(Value::Number(_)) => ColumnType::Number,
                    _ => ColumnType::String,
                },
            };
            let rows = values.iter().map(|v| vec![v.clone().unwrap_or(Value::Null)]).collect();
            let table = DataTable::new(vec![Column { name: "value".into(), ty }], rows)
                .map_err(|e| ResolveError::TargetEmpty(e.to_string()))?;
            // Null rows are parts without a value (the axis title), so their
            // skip warning is dropped.
            let keep = select_rows(e, &table, &mut Diagnostics::new()).map_err(ResolveError::Expr)?;
            Ok((0..values.len()).map(|i| keep.contains(&i)).collect())
        }
    }
}

/// Resolves a concrete target. `ById` targets return `Ok(None)`; they bind
/// to effect geometry during assembly.
pub fn resolve_target(
    t: &Target,
    scene: &SceneGraph,
    data: &DataTable,
    scales: &Scales,
    diags: &mut Diagnostics,
    path: &str,
) -> Result<Option<ResolvedTarget>, ResolveError> {
    let nodes: Vec<(String, Rect)> = match t {
        Target::ById(_) => return Ok(None),
        Target::None => vec![("plot".into(), scene.plot)],
        Target::Fixed(fp) => {
            let p = map_fixed(fp, scales, scene.plot)?;
            vec![("fixed".into(), Rect::at_point(p))]
        }
        Target::ChartPart(part) => {
            let n = scene.chart_part(*part).ok_or(ResolveError::MissingChartPart(*part))?;
            vec![(n.id.clone(), n.bbox)]
        }
        Target::DataPoint(sel) => {
            let rows = match sel {
                DataSelector::Indices(ix) => {
                    for &i in ix {
                        if i >= data.row_count() {
                            diags.warn(
                                "IndexOutOfRange",
                                path,
                                format!("row {i} does not exist; the table has {} rows", data.row_count()),
                            );
                        }
                    }
                    ix.clone()
                }
                DataSelector::Expr(e) => select_rows(e, data, diags).map_err(ResolveError::Expr)?,
            };
            let mut out = Vec::new();
            for r in rows {
                match scene.mark_for_row(r) {
                    Some(n) => out.push((n.id.clone(), n.bbox)),
                    None if r < data.row_count() => {
                        diags.warn("RowWithoutMark", path, format!("row {r} was dropped from the chart"))
                    }
                    None => {}
                }
            }
            out
        }
        Target::Axis { axis, parts, range } => {
            let scale = match axis {
                crate::scene::AxisName::X => &scales.x,
                crate::scene::AxisName::Y => &scales.y,
            };
            let candidates: Vec<_> = scene
                .nodes()
                .into_iter()
                .filter(|n| {
                    matches!(&n.tag, SemanticTag::AxisPart { axis: a, part, .. } if a == axis && parts.contains(part))
                })
                .collect();
            let keep = match range {
                None => vec![true; candidates.len()],
                Some(r) => {
                    let values: Vec<Option<Value>> = candidates
                        .iter()
                        .map(|n| match &n.tag {
                            SemanticTag::AxisPart { value, .. } => value.clone(),
                            _ => None,
                        })
                        .collect();
                    range_filter(r, scale, &values)?
                }
            };
            candidates.into_iter().zip(keep).filter(|(_, k)| *k).map(|(n, _)| (n.id.clone(), n.bbox)).collect()
        }
    };
    ResolvedTarget::new(t.clone(), nodes)
        .map(Some)
        .ok_or_else(|| ResolveError::TargetEmpty(describe(t)))
}

fn describe(t: &Target) -> String {
    match t {
        Target::DataPoint(DataSelector::Expr(e)) => format!("expression {e} selects no plotted row"),
        Target::DataPoint(DataSelector::Indices(ix)) => format!("indices {ix:?} select no plotted row"),
        Target::Axis { axis, .. } => format!("no {} axis parts in range", axis.name()),
        _ => "no nodes".into(),
    }
}
