//! Pixel-space scene graph compiled from a chart and its data.
//!
//! Every node carries a semantic tag and a bounding box that tightly
//! covers its own geometry and its children. Node ids are stable:
//! `mark/<row>`, `series/<i>`, `axis/x/tick/<i>`, `axis/y/grid/<i>`,
//! `chart/title`, `chart/legend/label/<i>` and so on.

pub mod metrics;

use serde::Serialize;

use crate::chart::{time_interval, 
    surviving_rows, tick_count, tick_step, target_ticks, BarOrientation, Channel, ChartError, ChartSpec, Mark,
    Scale, ScaleKind, Scales,
};
use crate::data::{format_number, DataTable, Value};
use crate::diag::Diagnostics;
use crate::geom::{Point, Rect};

pub use metrics::measure_text;

pub const PALETTE: [&str; 10] = [
    "#4c78a8", "#f58518", "#e45756", "#72b7b2", "#54a24b", "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
];
pub const POINT_RADIUS: f64 = 3.0;
/// Side of the invisible per-vertex hit box for line and area marks.
pub const VERTEX_BOX: f64 = 6.0;
pub const TICK_LENGTH: f64 = 5.0;
pub const TICK_LABEL_SIZE: f64 = 10.0;
pub const AXIS_LABEL_SIZE: f64 = 11.0;
pub const TITLE_SIZE: f64 = 14.0;
pub const SUBTITLE_SIZE: f64 = 11.0;
pub const CAPTION_SIZE: f64 = 10.0;
/// Width of bars placed on a continuous position axis.
pub const CONTINUOUS_BAR_WIDTH: f64 = 8.0;

/// Color index, color, and (vertex, row) pairs of one line or area series.
type Series = (usize, &'static str, Vec<(Point, usize)>);

const AXIS_COLOR: &str = "#888888";
const GRID_COLOR: &str = "#e0e0e0";
const TEXT_COLOR: &str = "#333333";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    X,
    Y,
}

impl AxisName {
    pub fn name(self) -> &'static str {
        match self {
            AxisName::X => "x",
            AxisName::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisPartKind {
    Label,
    Tick,
    Grid,
    TickLabel,
}

impl AxisPartKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisPartKind::Label => "label",
            AxisPartKind::Tick => "tick",
            AxisPartKind::Grid => "grid",
            AxisPartKind::TickLabel => "tick-label",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "label" => AxisPartKind::Label,
            "tick" => AxisPartKind::Tick,
            "grid" => AxisPartKind::Grid,
            "tick-label" => AxisPartKind::TickLabel,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartPartKind {
    Title,
    Legend,
    Subtitle,
    Caption,
}

impl ChartPartKind {
    pub fn name(self) -> &'static str {
        match self {
            ChartPartKind::Title => "title",
            ChartPartKind::Legend => "legend",
            ChartPartKind::Subtitle => "subtitle",
            ChartPartKind::Caption => "caption",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "title" => ChartPartKind::Title,
            "legend" => ChartPartKind::Legend,
            "subtitle" => ChartPartKind::Subtitle,
            "caption" => ChartPartKind::Caption,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SemanticTag {
    /// Structural container without its own meaning.
    Group,
    PlotArea,
    Mark { row_index: usize },
    /// A line or area path joining several rows.
    Series,
    AxisPart {
        axis: AxisName,
        part: AxisPartKind,
        value: Option<Value>,
    },
    ChartPart { part: ChartPartKind },
    AnnotationNode { id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TextAnchor {
    Start,
    Middle,
    End,
}

impl TextAnchor {
    pub fn name(self) -> &'static str {
        match self {
            TextAnchor::Start => "start",
            TextAnchor::Middle => "middle",
            TextAnchor::End => "end",
        }
    }
}

/// A single line of text positioned at its anchor point on the baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextRun {
    pub x: f64,
    pub y: f64,
    pub content: String,
    pub size: f64,
    pub bold: bool,
    pub anchor: TextAnchor,
    /// Rotation in degrees about `(x, y)`; only -90 is produced.
    pub rotate: Option<f64>,
}

impl TextRun {
    /// Box from top of the em square to the descender line (0.2 × size
    /// below the baseline).
    pub fn bbox(&self) -> Rect {
        let (w, h) = measure_text(&self.content, self.size);
        let left = match self.anchor {
            TextAnchor::Start => self.x,
            TextAnchor::Middle => self.x - w / 2.0,
            TextAnchor::End => self.x - w,
        };
        let upright = Rect::new(left, self.y - self.size, w, h);
        match self.rotate {
            Some(r) if (r + 90.0).abs() < 1e-9 => {
                // (x+dx, y+dy) maps to (x+dy, y-dx) under a -90° turn.
                Rect::new(
                    self.x + (upright.y - self.y),
                    self.y - (upright.right() - self.x),
                    upright.h,
                    upright.w,
                )
            }
            _ => upright,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Geometry {
    None,
    Rect { rect: Rect },
    Circle { cx: f64, cy: f64, r: f64 },
    Line { from: Point, to: Point },
    Polyline { points: Vec<Point> },
    /// Closed polygon (area marks).
    Path { points: Vec<Point> },
    Text { run: TextRun },
}

impl Geometry {
    pub fn bbox(&self) -> Option<Rect> {
        match self {
            Geometry::None => None,
            Geometry::Rect { rect } => Some(*rect),
            Geometry::Circle { cx, cy, r } => Some(Rect::new(cx - r, cy - r, 2.0 * r, 2.0 * r)),
            Geometry::Line { from, to } => Some(Rect::from_corners(*from, *to)),
            Geometry::Polyline { points } | Geometry::Path { points } => points_bbox(points),
            Geometry::Text { run } => Some(run.bbox()),
        }
    }
}

pub(crate) fn points_bbox(points: &[Point]) -> Option<Rect> {
    let first = points.first()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    Some(Rect::new(x0, y0, x1 - x0, y1 - y0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeStyle {
    pub fill: Option<String>,
    pub stroke: Option<String>,
    pub stroke_width: f64,
    pub opacity: f64,
    pub visible: bool,
}

impl NodeStyle {
    fn fill(color: &str) -> Self {
        Self { fill: Some(color.into()), stroke: None, stroke_width: 0.0, opacity: 1.0, visible: true }
    }

    fn stroke(color: &str, width: f64) -> Self {
        Self { fill: None, stroke: Some(color.into()), stroke_width: width, opacity: 1.0, visible: true }
    }

    fn hidden() -> Self {
        Self { fill: None, stroke: None, stroke_width: 0.0, opacity: 1.0, visible: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneNode {
    pub id: String,
    pub tag: SemanticTag,
    pub bbox: Rect,
    pub geometry: Geometry,
    pub style: NodeStyle,
    pub children: Vec<SceneNode>,
}

impl SceneNode {
    /// Leaf node; bbox comes from the geometry.
    pub fn leaf(id: impl Into<String>, tag: SemanticTag, geometry: Geometry, style: NodeStyle) -> Self {
        let bbox = geometry.bbox().unwrap_or_default();
        Self { id: id.into(), tag, bbox, geometry, style, children: Vec::new() }
    }

    /// Node whose bbox covers its geometry and all children. `None` when
    /// there is nothing to cover.
    pub fn with_children(
        id: impl Into<String>,
        tag: SemanticTag,
        geometry: Geometry,
        style: NodeStyle,
        children: Vec<SceneNode>,
    ) -> Option<Self> {
        let own = geometry.bbox();
        let bbox = own.iter().chain(children.iter().map(|c| &c.bbox)).fold(None, |acc: Option<Rect>, r| {
            Some(acc.map_or(*r, |a| a.union(r)))
        })?;
        Some(Self { id: id.into(), tag, bbox, geometry, style, children })
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&SceneNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneGraph {
    pub width: f64,
    pub height: f64,
    pub plot: Rect,
    /// Rows that produced marks, ascending.
    pub mark_rows: Vec<usize>,
    pub root: SceneNode,
}

impl SceneGraph {
    pub fn nodes(&self) -> Vec<&SceneNode> {
        self.root.walk()
    }

    pub fn canvas(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    pub fn find(&self, id: &str) -> Option<&SceneNode> {
        self.nodes().into_iter().find(|n| n.id == id)
    }

    pub fn mark_for_row(&self, row: usize) -> Option<&SceneNode> {
        self.nodes()
            .into_iter()
            .find(|n| matches!(n.tag, SemanticTag::Mark { row_index } if row_index == row))
    }

    pub fn chart_part(&self, part: ChartPartKind) -> Option<&SceneNode> {
        let id = format!("chart/{}", part.name());
        self.nodes().into_iter().find(|n| n.id == id)
    }

    pub fn axis_parts(&self, axis: AxisName, part: AxisPartKind) -> Vec<&SceneNode> {
        self.nodes()
            .into_iter()
            .filter(|n| matches!(&n.tag, SemanticTag::AxisPart { axis: a, part: p, .. } if *a == axis && *p == part))
            .collect()
    }

    /// Debug JSON dump (`--dump-scene`).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}

/// Ticks for a scale: nice {1,2,5}×10^k steps for linear scales, calendar
/// boundaries for time scales, one
/// tick per category (at its center) for band and point scales.
pub fn tick_positions(scale: &Scale, target_count: usize) -> Vec<(Value, f64)> {
    match scale.kind {
        ScaleKind::Time => {
            let (min, max) = scale.continuous_domain().expect("continuous");
            time_interval(min as i64, max as i64, target_count.max(2))
                .ticks(min as i64, max as i64)
                .into_iter()
                .map(|t| {
                    let value = Value::Temporal(t);
                    let px = scale.apply(&value).expect("tick in scale type");
                    (value, px)
                })
                .collect()
        }
        ScaleKind::Linear => {
            let (min, max) = scale.continuous_domain().expect("continuous");
            let step = tick_step(min, max, target_count.max(2));
            let decimals = step_decimals(step);
            let first = (min / step - 1e-9).ceil() as i64;
            let n = tick_count(min, max, step);
            (0..n as i64)
                .map(|i| {
                    let raw = (first + i) as f64 * step;
                    let p = 10f64.powi(decimals as i32);
                    let v = (raw * p).round() / p;
                    let v = if v == 0.0 { 0.0 } else { v };
                    let value = Value::Number(v);
                    let px = scale.apply(&value).expect("tick in scale type");
                    (value, px)
                })
                .collect()
        }
        ScaleKind::Band | ScaleKind::PointOrdinal => scale
            .categories()
            .iter()
            .map(|c| (c.clone(), scale.apply(c).expect("category in domain")))
            .collect(),
    }
}

fn step_decimals(step: f64) -> usize {
    let k = step.log10().floor() as i32;
    if k < 0 {
        (-k) as usize
    } else {
        0
    }
}

fn tick_label(scale: &Scale, v: &Value, target: usize) -> String {
    match (scale.kind, v) {
        (ScaleKind::Linear, Value::Number(n)) => {
            let (min, max) = scale.continuous_domain().expect("continuous");
            let d = step_decimals(tick_step(min, max, target));
            let s = format!("{n:.d$}");
            if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
                s[1..].to_string()
            } else {
                s
            }
        }
        (ScaleKind::Time, Value::Temporal(t)) => {
            let (min, max) = scale.continuous_domain().expect("continuous");
            let fmt = time_interval(min as i64, max as i64, target.max(2)).label_format();
            chrono::DateTime::from_timestamp_millis(*t)
                .map(|d| d.format(fmt).to_string())
                .unwrap_or_else(|| t.to_string())
        }
        (_, Value::Number(n)) => format_number(*n),
        _ => v.display(),
    }
}

fn text(x: f64, y: f64, content: &str, size: f64, anchor: TextAnchor) -> TextRun {
    TextRun { x, y, content: content.into(), size, bold: false, anchor, rotate: None }
}

/// Compiles the chart into a scene graph. Rows with a null (or
/// out-of-domain) value in an encoded field produce no mark; each one is
/// reported as a `RowDropped` warning.
pub fn build_scene(
    spec: &ChartSpec,
    data: &DataTable,
    scales: &Scales,
    diags: &mut Diagnostics,
) -> Result<SceneGraph, ChartError> {
    let layout = spec.layout();
    let plot = layout.plot;
    let rows = surviving_rows(spec, data);
    {
        let mut it = rows.iter().peekable();
        for r in 0..data.row_count() {
            if it.peek() == Some(&&r) {
                it.next();
            } else {
                diags.warn(
                    "RowDropped",
                    "/data",
                    format!("row {r} has a null or out-of-domain encoded value and produces no mark"),
                );
            }
        }
    }

    let xt = target_ticks(Channel::X, plot.w);
    let yt = target_ticks(Channel::Y, plot.h);
    let xticks = tick_positions(&scales.x, xt);
    let yticks = tick_positions(&scales.y, yt);

    let mut plot_children = Vec::new();
    let mut grid = Vec::new();
    if scales.x.is_continuous() {
        for (i, (v, px)) in xticks.iter().enumerate() {
            grid.push(SceneNode::leaf(
                format!("axis/x/grid/{i}"),
                SemanticTag::AxisPart { axis: AxisName::X, part: AxisPartKind::Grid, value: Some(v.clone()) },
                Geometry::Line { from: Point::new(*px, plot.y), to: Point::new(*px, plot.bottom()) },
                NodeStyle::stroke(GRID_COLOR, 1.0),
            ));
        }
    }
    if scales.y.is_continuous() {
        for (i, (v, py)) in yticks.iter().enumerate() {
            grid.push(SceneNode::leaf(
                format!("axis/y/grid/{i}"),
                SemanticTag::AxisPart { axis: AxisName::Y, part: AxisPartKind::Grid, value: Some(v.clone()) },
                Geometry::Line { from: Point::new(plot.x, *py), to: Point::new(plot.right(), *py) },
                NodeStyle::stroke(GRID_COLOR, 1.0),
            ));
        }
    }
    plot_children.extend(SceneNode::with_children("grid", SemanticTag::Group, Geometry::None, NodeStyle::hidden(), grid));
    let marks = build_marks(spec, data, scales, &rows)?;
    plot_children.extend(SceneNode::with_children("marks", SemanticTag::Group, Geometry::None, NodeStyle::hidden(), marks));
    let plot_node = SceneNode::with_children(
        "plot",
        SemanticTag::PlotArea,
        Geometry::Rect { rect: plot },
        NodeStyle::hidden(),
        plot_children,
    )
    .expect("plot rect");

    let mut top = vec![plot_node];
    top.push(build_x_axis(spec, scales, &xticks, xt, plot));
    top.push(build_y_axis(spec, scales, &yticks, yt, plot));

    let canvas_mid = layout.canvas.w / 2.0;
    if let Some(t) = &spec.title {
        let mut run = text(canvas_mid, 24.0, t, TITLE_SIZE, TextAnchor::Middle);
        run.bold = true;
        top.push(SceneNode::leaf(
            "chart/title",
            SemanticTag::ChartPart { part: ChartPartKind::Title },
            Geometry::Text { run },
            NodeStyle::fill(TEXT_COLOR),
        ));
    }
    if let Some(s) = &spec.subtitle {
        top.push(SceneNode::leaf(
            "chart/subtitle",
            SemanticTag::ChartPart { part: ChartPartKind::Subtitle },
            Geometry::Text { run: text(canvas_mid, 40.0, s, SUBTITLE_SIZE, TextAnchor::Middle) },
            NodeStyle::fill("#666666"),
        ));
    }
    if let Some(c) = &spec.caption {
        top.push(SceneNode::leaf(
            "chart/caption",
            SemanticTag::ChartPart { part: ChartPartKind::Caption },
            Geometry::Text { run: text(plot.x, plot.bottom() + 54.0, c, CAPTION_SIZE, TextAnchor::Start) },
            NodeStyle::fill("#666666"),
        ));
    }
    if let (Some(enc), Some(cs)) = (&spec.color, &scales.color) {
        let x0 = plot.right() + 12.0;
        let y0 = plot.y;
        let mut items = Vec::new();
        let tag = || SemanticTag::ChartPart { part: ChartPartKind::Legend };
        let mut title = text(x0, y0 + 10.0, &enc.field, AXIS_LABEL_SIZE, TextAnchor::Start);
        title.bold = true;
        items.push(SceneNode::leaf("chart/legend/title", tag(), Geometry::Text { run: title }, NodeStyle::fill(TEXT_COLOR)));
        for (i, cat) in cs.categories().iter().enumerate() {
            let y = y0 + 18.0 + i as f64 * 16.0;
            items.push(SceneNode::leaf(
                format!("chart/legend/swatch/{i}"),
                tag(),
                Geometry::Rect { rect: Rect::new(x0, y, 10.0, 10.0) },
                NodeStyle::fill(PALETTE[i % PALETTE.len()]),
            ));
            items.push(SceneNode::leaf(
                format!("chart/legend/label/{i}"),
                tag(),
                Geometry::Text { run: text(x0 + 14.0, y + 9.0, &cat.display(), TICK_LABEL_SIZE, TextAnchor::Start) },
                NodeStyle::fill(TEXT_COLOR),
            ));
        }
        top.extend(SceneNode::with_children("chart/legend", tag(), Geometry::None, NodeStyle::hidden(), items));
    }

    let root = SceneNode::with_children("scene", SemanticTag::Group, Geometry::None, NodeStyle::hidden(), top)
        .expect("plot present");
    Ok(SceneGraph { width: layout.canvas.w, height: layout.canvas.h, plot, mark_rows: rows, root })
}

fn build_x_axis(spec: &ChartSpec, scales: &Scales, ticks: &[(Value, f64)], target: usize, plot: Rect) -> SceneNode {
    let b = plot.bottom();
    let mut parts = Vec::new();
    for (i, (v, px)) in ticks.iter().enumerate() {
        let tag = |part| SemanticTag::AxisPart { axis: AxisName::X, part, value: Some(v.clone()) };
        parts.push(SceneNode::leaf(
            format!("axis/x/tick/{i}"),
            tag(AxisPartKind::Tick),
            Geometry::Line { from: Point::new(*px, b), to: Point::new(*px, b + TICK_LENGTH) },
            NodeStyle::stroke(AXIS_COLOR, 1.0),
        ));
        parts.push(SceneNode::leaf(
            format!("axis/x/tick-label/{i}"),
            tag(AxisPartKind::TickLabel),
            Geometry::Text {
                run: text(*px, b + TICK_LENGTH + 3.0 + TICK_LABEL_SIZE, &tick_label(&scales.x, v, target), TICK_LABEL_SIZE, TextAnchor::Middle),
            },
            NodeStyle::fill(TEXT_COLOR),
        ));
    }
    let mut label = text(plot.center().x, b + 34.0, &spec.x.field, AXIS_LABEL_SIZE, TextAnchor::Middle);
    label.bold = true;
    parts.push(SceneNode::leaf(
        "axis/x/label",
        SemanticTag::AxisPart { axis: AxisName::X, part: AxisPartKind::Label, value: None },
        Geometry::Text { run: label },
        NodeStyle::fill(TEXT_COLOR),
    ));
    SceneNode::with_children(
        "axis/x",
        SemanticTag::Group,
        Geometry::Line { from: Point::new(plot.x, b), to: Point::new(plot.right(), b) },
        NodeStyle::stroke(AXIS_COLOR, 1.0),
        parts,
    )
    .expect("axis line")
}

fn build_y_axis(spec: &ChartSpec, scales: &Scales, ticks: &[(Value, f64)], target: usize, plot: Rect) -> SceneNode {
    let l = plot.x;
    let mut parts = Vec::new();
    for (i, (v, py)) in ticks.iter().enumerate() {
        let tag = |part| SemanticTag::AxisPart { axis: AxisName::Y, part, value: Some(v.clone()) };
        parts.push(SceneNode::leaf(
            format!("axis/y/tick/{i}"),
            tag(AxisPartKind::Tick),
            Geometry::Line { from: Point::new(l - TICK_LENGTH, *py), to: Point::new(l, *py) },
            NodeStyle::stroke(AXIS_COLOR, 1.0),
        ));
        parts.push(SceneNode::leaf(
            format!("axis/y/tick-label/{i}"),
            tag(AxisPartKind::TickLabel),
            Geometry::Text {
                run: text(l - TICK_LENGTH - 3.0, py + 3.5, &tick_label(&scales.y, v, target), TICK_LABEL_SIZE, TextAnchor::End),
            },
            NodeStyle::fill(TEXT_COLOR),
        ));
    }
    let mut label = text(16.0, plot.center().y, &spec.y.field, AXIS_LABEL_SIZE, TextAnchor::Middle);
    label.bold = true;
    label.rotate = Some(-90.0);
    parts.push(SceneNode::leaf(
        "axis/y/label",
        SemanticTag::AxisPart { axis: AxisName::Y, part: AxisPartKind::Label, value: None },
        Geometry::Text { run: label },
        NodeStyle::fill(TEXT_COLOR),
    ));
    SceneNode::with_children(
        "axis/y",
        SemanticTag::Group,
        Geometry::Line { from: Point::new(l, plot.y), to: Point::new(l, plot.bottom()) },
        NodeStyle::stroke(AXIS_COLOR, 1.0),
        parts,
    )
    .expect("axis line")
}

fn color_of(spec: &ChartSpec, data: &DataTable, scales: &Scales, row: usize) -> (usize, &'static str) {
    match (&spec.color, &scales.color) {
        (Some(enc), Some(cs)) => {
            let ci = data.column_index(&enc.field).expect("validated");
            let idx = cs.category_index(data.value(row, ci)).unwrap_or(0);
            (idx, PALETTE[idx % PALETTE.len()])
        }
        _ => (0, PALETTE[0]),
    }
}

fn build_marks(spec: &ChartSpec, data: &DataTable, scales: &Scales, rows: &[usize]) -> Result<Vec<SceneNode>, ChartError> {
    let xc = data.column_index(&spec.x.field).expect("validated");
    let yc = data.column_index(&spec.y.field).expect("validated");
    let mut out = Vec::new();
    match spec.mark {
        Mark::Bar => {
            let orientation = spec.bar_orientation().expect("bar");
            for &r in rows {
                let (_, color) = color_of(spec, data, scales, r);
                let (pos_scale, pos_val, len_scale, len_val) = match orientation {
                    BarOrientation::Vertical => (&scales.x, data.value(r, xc), &scales.y, data.value(r, yc)),
                    BarOrientation::Horizontal => (&scales.y, data.value(r, yc), &scales.x, data.value(r, xc)),
                };
                let (p0, p1) = if pos_scale.kind == ScaleKind::Band {
                    let i = pos_scale
                        .category_index(pos_val)
                        .ok_or_else(|| ChartError::DomainMiss(pos_val.display()))?;
                    let s = pos_scale.band_start(i);
                    (s, s + pos_scale.bandwidth())
                } else {
                    let c = pos_scale.apply(pos_val)?;
                    (c - CONTINUOUS_BAR_WIDTH / 2.0, c + CONTINUOUS_BAR_WIDTH / 2.0)
                };
                let base = len_scale.apply(&Value::Number(0.0))?;
                let tip = len_scale.apply(len_val)?;
                let rect = match orientation {
                    BarOrientation::Vertical => Rect::from_corners(Point::new(p0, base), Point::new(p1, tip)),
                    BarOrientation::Horizontal => Rect::from_corners(Point::new(base, p0), Point::new(tip, p1)),
                };
                out.push(SceneNode::leaf(
                    format!("mark/{r}"),
                    SemanticTag::Mark { row_index: r },
                    Geometry::Rect { rect },
                    NodeStyle::fill(color),
                ));
            }
        }
        Mark::Point => {
            for &r in rows {
                let (_, color) = color_of(spec, data, scales, r);
                let cx = scales.x.apply(data.value(r, xc))?;
                let cy = scales.y.apply(data.value(r, yc))?;
                out.push(SceneNode::leaf(
                    format!("mark/{r}"),
                    SemanticTag::Mark { row_index: r },
                    Geometry::Circle { cx, cy, r: POINT_RADIUS },
                    NodeStyle::fill(color),
                ));
            }
        }
        Mark::Line | Mark::Area => {
            // One series per color category, in category order.
            let mut series: Vec<Series> = Vec::new();
            for &r in rows {
                let (idx, color) = color_of(spec, data, scales, r);
                let p = Point::new(scales.x.apply(data.value(r, xc))?, scales.y.apply(data.value(r, yc))?);
                match series.iter_mut().find(|s| s.0 == idx) {
                    Some(s) => s.2.push((p, r)),
                    None => series.push((idx, color, vec![(p, r)])),
                }
            }
            series.sort_by_key(|s| s.0);
            let baseline = if spec.mark == Mark::Area { Some(scales.y.apply(&Value::Number(0.0))?) } else { None };
            for (si, (_, color, mut pts)) in series.into_iter().enumerate() {
                pts.sort_by(|a, b| a.0.x.total_cmp(&b.0.x).then(a.1.cmp(&b.1)));
                let vertices: Vec<Point> = pts.iter().map(|(p, _)| *p).collect();
                let (geometry, style) = match baseline {
                    Some(y0) => {
                        let mut poly = vertices.clone();
                        poly.push(Point::new(vertices.last().expect("non-empty").x, y0));
                        poly.push(Point::new(vertices[0].x, y0));
                        let mut st = NodeStyle::fill(color);
                        st.opacity = 0.7;
                        (Geometry::Path { points: poly }, st)
                    }
                    None => (Geometry::Polyline { points: vertices }, NodeStyle::stroke(color, 2.0)),
                };
                let hits = pts
                    .iter()
                    .map(|(p, r)| {
                        SceneNode::leaf(
                            format!("mark/{r}"),
                            SemanticTag::Mark { row_index: *r },
                            Geometry::Rect { rect: Rect::centered(*p, VERTEX_BOX, VERTEX_BOX) },
                            NodeStyle::hidden(),
                        )
                    })
                    .collect();
                out.extend(SceneNode::with_children(format!("series/{si}"), SemanticTag::Series, geometry, style, hits));
            }
        }
    }
    Ok(out)
}
