//! The spec document: chart, data source, annotation roots and ensembles.
//!
//! ```json
//! {
//!   "chart": {"mark": "bar", "encoding": {"x": {...}, "y": {...}}},
//!   "data": {"url": "sales.csv"},
//!   "annotations": [
//!     {"targets": [{"dataPoint": {"expr": "datum.v == max(v)"}}],
//!      "text": {"content": "peak", "position": {"anchor": "up"}},
//!      "connector": {"markers": "arrow-end"}}
//!   ],
//!   "ensembles": [{"reference": {"from": "a", "to": "b"}}]
//! }
//! ```
//!
//! Parsing is syntactic; [`bind`] type-checks expressions against the data.

mod bind;
pub mod json;
mod parse;
mod serialize;

use thiserror::Error;

pub use bind::bind;
pub use parse::{parse_spec, parse_spec_str};
pub use serialize::{serialize_spec, serialize_spec_string};

use crate::chart::{ChartError, ChartSpec, Coord};
use crate::expr::{Expr, ExprError};
use crate::scene::{AxisName, AxisPartKind, ChartPartKind, TextAnchor};

pub const DEFAULT_STROKE: &str = "#333333";
pub const DEFAULT_FONT_SIZE: f64 = 11.0;
pub const DEFAULT_PADDING: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Spec {
    pub chart: ChartSpec,
    pub data: DataSource,
    pub annotations: Vec<AnnotationRoot>,
    pub ensembles: Vec<Ensemble>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Path, resolved relative to the spec file.
    Url(String),
    Values(Vec<serde_json::Value>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRoot {
    pub targets: Vec<Target>,
    pub text: Option<Annotation<TextAnn>>,
    pub enclosure: Option<Annotation<EnclosureAnn>>,
    pub connector: Option<Annotation<ConnectorAnn>>,
    pub indicator: Option<Annotation<IndicatorAnn>>,
}

impl AnnotationRoot {
    /// Effect ids in paint order.
    pub fn effect_ids(&self) -> Vec<(&str, EffectKind)> {
        let mut out = Vec::new();
        if let Some(a) = &self.enclosure {
            out.push((a.id.as_str(), EffectKind::Enclosure));
        }
        if let Some(a) = &self.connector {
            out.push((a.id.as_str(), EffectKind::Connector));
        }
        if let Some(a) = &self.indicator {
            out.push((a.id.as_str(), EffectKind::Indicator));
        }
        if let Some(a) = &self.text {
            out.push((a.id.as_str(), EffectKind::Text));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EffectKind {
    Enclosure,
    Connector,
    Indicator,
    Text,
}

impl EffectKind {
    pub fn name(self) -> &'static str {
        match self {
            EffectKind::Text => "text",
            EffectKind::Enclosure => "enclosure",
            EffectKind::Connector => "connector",
            EffectKind::Indicator => "indicator",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    ById(String),
    Fixed(FixedPos),
    ChartPart(ChartPartKind),
    DataPoint(DataSelector),
    Axis {
        axis: AxisName,
        parts: Vec<AxisPartKind>,
        range: Option<AxisRange>,
    },
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSelector {
    Indices(Vec<usize>),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisRange {
    Interval(Coord, Coord),
    /// Predicate over `datum.value`, the tick value.
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Data,
    Pixel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPos {
    pub space: Space,
    pub x: Coord,
    pub y: Coord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor1D {
    Auto,
    Start,
    Mid,
    End,
}

impl Anchor1D {
    pub const ALL: [Anchor1D; 4] = [Anchor1D::Auto, Anchor1D::Start, Anchor1D::Mid, Anchor1D::End];

    pub fn name(self) -> &'static str {
        match self {
            Anchor1D::Auto => "auto",
            Anchor1D::Start => "start",
            Anchor1D::Mid => "mid",
            Anchor1D::End => "end",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor2D {
    Auto,
    UpLeft,
    Up,
    UpRight,
    MidLeft,
    Center,
    MidRight,
    DownLeft,
    Down,
    DownRight,
}

impl Anchor2D {
    pub const ALL: [Anchor2D; 10] = [
        Anchor2D::Auto,
        Anchor2D::UpLeft,
        Anchor2D::Up,
        Anchor2D::UpRight,
        Anchor2D::MidLeft,
        Anchor2D::Center,
        Anchor2D::MidRight,
        Anchor2D::DownLeft,
        Anchor2D::Down,
        Anchor2D::DownRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Anchor2D::Auto => "auto",
            Anchor2D::UpLeft => "upLeft",
            Anchor2D::Up => "up",
            Anchor2D::UpRight => "upRight",
            Anchor2D::MidLeft => "midLeft",
            Anchor2D::Center => "center",
            Anchor2D::MidRight => "midRight",
            Anchor2D::DownLeft => "downLeft",
            Anchor2D::Down => "down",
            Anchor2D::DownRight => "downRight",
        }
    }

    /// Unit direction from the target center, y down.
    pub fn direction(self) -> (i8, i8) {
        match self {
            Anchor2D::Auto | Anchor2D::Center => (0, 0),
            Anchor2D::UpLeft => (-1, -1),
            Anchor2D::Up => (0, -1),
            Anchor2D::UpRight => (1, -1),
            Anchor2D::MidLeft => (-1, 0),
            Anchor2D::MidRight => (1, 0),
            Anchor2D::DownLeft => (-1, 1),
            Anchor2D::Down => (0, 1),
            Anchor2D::DownRight => (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PositionKind {
    Fixed(FixedPos),
    Anchor1D(Anchor1D),
    Anchor2D(Anchor2D),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Position {
    pub kind: PositionKind,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FontWeight {
    Normal,
    Bold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub stroke: String,
    pub stroke_width: f64,
    /// `None` means no fill.
    pub fill: Option<String>,
    pub opacity: f64,
    pub font_size: f64,
    pub font_weight: FontWeight,
    pub text_anchor: TextAnchor,
    pub dash: Option<Vec<f64>>,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            stroke: DEFAULT_STROKE.into(),
            stroke_width: 1.0,
            fill: None,
            opacity: 1.0,
            font_size: DEFAULT_FONT_SIZE,
            font_weight: FontWeight::Normal,
            text_anchor: TextAnchor::Start,
            dash: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation<X> {
    pub id: String,
    pub style: Style,
    pub body: X,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextAnn {
    pub content: String,
    pub position: Option<Position>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rect,
    Ellipse,
    /// Path data, fitted to the enclosure box.
    Path(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureAnn {
    pub shape: Shape,
    pub position: Option<Position>,
    pub padding: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Markers {
    None,
    ArrowStart,
    ArrowEnd,
    ArrowBoth,
}

impl Markers {
    pub fn name(self) -> &'static str {
        match self {
            Markers::None => "none",
            Markers::ArrowStart => "arrow-start",
            Markers::ArrowEnd => "arrow-end",
            Markers::ArrowBoth => "arrow-both",
        }
    }

    pub fn at_start(self) -> bool {
        matches!(self, Markers::ArrowStart | Markers::ArrowBoth)
    }

    pub fn at_end(self) -> bool {
        matches!(self, Markers::ArrowEnd | Markers::ArrowBoth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    CatmullRom,
    Stepwise,
}

impl Interpolation {
    pub fn name(self) -> &'static str {
        match self {
            Interpolation::Linear => "linear",
            Interpolation::CatmullRom => "catmull-rom",
            Interpolation::Stepwise => "stepwise",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorAnn {
    pub markers: Markers,
    pub path_override: Option<String>,
    pub interpolation: Interpolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorKind {
    Line,
    Area,
    Arrow,
}

impl IndicatorKind {
    pub fn name(self) -> &'static str {
        match self {
            IndicatorKind::Line => "line",
            IndicatorKind::Area => "area",
            IndicatorKind::Arrow => "arrow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndicatorExpr {
    /// A value, or for `area` a row predicate whose selected rows span
    /// the band.
    Single(Expr),
    Interval(Expr, Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorAnn {
    pub kind: IndicatorKind,
    /// Axis whose scale maps the value.
    pub axis: AxisName,
    pub expr: IndicatorExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Reference { from: String, to: String, style: Style },
    Composite { id: String, members: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: duplicate id `{id}`")]
    DuplicateId { path: String, id: String },
    #[error("{path}: targets must not be empty")]
    EmptyTargets { path: String },
    #[error("{path}: more than one {effect} effect in one annotation root")]
    MultipleEffectsOfType { path: String, effect: String },
    #[error("{source}")]
    Expr { path: String, source: ExprError },
    #[error("{0}")]
    Chart(ChartError),
}

impl SpecError {
    pub fn code(&self) -> &'static str {
        match self {
            SpecError::Json(_) => "MalformedJson",
            SpecError::Schema { .. } => "SchemaError",
            SpecError::DuplicateId { .. } => "DuplicateId",
            SpecError::EmptyTargets { .. } => "EmptyTargets",
            SpecError::MultipleEffectsOfType { .. } => "MultipleEffectsOfType",
            SpecError::Expr { source, .. } => source.code(),
            SpecError::Chart(e) => e.code(),
        }
    }

    pub fn path(&self) -> String {
        match self {
            SpecError::Json(_) => String::new(),
            SpecError::Schema { path, .. }
            | SpecError::DuplicateId { path, .. }
            | SpecError::EmptyTargets { path }
            | SpecError::MultipleEffectsOfType { path, .. }
            | SpecError::Expr { path, .. } => path.clone(),
            SpecError::Chart(e) => e.path(),
        }
    }
}

#[cfg(test)]
mod tests;
