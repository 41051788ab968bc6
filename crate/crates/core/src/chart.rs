//! Minimal grammar-of-graphics host chart: mark, encodings, layout and
//! scales. This is the visualization the annotation layer decorates.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

mod time;

pub use time::{time_interval, TimeInterval};

use crate::data::{parse_temporal, ColumnType, DataTable, Value};
use crate::geom::Rect;

pub const MARGIN_TOP: f64 = 40.0;
pub const MARGIN_RIGHT: f64 = 20.0;
pub const MARGIN_BOTTOM: f64 = 40.0;
pub const MARGIN_LEFT: f64 = 50.0;
pub const LEGEND_WIDTH: f64 = 80.0;
/// Extra top margin reserved for a subtitle line.
pub const SUBTITLE_BAND: f64 = 16.0;
/// Extra bottom margin reserved for a caption line.
pub const CAPTION_BAND: f64 = 20.0;
pub const DEFAULT_BAND_PADDING: f64 = 0.1;
/// Continuous ranges are inset so point marks and vertex hit boxes stay
/// inside the plot area.
pub const RANGE_INSET: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Bar,
    Line,
    Point,
    Area,
}

impl Mark {
    pub fn name(self) -> &'static str {
        match self {
            Mark::Bar => "bar",
            Mark::Line => "line",
            Mark::Point => "point",
            Mark::Area => "area",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "bar" => Mark::Bar,
            "line" => Mark::Line,
            "point" => Mark::Point,
            "area" => Mark::Area,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
    Color,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Color => "color",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingType {
    Quantitative,
    Nominal,
    Ordinal,
    Temporal,
}

impl EncodingType {
    pub fn name(self) -> &'static str {
        match self {
            EncodingType::Quantitative => "quantitative",
            EncodingType::Nominal => "nominal",
            EncodingType::Ordinal => "ordinal",
            EncodingType::Temporal => "temporal",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "quantitative" => EncodingType::Quantitative,
            "nominal" => EncodingType::Nominal,
            "ordinal" => EncodingType::Ordinal,
            "temporal" => EncodingType::Temporal,
            _ => return None,
        })
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, EncodingType::Nominal | EncodingType::Ordinal)
    }
}

/// A coordinate as written in a spec: a number or a string (category name
/// or ISO-8601 timestamp).
#[derive(Debug, Clone, PartialEq)]
pub enum Coord {
    Number(f64),
    String(String),
}

impl Coord {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Coord::Number(n) => serde_json::json!(n),
            Coord::String(s) => serde_json::Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub field: String,
    pub ty: EncodingType,
    /// Explicit domain: `[min, max]` for continuous scales, the category
    /// list for discrete ones.
    pub scale_domain: Option<Vec<Coord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub mark: Mark,
    pub x: Encoding,
    pub y: Encoding,
    pub color: Option<Encoding>,
    pub width: u32,
    pub height: u32,
    pub title: Option<String>,
    pub subtitle: Option<String>,
    pub caption: Option<String>,
}

impl ChartSpec {
    pub fn has_legend(&self) -> bool {
        self.color.is_some()
    }

    pub fn encoding(&self, channel: Channel) -> Option<&Encoding> {
        match channel {
            Channel::X => Some(&self.x),
            Channel::Y => Some(&self.y),
            Channel::Color => self.color.as_ref(),
        }
    }

    pub fn encodings(&self) -> impl Iterator<Item = (Channel, &Encoding)> {
        [(Channel::X, Some(&self.x)), (Channel::Y, Some(&self.y)), (Channel::Color, self.color.as_ref())]
            .into_iter()
            .filter_map(|(c, e)| e.map(|e| (c, e)))
    }

    /// Direction bars grow in, `None` for non-bar marks.
    pub fn bar_orientation(&self) -> Option<BarOrientation> {
        if self.mark != Mark::Bar {
            return None;
        }
        if self.y.ty == EncodingType::Quantitative {
            Some(BarOrientation::Vertical)
        } else {
            Some(BarOrientation::Horizontal)
        }
    }

    /// Canvas and plot-area rectangles from the fixed margin table.
    pub fn layout(&self) -> Layout {
        let top = MARGIN_TOP + if self.subtitle.is_some() { SUBTITLE_BAND } else { 0.0 };
        let bottom = MARGIN_BOTTOM + if self.caption.is_some() { CAPTION_BAND } else { 0.0 };
        let right = MARGIN_RIGHT + if self.has_legend() { LEGEND_WIDTH } else { 0.0 };
        let (w, h) = (self.width as f64, self.height as f64);
        Layout {
            canvas: Rect::new(0.0, 0.0, w, h),
            plot: Rect::new(MARGIN_LEFT, top, w - MARGIN_LEFT - right, h - top - bottom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarOrientation {
    /// Bars rise from y = 0; x is the category axis.
    Vertical,
    /// Bars extend from x = 0; y is the category axis.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub canvas: Rect,
    pub plot: Rect,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("encoding `{channel}` references unknown field `{field}`")]
    UnknownField { channel: Channel, field: String },
    #[error("encoding `{channel}`: {ty} cannot bind to {column} column `{field}`")]
    EncodingTypeMismatch {
        channel: Channel,
        field: String,
        ty: &'static str,
        column: ColumnType,
    },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("scale `{0}` has an empty domain")]
    EmptyDomain(Channel),
    #[error("value {0} is outside the scale domain")]
    DomainMiss(String),
}

impl ChartError {
    pub fn code(&self) -> &'static str {
        match self {
            ChartError::UnknownField { .. } => "UnknownField",
            ChartError::EncodingTypeMismatch { .. } => "TypeError",
            ChartError::InvalidChart(_) => "InvalidChart",
            ChartError::EmptyDomain(_) => "EmptyDomain",
            ChartError::DomainMiss(_) => "DomainMiss",
        }
    }

    /// Spec path of the offending node, relative to the document root.
    pub fn path(&self) -> String {
        match self {
            ChartError::UnknownField { channel, .. }
            | ChartError::EncodingTypeMismatch { channel, .. }
            | ChartError::EmptyDomain(channel) => format!("/chart/encoding/{channel}"),
            _ => "/chart".into(),
        }
    }
}

/// Checks encodings against the bound table.
pub fn validate(spec: &ChartSpec, data: &DataTable) -> Result<(), ChartError> {
    if spec.width == 0 || spec.height == 0 {
        return Err(ChartError::InvalidChart("width and height must be positive".into()));
    }
    let plot = spec.layout().plot;
    if plot.w < 1.0 || plot.h < 1.0 {
        return Err(ChartError::InvalidChart("chart too small for its margins".into()));
    }
    for (channel, enc) in spec.encodings() {
        let column = data.column_type(&enc.field).ok_or_else(|| ChartError::UnknownField {
            channel,
            field: enc.field.clone(),
        })?;
        let ok = match enc.ty {
            EncodingType::Quantitative => column == ColumnType::Number,
            EncodingType::Temporal => column == ColumnType::Temporal,
            EncodingType::Nominal | EncodingType::Ordinal => true,
        };
        if !ok {
            return Err(ChartError::EncodingTypeMismatch {
                channel,
                field: enc.field.clone(),
                ty: enc.ty.name(),
                column,
            });
        }
    }
    if let Some(c) = &spec.color {
        if !c.ty.is_discrete() {
            return Err(ChartError::InvalidChart("color encoding must be nominal or ordinal".into()));
        }
    }
    if spec.mark == Mark::Bar
        && spec.y.ty != EncodingType::Quantitative
        && !(spec.x.ty == EncodingType::Quantitative && spec.y.ty.is_discrete())
    {
        return Err(ChartError::InvalidChart(
            "bar marks need a quantitative y, or a quantitative x with a discrete y".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleKind {
    Linear,
    Band,
    PointOrdinal,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Domain {
    Continuous { min: f64, max: f64 },
    Discrete(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scale {
    pub kind: ScaleKind,
    pub domain: Domain,
    /// Pixel interval `(start, end)`; `end < start` for inverted y ranges.
    pub range: (f64, f64),
    pub band_padding: f64,
}

impl Scale {
    pub fn linear(min: f64, max: f64, range: (f64, f64)) -> Self {
        Self { kind: ScaleKind::Linear, domain: Domain::Continuous { min, max }, range, band_padding: 0.0 }
    }

    pub fn time(min: f64, max: f64, range: (f64, f64)) -> Self {
        Self { kind: ScaleKind::Time, domain: Domain::Continuous { min, max }, range, band_padding: 0.0 }
    }

    pub fn band(domain: Vec<Value>, range: (f64, f64), padding: f64) -> Self {
        Self { kind: ScaleKind::Band, domain: Domain::Discrete(domain), range, band_padding: padding }
    }

    pub fn point(domain: Vec<Value>, range: (f64, f64)) -> Self {
        Self { kind: ScaleKind::PointOrdinal, domain: Domain::Discrete(domain), range, band_padding: 0.0 }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, ScaleKind::Linear | ScaleKind::Time)
    }

    pub fn continuous_domain(&self) -> Option<(f64, f64)> {
        match self.domain {
            Domain::Continuous { min, max } => Some((min, max)),
            Domain::Discrete(_) => None,
        }
    }

    pub fn categories(&self) -> &[Value] {
        match &self.domain {
            Domain::Discrete(v) => v,
            Domain::Continuous { .. } => &[],
        }
    }

    fn step(&self) -> f64 {
        let n = self.categories().len().max(1) as f64;
        (self.range.1 - self.range.0) / n
    }

    /// Band width in pixels (signed like the range). Zero for non-band scales.
    pub fn bandwidth(&self) -> f64 {
        match self.kind {
            ScaleKind::Band => self.step() * (1.0 - self.band_padding),
            _ => 0.0,
        }
    }

    /// Leading edge of band `i`: each step slot starts with `padding × step`
    /// of empty space followed by the band itself.
    pub fn band_start(&self, i: usize) -> f64 {
        let step = self.step();
        self.range.0 + i as f64 * step + self.band_padding * step
    }

    pub fn category_index(&self, v: &Value) -> Option<usize> {
        self.categories().iter().position(|c| c == v)
    }

    pub fn in_domain(&self, v: &Value) -> bool {
        match (&self.domain, self.kind, v) {
            (Domain::Continuous { min, max }, ScaleKind::Linear, Value::Number(n))
            | (Domain::Continuous { min, max }, ScaleKind::Time, Value::Number(n)) => *n >= *min && *n <= *max,
            (Domain::Continuous { min, max }, ScaleKind::Time, Value::Temporal(t)) => {
                (*t as f64) >= *min && (*t as f64) <= *max
            }
            (Domain::Discrete(_), _, v) => self.category_index(v).is_some(),
            _ => false,
        }
    }

    /// Maps a value to a pixel coordinate. Continuous scales extrapolate
    /// outside their domain; band scales return the band center.
    pub fn apply(&self, v: &Value) -> Result<f64, ChartError> {
        match (&self.domain, self.kind, v) {
            (Domain::Continuous { min, max }, ScaleKind::Linear, Value::Number(n)) => {
                Ok(lerp_range(*min, *max, self.range, *n))
            }
            (Domain::Continuous { min, max }, ScaleKind::Time, Value::Temporal(t)) => {
                Ok(lerp_range(*min, *max, self.range, *t as f64))
            }
            (Domain::Discrete(_), ScaleKind::Band, v) => {
                let i = self.category_index(v).ok_or_else(|| ChartError::DomainMiss(v.display()))?;
                Ok(self.band_start(i) + self.bandwidth() / 2.0)
            }
            (Domain::Discrete(_), ScaleKind::PointOrdinal, v) => {
                let i = self.category_index(v).ok_or_else(|| ChartError::DomainMiss(v.display()))?;
                Ok(self.range.0 + (i as f64 + 0.5) * self.step())
            }
            _ => Err(ChartError::DomainMiss(format!("{} (wrong type for scale)", v.display()))),
        }
    }

    /// Interprets a spec coordinate in this scale's value space.
    pub fn coord_value(&self, c: &Coord) -> Option<Value> {
        match (self.kind, c) {
            (ScaleKind::Linear, Coord::Number(n)) => Some(Value::Number(*n)),
            (ScaleKind::Time, Coord::String(s)) => parse_temporal(s).map(Value::Temporal),
            (ScaleKind::Time, Coord::Number(n)) => Some(Value::Temporal(*n as i64)),
            (ScaleKind::Band | ScaleKind::PointOrdinal, c) => {
                let cats = self.categories();
                cats.iter()
                    .find(|v| match (v, c) {
                        (Value::String(a), Coord::String(b)) => a == b,
                        (Value::Number(a), Coord::Number(b)) => a == b,
                        (v, Coord::String(b)) => &v.display() == b,
                        _ => false,
                    })
                    .cloned()
            }
            _ => None,
        }
    }

    /// Extends a continuous domain outward to multiples of the tick step
    /// chosen for `target_ticks` (calendar boundaries for time scales).
    pub fn nice(&mut self, target_ticks: usize) {
        if let (ScaleKind::Time, Domain::Continuous { min, max }) = (self.kind, &self.domain) {
            let (lo, hi) = (*min as i64, *max as i64);
            let iv = time_interval(lo, hi, target_ticks);
            self.domain = Domain::Continuous { min: iv.floor(lo) as f64, max: iv.ceil(hi) as f64 };
            return;
        }
        if let Domain::Continuous { min, max } = self.domain {
            let step = tick_step(min, max, target_ticks);
            let nmin = (min / step).floor() * step;
            let nmax = (max / step).ceil() * step;
            self.domain = Domain::Continuous { min: clean(nmin), max: clean(nmax) };
        }
    }
}

/// Rounds away binary noise from multiples of decimal steps.
fn clean(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn lerp_range(min: f64, max: f64, range: (f64, f64), v: f64) -> f64 {
    let t = if max > min { (v - min) / (max - min) } else { 0.5 };
    range.0 + t * (range.1 - range.0)
}

/// Step from {1, 2, 5} × 10^k whose tick count over `[min, max]` is closest
/// to `target`; ties prefer the larger step.
pub fn tick_step(min: f64, max: f64, target: usize) -> f64 {
    let span = (max - min).abs().max(f64::MIN_POSITIVE);
    let base = span.log10().floor() as i32;
    let mut best: Option<(usize, f64)> = None;
    for k in (base - 3)..=(base + 1) {
        for m in [1.0, 2.0, 5.0] {
            let step = m * 10f64.powi(k);
            let count = tick_count(min, max, step);
            let diff = count.abs_diff(target);
            match best {
                Some((d, _)) if diff > d => {}
                _ => best = Some((diff, step)),
            }
        }
    }
    best.map(|(_, s)| s).unwrap_or(1.0)
}

pub(crate) fn tick_count(min: f64, max: f64, step: f64) -> usize {
    let lo = (min / step - 1e-9).ceil();
    let hi = (max / step + 1e-9).floor();
    if hi < lo {
        0
    } else {
        (hi - lo) as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scales {
    pub x: Scale,
    pub y: Scale,
    pub color: Option<Scale>,
}

impl Scales {
    pub fn get(&self, channel: Channel) -> Option<&Scale> {
        match channel {
            Channel::X => Some(&self.x),
            Channel::Y => Some(&self.y),
            Channel::Color => self.color.as_ref(),
        }
    }
}

/// Rows that take part in mark generation: every encoded field non-null and
/// inside any explicit domain. Returned in ascending row order.
pub fn surviving_rows(spec: &ChartSpec, data: &DataTable) -> Vec<usize> {
    let cols: Vec<(usize, &Encoding)> = spec
        .encodings()
        .filter_map(|(_, e)| data.column_index(&e.field).map(|i| (i, e)))
        .collect();
    (0..data.row_count())
        .filter(|&r| {
            cols.iter().all(|(ci, e)| {
                let v = data.value(r, *ci);
                !v.is_null() && within_override(e, v)
            })
        })
        .collect()
}

fn within_override(e: &Encoding, v: &Value) -> bool {
    let Some(dom) = &e.scale_domain else { return true };
    match e.ty {
        EncodingType::Quantitative | EncodingType::Temporal => match continuous_override(e.ty, dom) {
            Some((lo, hi)) => v.as_f64().is_some_and(|x| x >= lo && x <= hi),
            None => true,
        },
        _ => discrete_override(dom).contains(v) || dom.iter().any(|c| matches!(c, Coord::String(s) if *s == v.display())),
    }
}

fn continuous_override(ty: EncodingType, dom: &[Coord]) -> Option<(f64, f64)> {
    let vals: Vec<f64> = dom
        .iter()
        .filter_map(|c| match (ty, c) {
            (_, Coord::Number(n)) => Some(*n),
            (EncodingType::Temporal, Coord::String(s)) => parse_temporal(s).map(|t| t as f64),
            _ => None,
        })
        .collect();
    if vals.len() == 2 {
        Some((vals[0].min(vals[1]), vals[0].max(vals[1])))
    } else {
        None
    }
}

fn discrete_override(dom: &[Coord]) -> Vec<Value> {
    dom.iter()
        .map(|c| match c {
            Coord::Number(n) => Value::Number(*n),
            Coord::String(s) => Value::String(s.clone()),
        })
        .collect()
}

/// Derives one scale per encoded channel from the surviving rows.
///
/// Quantitative channels get a linear scale over the data extent, widened
/// to include zero for the bar/area measure; nominal (first-seen order) and
/// ordinal (sorted) channels get a band scale for bars and a point scale
/// otherwise; temporal channels get a time scale. Domains are not niced
/// here; see [`nice_scales`].
pub fn infer_scales(spec: &ChartSpec, data: &DataTable) -> Result<Scales, ChartError> {
    let plot = spec.layout().plot;
    let rows = surviving_rows(spec, data);
    let orientation = spec.bar_orientation();
    let make = |channel: Channel, enc: &Encoding| -> Result<Scale, ChartError> {
        let col = data.column_index(&enc.field).ok_or_else(|| ChartError::UnknownField {
            channel,
            field: enc.field.clone(),
        })?;
        let is_measure = matches!(
            (spec.mark, orientation, channel),
            (Mark::Bar, Some(BarOrientation::Vertical), Channel::Y)
                | (Mark::Bar, Some(BarOrientation::Horizontal), Channel::X)
                | (Mark::Area, _, Channel::Y)
        );
        let inset = if spec.mark == Mark::Bar && is_measure { 0.0 } else { RANGE_INSET };
        let range = match channel {
            Channel::Y if enc.ty.is_discrete() => (plot.y, plot.bottom()),
            Channel::Y => (plot.bottom() - inset, plot.y + inset),
            _ if enc.ty.is_discrete() => (plot.x, plot.right()),
            _ => (plot.x + inset, plot.right() - inset),
        };
        match enc.ty {
            EncodingType::Quantitative | EncodingType::Temporal => {
                let (mut lo, mut hi) = match enc.scale_domain.as_deref().and_then(|d| continuous_override(enc.ty, d)) {
                    Some(d) => d,
                    None => {
                        let vals: Vec<f64> = rows.iter().filter_map(|&r| data.value(r, col).as_f64()).collect();
                        if vals.is_empty() {
                            return Err(ChartError::EmptyDomain(channel));
                        }
                        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        if is_measure && enc.ty == EncodingType::Quantitative {
                            (lo.min(0.0), hi.max(0.0))
                        } else {
                            (lo, hi)
                        }
                    }
                };
                if lo == hi {
                    let pad = if enc.ty == EncodingType::Temporal { 86_400_000.0 } else { 1.0 };
                    lo -= pad;
                    hi += pad;
                }
                Ok(if enc.ty == EncodingType::Temporal {
                    Scale::time(lo, hi, range)
                } else {
                    Scale::linear(lo, hi, range)
                })
            }
            EncodingType::Nominal | EncodingType::Ordinal => {
                let cats = match &enc.scale_domain {
                    Some(d) => discrete_override(d),
                    None => {
                        let mut seen = HashSet::new();
                        let mut cats: Vec<Value> = Vec::new();
                        for &r in &rows {
                            let v = data.value(r, col);
                            if seen.insert(v.display()) {
                                cats.push(v.clone());
                            }
                        }
                        if enc.ty == EncodingType::Ordinal {
                            cats.sort_by(Value::total_cmp);
                        }
                        cats
                    }
                };
                if cats.is_empty() {
                    return Err(ChartError::EmptyDomain(channel));
                }
                Ok(if spec.mark == Mark::Bar && channel != Channel::Color {
                    Scale::band(cats, range, DEFAULT_BAND_PADDING)
                } else {
                    Scale::point(cats, range)
                })
            }
        }
    };
    Ok(Scales {
        x: make(Channel::X, &spec.x)?,
        y: make(Channel::Y, &spec.y)?,
        color: spec.color.as_ref().map(|c| make(Channel::Color, c)).transpose()?,
    })
}

/// Target tick count for an axis of the given pixel length.
pub fn target_ticks(channel: Channel, len: f64) -> usize {
    let per = if channel == Channel::X { 80.0 } else { 40.0 };
    ((len / per).floor() as usize).max(2)
}

/// Nices every continuous position scale whose domain was inferred from data.
pub fn nice_scales(spec: &ChartSpec, scales: &mut Scales) {
    let plot = spec.layout().plot;
    if spec.x.scale_domain.is_none() {
        scales.x.nice(target_ticks(Channel::X, plot.w));
    }
    if spec.y.scale_domain.is_none() {
        scales.y.nice(target_ticks(Channel::Y, plot.h));
    }
}

pub fn scale_apply(scale: &Scale, v: &Value) -> Result<f64, ChartError> {
    scale.apply(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;
    use proptest::prelude::*;

    fn s(v: &str) -> Value {
        Value::String(v.into())
    }

    #[test]
    fn linear_interpolation() {
        let sc = Scale::linear(0.0, 10.0, (0.0, 100.0));
        assert_eq!(sc.apply(&Value::Number(5.0)).unwrap(), 50.0);
        assert_eq!(sc.apply(&Value::Number(0.0)).unwrap(), 0.0);
        let inv = Scale::linear(0.0, 10.0, (100.0, 0.0));
        assert_eq!(inv.apply(&Value::Number(10.0)).unwrap(), 0.0);
    }

    #[test]
    fn band_partition() {
        let sc = Scale::band(vec![s("a"), s("b")], (0.0, 100.0), 0.0);
        assert_eq!(sc.bandwidth(), 50.0);
        assert_eq!(sc.apply(&s("a")).unwrap(), 25.0);
        assert_eq!(sc.apply(&s("b")).unwrap(), 75.0);
        assert_eq!(sc.apply(&s("c")).unwrap_err().code(), "DomainMiss");
    }

    #[test]
    fn band_padding_formula() {
        // step 50, padding 0.1 → band 45 wide starting 5 into its slot.
        let sc = Scale::band(vec![s("a"), s("b")], (0.0, 100.0), 0.1);
        assert_eq!(sc.bandwidth(), 45.0);
        assert_eq!(sc.band_start(0), 5.0);
        assert_eq!(sc.band_start(1), 55.0);
    }

    fn chart(mark: Mark, x: (&str, EncodingType), y: (&str, EncodingType)) -> ChartSpec {
        let enc = |(f, t): (&str, EncodingType)| Encoding { field: f.into(), ty: t, scale_domain: None };
        ChartSpec {
            mark,
            x: enc(x),
            y: enc(y),
            color: None,
            width: 400,
            height: 300,
            title: None,
            subtitle: None,
            caption: None,
        }
    }

    fn table(vals: &[(&str, f64)]) -> DataTable {
        DataTable::new(
            vec![
                Column { name: "k".into(), ty: ColumnType::String },
                Column { name: "v".into(), ty: ColumnType::Number },
            ],
            vals.iter().map(|(k, v)| vec![s(k), Value::Number(*v)]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn bars_include_zero() {
        let spec = chart(Mark::Bar, ("k", EncodingType::Nominal), ("v", EncodingType::Quantitative));
        let sc = infer_scales(&spec, &table(&[("a", 3.0), ("b", 7.0)])).unwrap();
        assert_eq!(sc.y.continuous_domain(), Some((0.0, 7.0)));
        assert_eq!(sc.x.kind, ScaleKind::Band);
        let spec = chart(Mark::Point, ("k", EncodingType::Nominal), ("v", EncodingType::Quantitative));
        let sc = infer_scales(&spec, &table(&[("a", 3.0), ("b", 7.0)])).unwrap();
        assert_eq!(sc.y.continuous_domain(), Some((3.0, 7.0)));
        assert_eq!(sc.x.kind, ScaleKind::PointOrdinal);
    }

    #[test]
    fn constant_domain_padded() {
        let spec = chart(Mark::Point, ("k", EncodingType::Nominal), ("v", EncodingType::Quantitative));
        let sc = infer_scales(&spec, &table(&[("a", 5.0), ("b", 5.0)])).unwrap();
        assert_eq!(sc.y.continuous_domain(), Some((4.0, 6.0)));
    }

    #[test]
    fn empty_domain() {
        let spec = chart(Mark::Bar, ("k", EncodingType::Nominal), ("v", EncodingType::Quantitative));
        let err = infer_scales(&spec, &table(&[])).unwrap_err();
        assert_eq!(err.code(), "EmptyDomain");
    }

    #[test]
    fn validation_errors() {
        let t = table(&[("a", 1.0)]);
        let spec = chart(Mark::Bar, ("nope", EncodingType::Nominal), ("v", EncodingType::Quantitative));
        assert_eq!(validate(&spec, &t).unwrap_err().code(), "UnknownField");
        let spec = chart(Mark::Bar, ("k", EncodingType::Quantitative), ("v", EncodingType::Quantitative));
        assert_eq!(validate(&spec, &t).unwrap_err().code(), "TypeError");
        let spec = chart(Mark::Bar, ("v", EncodingType::Quantitative), ("k", EncodingType::Nominal));
        assert!(validate(&spec, &t).is_ok());
        assert_eq!(spec.bar_orientation(), Some(BarOrientation::Horizontal));
    }

    #[test]
    fn nice_extends_to_step() {
        let mut sc = Scale::linear(0.0, 7.0, (0.0, 100.0));
        sc.nice(5);
        assert_eq!(sc.continuous_domain(), Some((0.0, 8.0)));
        let mut sc = Scale::linear(0.13, 0.92, (0.0, 100.0));
        sc.nice(5);
        assert_eq!(sc.continuous_domain(), Some((0.0, 1.0)));
    }

    #[test]
    fn layout_margins() {
        let mut spec = chart(Mark::Point, ("k", EncodingType::Nominal), ("v", EncodingType::Quantitative));
        assert_eq!(spec.layout().plot, Rect::new(50.0, 40.0, 330.0, 220.0));
        spec.color = Some(Encoding { field: "k".into(), ty: EncodingType::Nominal, scale_domain: None });
        assert_eq!(spec.layout().plot.w, 250.0);
    }

    proptest! {
        #[test]
        fn linear_is_monotone(lo in -1e6f64..1e6, span in 1e-3f64..1e6, a in 0f64..1.0, b in 0f64..1.0) {
            prop_assume!(a < b);
            let sc = Scale::linear(lo, lo + span, (10.0, 500.0));
            let pa = sc.apply(&Value::Number(lo + a * span)).unwrap();
            let pb = sc.apply(&Value::Number(lo + b * span)).unwrap();
            prop_assert!(pa <= pb);
            if (b - a) * span > 1e-6 * span.max(1.0) {
                prop_assert!(pa < pb);
            }
        }

        #[test]
        fn band_centers_increase(n in 1usize..30, pad in 0f64..0.9) {
            let cats: Vec<Value> = (0..n).map(|i| Value::String(format!("c{i}"))).collect();
            let sc = Scale::band(cats.clone(), (0.0, 300.0), pad);
            let centers: Vec<f64> = cats.iter().map(|c| sc.apply(c).unwrap()).collect();
            prop_assert!(centers.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
