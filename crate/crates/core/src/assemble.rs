//! Turns placed targets into final annotation geometry, resolving id
//! targets, references and composites in rounds.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::chart::{ScaleKind, Scales};
use crate::data::DataTable;
use crate::diag::Diagnostics;
use crate::expr::{eval_constant, select_rows};
use crate::geom::{Point, Rect};
use crate::placement::{candidate_anchors, place_all, AnchorUsed, Candidate, OccupancyGrid, PlacementRequest, PlacementResult};
use crate::resolve::{map_fixed, ResolvedTarget};
use crate::scene::metrics::measure_text;
use crate::scene::{AxisName, SceneGraph, TextAnchor, TextRun};
use crate::spec::{
    AnnotationRoot, EffectKind, Ensemble, IndicatorExpr, IndicatorKind, Interpolation, Markers,
    PositionKind, Shape, Spec, Style, Target,
};
use crate::svgpath::{PathData, Segment};

pub const MAX_ROUNDS: usize = 10;
/// Perpendicular offset of the middle knot of curved connectors, capped
/// at a quarter of the chord length.
pub const CURVE_OFFSET: f64 = 12.0;
pub const ARROW_LENGTH: f64 = 8.0;
pub const ARROW_HALF_WIDTH: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub enum AnnoGeometry {
    Text(TextRun),
    Rect(Rect),
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
    /// Closed enclosure outline.
    Outline(PathData),
    /// Open strokes; arrowheads per `markers` at each stroke's ends.
    Strokes { paths: Vec<PathData>, markers: Markers },
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnnoKind {
    Effect(EffectKind),
    /// Reference ensemble link.
    Link,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedAnnotation {
    pub id: String,
    pub kind: AnnoKind,
    /// Root index, `None` for ensemble links.
    pub root: Option<usize>,
    pub geometry: AnnoGeometry,
    pub bbox: Rect,
    pub style: Style,
    /// Effect ids joined by this element.
    pub links: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssembleError {
    #[error("id `{id}` does not name any effect or composite")]
    UnresolvedReference { path: String, id: String },
    #[error("annotations depend on each other's positions and cannot be resolved: {ids:?}")]
    CycleUnresolved { path: String, ids: Vec<String> },
}

impl AssembleError {
    pub fn code(&self) -> &'static str {
        match self {
            AssembleError::UnresolvedReference { .. } => "UnresolvedReference",
            AssembleError::CycleUnresolved { .. } => "CycleUnresolved",
        }
    }

    pub fn path(&self) -> &str {
        match self {
            AssembleError::UnresolvedReference { path, .. } | AssembleError::CycleUnresolved { path, .. } => path,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    /// Paint order: roots in spec order (enclosure, connector, indicator,
    /// text), then reference links.
    pub annotations: Vec<ResolvedAnnotation>,
    pub placements: Vec<PlacementResult>,
    pub rounds: usize,
}

/// Chart state the assembler reads.
pub struct Context<'a> {
    pub scene: &'a SceneGraph,
    pub scales: &'a Scales,
    pub data: &'a DataTable,
}

/// Facing endpoints: the pair of edge midpoints, one per box, with the
/// smallest distance. Ties keep the first pair in top, right, bottom,
/// left order.
pub fn attachment_points(src: &Rect, dst: &Rect) -> (Point, Point) {
    let mut best = (src.center(), dst.center());
    let mut best_d = f64::INFINITY;
    for a in src.edge_midpoints() {
        for b in dst.edge_midpoints() {
            let d = a.distance(b);
            if d < best_d - 1e-12 {
                best_d = d;
                best = (a, b);
            }
        }
    }
    best
}

/// Cubic Bézier segments of a centripetal Catmull-Rom spline through `pts`.
/// End tangents use reflected phantom points.
pub fn catmull_rom(pts: &[Point]) -> PathData {
    let mut segs = vec![Segment::MoveTo(pts[0])];
    let n = pts.len();
    let get = |i: isize| -> Point {
        if i < 0 {
            Point::new(2.0 * pts[0].x - pts[1].x, 2.0 * pts[0].y - pts[1].y)
        } else if i as usize >= n {
            let (a, b) = (pts[n - 1], pts[n - 2]);
            Point::new(2.0 * a.x - b.x, 2.0 * a.y - b.y)
        } else {
            pts[i as usize]
        }
    };
    for i in 0..n - 1 {
        let (p0, p1, p2, p3) = (get(i as isize - 1), pts[i], pts[i + 1], get(i as isize + 2));
        let knot = |a: Point, b: Point| a.distance(b).sqrt().max(1e-9);
        let (d1, d2, d3) = (knot(p0, p1), knot(p1, p2), knot(p2, p3));
        let c1 = Point::new(
            (d1 * d1 * p2.x - d2 * d2 * p0.x + (2.0 * d1 * d1 + 3.0 * d1 * d2 + d2 * d2) * p1.x) / (3.0 * d1 * (d1 + d2)),
            (d1 * d1 * p2.y - d2 * d2 * p0.y + (2.0 * d1 * d1 + 3.0 * d1 * d2 + d2 * d2) * p1.y) / (3.0 * d1 * (d1 + d2)),
        );
        let c2 = Point::new(
            (d3 * d3 * p1.x - d2 * d2 * p3.x + (2.0 * d3 * d3 + 3.0 * d3 * d2 + d2 * d2) * p2.x) / (3.0 * d3 * (d3 + d2)),
            (d3 * d3 * p1.y - d2 * d2 * p3.y + (2.0 * d3 * d3 + 3.0 * d3 * d2 + d2 * d2) * p2.y) / (3.0 * d3 * (d3 + d2)),
        );
        segs.push(Segment::CubicTo(c1, c2, p2));
    }
    PathData { segments: segs }
}

/// Routes a connector between facing edge midpoints of `src` and `dst`.
pub fn route_connector(src: &Rect, dst: &Rect, interp: Interpolation) -> PathData {
    let (a, b) = attachment_points(src, dst);
    route_points(a, b, interp)
}

fn route_points(a: Point, b: Point, interp: Interpolation) -> PathData {
    let segments = match interp {
        Interpolation::Linear => vec![Segment::MoveTo(a), Segment::LineTo(b)],
        Interpolation::Stepwise => vec![Segment::MoveTo(a), Segment::LineTo(Point::new(b.x, a.y)), Segment::LineTo(b)],
        Interpolation::CatmullRom => {
            let len = a.distance(b);
            if len < 1e-9 {
                return PathData { segments: vec![Segment::MoveTo(a), Segment::LineTo(b)] };
            }
            let m = a.lerp(b, 0.5);
            let (nx, ny) = (-(b.y - a.y) / len, (b.x - a.x) / len);
            let off = CURVE_OFFSET.min(len / 4.0);
            let mid = Point::new(m.x + nx * off, m.y + ny * off);
            return catmull_rom(&[a, mid, b]);
        }
    };
    PathData { segments }
}

/// Maps a user path so its first point lands on `a` and its last on `b`,
/// scaling each axis independently (translation only along an axis where
/// the path's ends coincide).
fn fit_override(path: &PathData, a: Point, b: Point) -> PathData {
    let (Some(p0), Some(p1)) = (path.first_point(), path.last_point()) else { return path.clone() };
    let axis = |s0: f64, s1: f64, t0: f64, t1: f64| {
        if (s1 - s0).abs() < 1e-9 {
            (1.0, t0 - s0)
        } else {
            let k = (t1 - t0) / (s1 - s0);
            (k, t0 - s0 * k)
        }
    };
    let (sx, tx) = axis(p0.x, p1.x, a.x, b.x);
    let (sy, ty) = axis(p0.y, p1.y, a.y, b.y);
    path.transform(sx, sy, tx, ty)
}

/// Path data fitted into `r` by its endpoint box.
fn fit_into(path: &PathData, r: &Rect) -> PathData {
    let bb = path.endpoint_bbox();
    let sx = if bb.w > 1e-9 { r.w / bb.w } else { 1.0 };
    let sy = if bb.h > 1e-9 { r.h / bb.h } else { 1.0 };
    path.transform(sx, sy, r.x - bb.x * sx, r.y - bb.y * sy)
}

/// Bounding box of strokes including arrowheads.
fn strokes_bbox(paths: &[PathData], markers: Markers) -> Rect {
    let mut rects: Vec<Rect> = paths.iter().map(PathData::bbox).collect();
    if markers != Markers::None {
        rects = rects.into_iter().map(|r| r.inflate(ARROW_LENGTH)).collect();
    }
    Rect::union_all(&rects).unwrap_or_default()
}

/// Text run whose bbox is `r` for the given anchor and font size.
pub fn text_in_rect(content: &str, r: &Rect, style: &Style) -> TextRun {
    let x = match style.text_anchor {
        TextAnchor::Start => r.x,
        TextAnchor::Middle => r.center().x,
        TextAnchor::End => r.right(),
    };
    TextRun {
        x,
        y: r.y + style.font_size,
        content: content.to_string(),
        size: style.font_size,
        bold: style.font_weight == crate::spec::FontWeight::Bold,
        anchor: style.text_anchor,
        rotate: None,
    }
}

/// Per-root state across rounds.
struct RootState {
    /// Resolved concrete targets, with `None` for id targets.
    targets: Vec<Option<ResolvedTarget>>,
    done: bool,
}

struct Assembler<'a, 'c> {
    spec: &'a Spec,
    ctx: &'a Context<'c>,
    grid: &'a mut OccupancyGrid,
    budget: usize,
    diags: &'a mut Diagnostics,
    finalized: HashMap<String, Rect>,
    out: Vec<ResolvedAnnotation>,
    placements: Vec<PlacementResult>,
}

impl Assembler<'_, '_> {
    /// Boxes each target of root `ri` connects to: per-mark boxes for data
    /// points, the union box otherwise.
    fn target_boxes(&self, root: &AnnotationRoot, st: &RootState) -> Vec<(Rect, Target)> {
        let mut out = Vec::new();
        for (t, r) in root.targets.iter().zip(&st.targets) {
            match (t, r) {
                (Target::ById(id), _) => out.push((self.finalized[id], t.clone())),
                (Target::DataPoint(_), Some(r)) => out.extend(r.nodes.iter().map(|n| (n.1, t.clone()))),
                (_, Some(r)) => out.push((r.union_bbox, t.clone())),
                (_, None) => {}
            }
        }
        out
    }

    fn target_union(&self, root: &AnnotationRoot, st: &RootState) -> Rect {
        let boxes = self.target_boxes(root, st);
        Rect::union_all(boxes.iter().map(|b| &b.0)).unwrap_or(self.ctx.scene.plot)
    }

    fn enclosure_rect(&mut self, ri: usize, st: &RootState) -> Option<Rect> {
        let root = &self.spec.annotations[ri];
        let e = root.enclosure.as_ref()?;
        let base = self.target_union(root, st).inflate(e.body.padding);
        Some(match e.body.position.as_ref().map(|p| (&p.kind, p.dx, p.dy)) {
            Some((PositionKind::Fixed(fp), dx, dy)) => match map_fixed(fp, self.ctx.scales, self.ctx.scene.plot) {
                Ok(p) => Rect::centered(Point::new(p.x + dx, p.y + dy), base.w, base.h),
                Err(err) => {
                    self.diags.warn(err.code(), format!("/annotations/{ri}/enclosure/position"), err.to_string());
                    base
                }
            },
            Some((_, dx, dy)) => base.translate(dx, dy),
            None => base,
        })
    }

    /// Finalizes a batch of ready roots: enclosures claim their cells,
    /// texts are placed jointly, then connectors and indicators are built.
    fn process(&mut self, batch: &[usize], states: &mut [RootState]) {
        let mut enclosures: BTreeMap<usize, Rect> = BTreeMap::new();
        for &ri in batch {
            if let Some(r) = self.enclosure_rect(ri, &states[ri]) {
                let e = self.spec.annotations[ri].enclosure.as_ref().expect("enclosure");
                let cells = self.grid.cells_for_rect(&r);
                self.grid.claim(&e.id, cells);
                enclosures.insert(ri, r);
            }
        }

        let mut requests = Vec::new();
        let mut owners = Vec::new();
        for &ri in batch {
            let root = &self.spec.annotations[ri];
            let Some(t) = &root.text else { continue };
            let size = measure_text(&t.body.content, t.style.font_size);
            let fixed = t.body.position.as_ref().and_then(|p| match &p.kind {
                PositionKind::Fixed(fp) => Some((fp, p.dx, p.dy)),
                _ => None,
            });
            let req = match fixed {
                Some((fp, dx, dy)) => {
                    let p = match map_fixed(fp, self.ctx.scales, self.ctx.scene.plot) {
                        Ok(p) => p,
                        Err(err) => {
                            self.diags.warn(err.code(), format!("/annotations/{ri}/text/position"), err.to_string());
                            self.ctx.scene.plot.center()
                        }
                    };
                    let mut run = text_in_rect(&t.body.content, &Rect::new(0.0, 0.0, size.0, size.1), &t.style);
                    run.x = p.x + dx;
                    run.y = p.y + dy;
                    PlacementRequest {
                        id: t.id.clone(),
                        path: format!("/annotations/{ri}/text"),
                        candidates: vec![Candidate { rect: run.bbox(), anchor: AnchorUsed::Fixed }],
                        fixed: true,
                    }
                }
                None => {
                    let interior = !enclosures.contains_key(&ri)
                        && root.targets.iter().zip(&states[ri].targets).all(|(t, r)| {
                            *t == Target::None || r.as_ref().is_some_and(ResolvedTarget::is_none)
                        });
                    let around = enclosures.get(&ri).copied().unwrap_or_else(|| self.target_union(root, &states[ri]));
                    PlacementRequest {
                        id: t.id.clone(),
                        path: format!("/annotations/{ri}/text"),
                        candidates: candidate_anchors(&around, size, t.body.position.as_ref(), interior),
                        fixed: false,
                    }
                }
            };
            requests.push(req);
            owners.push(ri);
        }
        let placed = place_all(&requests, self.grid, self.budget, self.diags);
        let mut text_boxes: HashMap<usize, Rect> = HashMap::new();
        for p in placed {
            let ri = owners[requests.iter().position(|r| r.id == p.id).expect("placed request")];
            text_boxes.insert(ri, p.bbox);
            self.placements.push(p);
        }

        for &ri in batch {
            self.finish_root(ri, &states[ri], enclosures.get(&ri).copied(), text_boxes.get(&ri).copied());
            states[ri].done = true;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, ri: usize, id: &str, kind: EffectKind, geometry: AnnoGeometry, bbox: Rect, style: &Style, links: Vec<(String, String)>) {
        self.finalized.insert(id.to_string(), bbox);
        self.out.push(ResolvedAnnotation {
            id: id.to_string(),
            kind: AnnoKind::Effect(kind),
            root: Some(ri),
            geometry,
            bbox,
            style: style.clone(),
            links,
        });
    }

    fn finish_root(&mut self, ri: usize, st: &RootState, encl: Option<Rect>, text_box: Option<Rect>) {
        let root = &self.spec.annotations[ri];
        if let (Some(e), Some(r)) = (&root.enclosure, encl) {
            let geometry = match &e.body.shape {
                Shape::Rect => AnnoGeometry::Rect(r),
                Shape::Ellipse => {
                    let c = r.center();
                    AnnoGeometry::Ellipse { cx: c.x, cy: c.y, rx: r.w / 2.0, ry: r.h / 2.0 }
                }
                Shape::Path(d) => {
                    let p = PathData::parse(d).expect("validated at parse");
                    AnnoGeometry::Outline(fit_into(&p, &r))
                }
            };
            let bbox = match &geometry {
                AnnoGeometry::Outline(p) => p.bbox().union(&r),
                _ => r,
            };
            self.push(ri, &e.id, EffectKind::Enclosure, geometry, bbox, &e.style, Vec::new());
        }

        if let Some(c) = &root.connector {
            let boxes = self.target_boxes(root, st);
            let ids_of = |t: &Target| match t {
                Target::ById(id) => id.clone(),
                _ => "target".to_string(),
            };
            // Source: the text, else the first target; destinations: the
            // enclosure, else every remaining target box.
            let (src, src_id, dsts): (Rect, String, Vec<(Rect, String)>) = match (text_box, encl) {
                (Some(tb), Some(er)) => (tb, root.text.as_ref().expect("text").id.clone(), vec![(er, root.enclosure.as_ref().expect("enc").id.clone())]),
                (Some(tb), None) => (
                    tb,
                    root.text.as_ref().expect("text").id.clone(),
                    boxes.iter().map(|(r, t)| (*r, ids_of(t))).collect(),
                ),
                (None, _) if boxes.len() >= 2 => {
                    (boxes[0].0, ids_of(&boxes[0].1), boxes[1..].iter().map(|(r, t)| (*r, ids_of(t))).collect())
                }
                _ => {
                    self.diags.warn(
                        "ConnectorWithoutEndpoints",
                        format!("/annotations/{ri}/connector"),
                        "a connector needs a text or at least two targets",
                    );
                    (Rect::default(), String::new(), Vec::new())
                }
            };
            if !dsts.is_empty() {
                let mut paths = Vec::new();
                let mut links = Vec::new();
                for (d, did) in &dsts {
                    if src.overlap_area(d) > 0.0 && (src.contains_rect(d, 0.0) || d.contains_rect(&src, 0.0)) {
                        continue;
                    }
                    let (a, b) = attachment_points(&src, d);
                    let path = match &c.body.path_override {
                        Some(dpath) => fit_override(&PathData::parse(dpath).expect("validated at parse"), a, b),
                        None => route_points(a, b, c.body.interpolation),
                    };
                    paths.push(path);
                    links.push((src_id.clone(), did.clone()));
                }
                if paths.is_empty() {
                    self.diags.warn(
                        "ConnectorWithoutEndpoints",
                        format!("/annotations/{ri}/connector"),
                        "connector endpoints overlap; nothing drawn",
                    );
                }
                let bbox = strokes_bbox(&paths, c.body.markers);
                let geometry = AnnoGeometry::Strokes { paths, markers: c.body.markers };
                self.push(ri, &c.id, EffectKind::Connector, geometry, bbox, &c.style, links);
            }
        }

        if let Some(ind) = &root.indicator {
            let target = self.target_union(root, st);
            if let Some((geometry, bbox)) = self.indicator(ri, &ind.body, target) {
                self.push(ri, &ind.id, EffectKind::Indicator, geometry, bbox, &ind.style, Vec::new());
            }
        }

        if let (Some(t), Some(tb)) = (&root.text, text_box) {
            let run = text_in_rect(&t.body.content, &tb, &t.style);
            self.push(ri, &t.id, EffectKind::Text, AnnoGeometry::Text(run), tb, &t.style, Vec::new());
        }
    }

    /// Pixel position of a value on the indicator's axis.
    fn level(&mut self, ri: usize, axis: AxisName, e: &crate::expr::Expr) -> Option<f64> {
        let path = format!("/annotations/{ri}/indicator/expr");
        let scale = match axis {
            AxisName::X => &self.ctx.scales.x,
            AxisName::Y => &self.ctx.scales.y,
        };
        let v = match eval_constant(e, self.ctx.data) {
            Ok(s) => s.to_value()?,
            Err(err) => {
                self.diags.warn(err.code(), path, format!("indicator not drawn: {err}"));
                return None;
            }
        };
        let v = match (scale.kind, v) {
            (ScaleKind::Time, crate::data::Value::Number(n)) => crate::data::Value::Temporal(n as i64),
            (_, v) => v,
        };
        match scale.apply(&v) {
            Ok(px) => Some(px),
            Err(err) => {
                self.diags.warn(err.code(), path, format!("indicator not drawn: {err}"));
                None
            }
        }
    }

    fn indicator(&mut self, ri: usize, ind: &crate::spec::IndicatorAnn, target: Rect) -> Option<(AnnoGeometry, Rect)> {
        let plot = self.ctx.scene.plot;
        let path = format!("/annotations/{ri}/indicator");
        // Along-axis extent [lo, hi] in pixels.
        let (lo, hi) = match &ind.expr {
            IndicatorExpr::Single(e) if ind.kind == IndicatorKind::Area => {
                let rows = match select_rows(e, self.ctx.data, self.diags) {
                    Ok(r) => r,
                    Err(err) => {
                        self.diags.warn(err.code(), path, format!("indicator not drawn: {err}"));
                        return None;
                    }
                };
                let boxes: Vec<Rect> = rows.iter().filter_map(|r| self.ctx.scene.mark_for_row(*r)).map(|n| n.bbox).collect();
                let Some(u) = Rect::union_all(&boxes) else {
                    self.diags.warn("TargetEmpty", path, "indicator predicate selects no plotted row");
                    return None;
                };
                match ind.axis {
                    AxisName::X => (u.x, u.right()),
                    AxisName::Y => (u.y, u.bottom()),
                }
            }
            IndicatorExpr::Single(e) => {
                let p = self.level(ri, ind.axis, e)?;
                (p, p)
            }
            IndicatorExpr::Interval(a, b) => {
                let (pa, pb) = (self.level(ri, ind.axis, a)?, self.level(ri, ind.axis, b)?);
                (pa.min(pb), pa.max(pb))
            }
        };
        let (span_lo, span_hi) = match ind.axis {
            AxisName::X => (plot.x, plot.right()),
            AxisName::Y => (plot.y, plot.bottom()),
        };
        if hi < span_lo - 0.5 || lo > span_hi + 0.5 {
            self.diags.warn("IndicatorOutOfRange", path.clone(), "indicated level lies outside the plot area");
        }
        let (lo, hi) = (lo.clamp(span_lo, span_hi), hi.clamp(span_lo, span_hi));
        let rule = |p: f64| match ind.axis {
            AxisName::X => (Point::new(p, plot.y), Point::new(p, plot.bottom())),
            AxisName::Y => (Point::new(plot.x, p), Point::new(plot.right(), p)),
        };
        match ind.kind {
            IndicatorKind::Line => {
                let (a, b) = rule(lo);
                let path = PathData { segments: vec![Segment::MoveTo(a), Segment::LineTo(b)] };
                Some((AnnoGeometry::Strokes { paths: vec![path], markers: Markers::None }, Rect::from_corners(a, b)))
            }
            IndicatorKind::Area => {
                let r = match ind.axis {
                    AxisName::X => Rect::new(lo, plot.y, hi - lo, plot.h),
                    AxisName::Y => Rect::new(plot.x, lo, plot.w, hi - lo),
                };
                Some((AnnoGeometry::Rect(r), r))
            }
            IndicatorKind::Arrow => {
                let c = target.center();
                let (start, end) = match ind.axis {
                    AxisName::Y => {
                        let y0 = if lo < target.y { target.y } else if lo > target.bottom() { target.bottom() } else { c.y };
                        (Point::new(c.x, y0), Point::new(c.x, lo))
                    }
                    AxisName::X => {
                        let x0 = if lo < target.x { target.x } else if lo > target.right() { target.right() } else { c.x };
                        (Point::new(x0, c.y), Point::new(lo, c.y))
                    }
                };
                let path = PathData { segments: vec![Segment::MoveTo(start), Segment::LineTo(end)] };
                let bbox = strokes_bbox(std::slice::from_ref(&path), Markers::ArrowEnd);
                Some((AnnoGeometry::Strokes { paths: vec![path], markers: Markers::ArrowEnd }, bbox))
            }
        }
    }
}

fn effect_kind_rank(a: &ResolvedAnnotation) -> (usize, usize, usize) {
    match (&a.kind, a.root) {
        (AnnoKind::Effect(k), Some(r)) => (0, r, *k as usize),
        _ => (1, 0, 0),
    }
}

/// Runs assembly rounds until every root, composite and reference is
/// resolved. `targets[i][j]` is root `i`'s resolved target `j` (`None` for
/// id targets).
pub fn assemble(
    spec: &Spec,
    ctx: &Context,
    targets: Vec<Vec<Option<ResolvedTarget>>>,
    grid: &mut OccupancyGrid,
    budget: usize,
    diags: &mut Diagnostics,
) -> Result<Assembly, AssembleError> {
    let mut states: Vec<RootState> = targets.into_iter().map(|t| RootState { targets: t, done: false }).collect();
    let mut declared: Vec<&str> = Vec::new();
    for root in &spec.annotations {
        declared.extend(root.effect_ids().into_iter().map(|e| e.0));
    }
    let composites: Vec<(usize, &String, &Vec<String>)> = spec
        .ensembles
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match e {
            Ensemble::Composite { id, members } => Some((i, id, members)),
            _ => None,
        })
        .collect();
    declared.extend(composites.iter().map(|c| c.1.as_str()));
    let mut ens_done = vec![false; spec.ensembles.len()];

    let mut a = Assembler {
        spec,
        ctx,
        grid,
        budget,
        diags,
        finalized: HashMap::new(),
        out: Vec::new(),
        placements: Vec::new(),
    };
    let mut rounds = 0;
    loop {
        let pending_roots = states.iter().any(|s| !s.done);
        let pending_ens = ens_done.iter().any(|d| !d);
        if !pending_roots && !pending_ens {
            break;
        }
        if rounds == MAX_ROUNDS {
            return Err(cycle_error(spec, &states, &ens_done, &a.finalized));
        }
        rounds += 1;
        let mut progress = false;

        let ready: Vec<usize> = (0..states.len())
            .filter(|&i| {
                !states[i].done
                    && spec.annotations[i].targets.iter().all(|t| match t {
                        Target::ById(id) => a.finalized.contains_key(id),
                        _ => true,
                    })
            })
            .collect();
        if !ready.is_empty() {
            a.process(&ready, &mut states);
            progress = true;
        }
        for &(ei, id, members) in &composites {
            if !ens_done[ei] && members.iter().all(|m| a.finalized.contains_key(m)) {
                let u = Rect::union_all(members.iter().map(|m| &a.finalized[m])).expect("non-empty members");
                a.finalized.insert(id.clone(), u);
                ens_done[ei] = true;
                progress = true;
            }
        }
        for (ei, e) in spec.ensembles.iter().enumerate() {
            let Ensemble::Reference { from, to, style } = e else { continue };
            if ens_done[ei] || !a.finalized.contains_key(from) || !a.finalized.contains_key(to) {
                continue;
            }
            let (fr, tr) = (a.finalized[from], a.finalized[to]);
            ens_done[ei] = true;
            progress = true;
            if fr.overlap_area(&tr) > 0.0 && (fr.contains_rect(&tr, 0.0) || tr.contains_rect(&fr, 0.0)) {
                a.diags.warn("ConnectorWithoutEndpoints", format!("/ensembles/{ei}"), "referenced elements overlap; no link drawn");
                continue;
            }
            let path = route_connector(&fr, &tr, Interpolation::Linear);
            let paths = vec![path];
            a.out.push(ResolvedAnnotation {
                id: format!("ref/{ei}"),
                kind: AnnoKind::Link,
                root: None,
                bbox: strokes_bbox(&paths, Markers::ArrowEnd),
                geometry: AnnoGeometry::Strokes { paths, markers: Markers::ArrowEnd },
                style: style.clone(),
                links: vec![(from.clone(), to.clone())],
            });
        }
        if !progress {
            // Dangling ids first: they can never resolve.
            for (ri, root) in spec.annotations.iter().enumerate() {
                for (ti, t) in root.targets.iter().enumerate() {
                    if let Target::ById(id) = t {
                        if !declared.contains(&id.as_str()) {
                            return Err(AssembleError::UnresolvedReference {
                                path: format!("/annotations/{ri}/targets/{ti}/id"),
                                id: id.clone(),
                            });
                        }
                    }
                }
            }
            for (ei, e) in spec.ensembles.iter().enumerate() {
                let refs: Vec<(&String, String)> = match e {
                    Ensemble::Reference { from, to, .. } => {
                        vec![(from, format!("/ensembles/{ei}/reference/from")), (to, format!("/ensembles/{ei}/reference/to"))]
                    }
                    Ensemble::Composite { members, .. } => members
                        .iter()
                        .enumerate()
                        .map(|(k, m)| (m, format!("/ensembles/{ei}/composite/members/{k}")))
                        .collect(),
                };
                for (id, path) in refs {
                    if !declared.contains(&id.as_str()) {
                        return Err(AssembleError::UnresolvedReference { path, id: id.clone() });
                    }
                }
            }
            return Err(cycle_error(spec, &states, &ens_done, &a.finalized));
        }
    }
    let mut out = a.out;
    out.sort_by_key(effect_kind_rank);
    Ok(Assembly { annotations: out, placements: a.placements, rounds })
}

fn cycle_error(spec: &Spec, states: &[RootState], ens_done: &[bool], finalized: &HashMap<String, Rect>) -> AssembleError {
    let mut ids = Vec::new();
    let mut path = String::new();
    for (ri, (root, st)) in spec.annotations.iter().zip(states).enumerate() {
        if st.done {
            continue;
        }
        if path.is_empty() {
            path = format!("/annotations/{ri}");
        }
        for t in &root.targets {
            if let Target::ById(id) = t {
                if !finalized.contains_key(id) && !ids.contains(id) {
                    ids.push(id.clone());
                }
            }
        }
    }
    if path.is_empty() {
        if let Some(ei) = ens_done.iter().position(|d| !d) {
            path = format!("/ensembles/{ei}");
        }
    }
    AssembleError::CycleUnresolved { path, ids }
}
