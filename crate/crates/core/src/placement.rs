//! Occupancy grid and collision-free placement by backtracking search.

use crate::diag::Diagnostics;
use crate::geom::{Point, Rect};
use crate::scene::{AxisPartKind, Geometry, SceneGraph, SemanticTag};
use crate::spec::{Anchor1D, Anchor2D, Position, PositionKind};

pub const DEFAULT_CELL_SIZE: f64 = 4.0;
pub const DEFAULT_BUDGET: usize = 10_000;
pub const GAP: f64 = 4.0;
pub const OUTER_GAP: f64 = 16.0;

/// Compass order tried for automatic placement.
pub const RING: [Anchor2D; 8] = [
    Anchor2D::Up,
    Anchor2D::UpRight,
    Anchor2D::MidRight,
    Anchor2D::DownRight,
    Anchor2D::Down,
    Anchor2D::DownLeft,
    Anchor2D::MidLeft,
    Anchor2D::UpLeft,
];

/// Interior order for annotations without a target.
const INTERIOR: [Anchor2D; 7] = [
    Anchor2D::UpRight,
    Anchor2D::UpLeft,
    Anchor2D::DownRight,
    Anchor2D::DownLeft,
    Anchor2D::Up,
    Anchor2D::Down,
    Anchor2D::Center,
];

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub cell_size: f64,
    pub cols: usize,
    pub rows: usize,
    /// Canvas size in pixels.
    pub width: f64,
    pub height: f64,
    occupied: Vec<bool>,
    /// Cells claimed per annotation, in claim order.
    pub reserved: Vec<(String, Vec<usize>)>,
}

impl OccupancyGrid {
    pub fn new(width: f64, height: f64, cell_size: f64) -> Self {
        let cell_size = cell_size.max(1.0);
        let cols = ((width / cell_size).ceil() as usize).max(1);
        let rows = ((height / cell_size).ceil() as usize).max(1);
        OccupancyGrid { cell_size, cols, rows, width, height, occupied: vec![false; cols * rows], reserved: Vec::new() }
    }

    pub fn is_occupied(&self, cell: usize) -> bool {
        self.occupied[cell]
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|o| **o).count()
    }

    pub fn cell_rect(&self, cell: usize) -> Rect {
        let (c, r) = (cell % self.cols, cell / self.cols);
        Rect::new(c as f64 * self.cell_size, r as f64 * self.cell_size, self.cell_size, self.cell_size)
    }

    fn col_span(&self, x: f64, w: f64) -> Option<(usize, usize)> {
        span(x, w, self.cell_size, self.cols)
    }

    fn row_span(&self, y: f64, h: f64) -> Option<(usize, usize)> {
        span(y, h, self.cell_size, self.rows)
    }

    /// Cells covered by `r`, clipped to the grid. Cell `(c, r)` covers the
    /// half-open box `[c·s, (c+1)·s) × [r·s, (r+1)·s)`; a zero-size rect
    /// covers the cell containing it.
    pub fn cells_for_rect(&self, r: &Rect) -> Vec<usize> {
        let (Some((c0, c1)), Some((r0, r1))) = (self.col_span(r.x, r.w), self.row_span(r.y, r.h)) else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity((c1 - c0 + 1) * (r1 - r0 + 1));
        for row in r0..=r1 {
            for col in c0..=c1 {
                out.push(row * self.cols + col);
            }
        }
        out
    }

    /// Cells within `half_width` of the segment.
    pub fn cells_for_segment(&self, a: Point, b: Point, half_width: f64) -> Vec<usize> {
        let bb = Rect::from_corners(a, b).inflate(half_width);
        let mut out = Vec::new();
        for cell in self.cells_for_rect(&bb) {
            if segment_hits_rect(a, b, &self.cell_rect(cell).inflate(half_width)) {
                out.push(cell);
            }
        }
        out
    }

    /// Cells whose center lies inside the polygon (even-odd rule).
    pub fn cells_for_polygon_fill(&self, pts: &[Point]) -> Vec<usize> {
        let Some(bb) = crate::scene::points_bbox(pts) else { return Vec::new() };
        self.cells_for_rect(&bb)
            .into_iter()
            .filter(|c| point_in_polygon(self.cell_rect(*c).center(), pts))
            .collect()
    }

    pub fn mark(&mut self, cells: &[usize]) {
        for &c in cells {
            self.occupied[c] = true;
        }
    }

    /// Marks cells as taken by annotation `id`.
    pub fn claim(&mut self, id: &str, cells: Vec<usize>) {
        self.mark(&cells);
        self.reserved.push((id.to_string(), cells));
    }

    pub fn occlusion(&self, cells: &[usize]) -> usize {
        cells.iter().filter(|c| self.occupied[**c]).count()
    }

    /// Area of `r` lying in occupied cells.
    pub fn occluded_area(&self, r: &Rect) -> f64 {
        self.cells_for_rect(r)
            .into_iter()
            .filter(|c| self.occupied[*c])
            .map(|c| self.cell_rect(c).overlap_area(r))
            .sum()
    }
}

fn span(start: f64, len: f64, cs: f64, n: usize) -> Option<(usize, usize)> {
    let end = start + len.max(0.0);
    if end < 0.0 || start >= n as f64 * cs {
        return None;
    }
    let a = (start / cs).floor().max(0.0) as usize;
    let b = ((end / cs).ceil() as isize - 1).max(a as isize) as usize;
    Some((a.min(n - 1), b.min(n - 1)))
}

fn segment_hits_rect(a: Point, b: Point, r: &Rect) -> bool {
    // Liang–Barsky clipping.
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [(-dx, a.x - r.x), (dx, r.right() - a.x), (-dy, a.y - r.y), (dy, r.bottom() - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

fn point_in_polygon(p: Point, pts: &[Point]) -> bool {
    let mut inside = false;
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
            inside = !inside;
        }
    }
    inside
}

/// Rasterizes every visible scene node except gridlines and the plot
/// background. Lines and polylines occupy the cells their strokes cross;
/// area paths occupy their fill and outline.
pub fn build_grid(scene: &SceneGraph, cell_size: f64) -> OccupancyGrid {
    let mut g = OccupancyGrid::new(scene.width, scene.height, cell_size);
    for n in scene.nodes() {
        if !n.style.visible
            || matches!(n.tag, SemanticTag::PlotArea | SemanticTag::AxisPart { part: AxisPartKind::Grid, .. })
        {
            continue;
        }
        let hw = n.style.stroke_width.max(1.0) / 2.0;
        let cells = match &n.geometry {
            Geometry::None => continue,
            Geometry::Rect { .. } | Geometry::Circle { .. } | Geometry::Text { .. } => {
                g.cells_for_rect(&n.geometry.bbox().expect("sized geometry"))
            }
            Geometry::Line { from, to } => g.cells_for_segment(*from, *to, hw),
            Geometry::Polyline { points } => {
                points.windows(2).flat_map(|w| g.cells_for_segment(w[0], w[1], hw)).collect()
            }
            Geometry::Path { points } => {
                let mut cells = g.cells_for_polygon_fill(points);
                for i in 0..points.len() {
                    cells.extend(g.cells_for_segment(points[i], points[(i + 1) % points.len()], hw));
                }
                cells
            }
        };
        g.mark(&cells);
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Before,
    After,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorUsed {
    Fixed,
    Anchor2D { anchor: Anchor2D, gap: f64 },
    Anchor1D { anchor: Anchor1D, side: Side },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub rect: Rect,
    pub anchor: AnchorUsed,
}

/// Box of size `(w, h)` on side `a` of `t`, `gap` pixels away.
fn beside(t: &Rect, (w, h): (f64, f64), a: Anchor2D, gap: f64) -> Rect {
    let (dx, dy) = a.direction();
    let c = t.center();
    let x = match dx {
        -1 => t.x - gap - w,
        0 => c.x - w / 2.0,
        _ => t.right() + gap,
    };
    let y = match dy {
        -1 => t.y - gap - h,
        0 => c.y - h / 2.0,
        _ => t.bottom() + gap,
    };
    Rect::new(x, y, w, h)
}

/// Box of size `(w, h)` inside `t` against side `a`, inset by `gap`.
fn inside(t: &Rect, (w, h): (f64, f64), a: Anchor2D, gap: f64) -> Rect {
    let (dx, dy) = a.direction();
    let c = t.center();
    let x = match dx {
        -1 => t.x + gap,
        0 => c.x - w / 2.0,
        _ => t.right() - gap - w,
    };
    let y = match dy {
        -1 => t.y + gap,
        0 => c.y - h / 2.0,
        _ => t.bottom() - gap - h,
    };
    Rect::new(x, y, w, h)
}

/// Ordered placement candidates for an effect of `size` around `target`.
///
/// Explicit 2D anchors give one candidate; 1D anchors run along the
/// target's longer side, before then after it; `auto` gives the compass
/// ring at gap 4, the ring at gap 16, then the center. Targets with
/// `interior` set (no target) place inside the box instead.
pub fn candidate_anchors(target: &Rect, size: (f64, f64), pos: Option<&Position>, interior: bool) -> Vec<Candidate> {
    let (ox, oy) = pos.map_or((0.0, 0.0), |p| (p.dx, p.dy));
    let kind = pos.map(|p| &p.kind);
    let mut out = Vec::new();
    let mut push = |rect: Rect, anchor: AnchorUsed| out.push(Candidate { rect: rect.translate(ox, oy), anchor });
    if interior {
        let list: Vec<Anchor2D> = match kind {
            Some(PositionKind::Anchor2D(a)) if *a != Anchor2D::Auto => vec![*a],
            _ => INTERIOR.to_vec(),
        };
        for a in list {
            push(inside(target, size, a, GAP), AnchorUsed::Anchor2D { anchor: a, gap: GAP });
        }
        return out;
    }
    match kind {
        Some(PositionKind::Anchor2D(a)) if *a != Anchor2D::Auto => {
            push(beside(target, size, *a, GAP), AnchorUsed::Anchor2D { anchor: *a, gap: GAP });
        }
        Some(PositionKind::Anchor1D(a)) => {
            let along: Vec<Anchor1D> = match a {
                Anchor1D::Auto => vec![Anchor1D::Start, Anchor1D::Mid, Anchor1D::End],
                a => vec![*a],
            };
            let horizontal = target.w >= target.h;
            let (w, h) = size;
            for side in [Side::Before, Side::After] {
                for &a1 in &along {
                    let rect = if horizontal {
                        let x = match a1 {
                            Anchor1D::Start => target.x,
                            Anchor1D::End => target.right() - w,
                            _ => target.center().x - w / 2.0,
                        };
                        let y = match side {
                            Side::Before => target.y - GAP - h,
                            Side::After => target.bottom() + GAP,
                        };
                        Rect::new(x, y, w, h)
                    } else {
                        let y = match a1 {
                            Anchor1D::Start => target.y,
                            Anchor1D::End => target.bottom() - h,
                            _ => target.center().y - h / 2.0,
                        };
                        let x = match side {
                            Side::Before => target.right() + GAP,
                            Side::After => target.x - GAP - w,
                        };
                        Rect::new(x, y, w, h)
                    };
                    push(rect, AnchorUsed::Anchor1D { anchor: a1, side });
                }
            }
        }
        _ => {
            for gap in [GAP, OUTER_GAP] {
                for a in RING {
                    push(beside(target, size, a, gap), AnchorUsed::Anchor2D { anchor: a, gap });
                }
            }
            push(Rect::centered(target.center(), size.0, size.1), AnchorUsed::Anchor2D { anchor: Anchor2D::Center, gap: 0.0 });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementRequest {
    pub id: String,
    /// Spec path reported in diagnostics.
    pub path: String,
    pub candidates: Vec<Candidate>,
    /// Fixed requests have one candidate and are never moved.
    pub fixed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementResult {
    pub id: String,
    pub bbox: Rect,
    pub anchor_used: AnchorUsed,
    /// Index into the request's candidate list.
    pub candidate: usize,
    pub fallback: bool,
}

struct Search<'a> {
    grid: &'a OccupancyGrid,
    canvas: Rect,
    /// Per request, per candidate: covered cells, or `None` when off-canvas.
    cells: Vec<Vec<Option<Vec<usize>>>>,
    taken: Vec<u16>,
    visits: usize,
    budget: usize,
    path: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn feasible(&self, req: usize, cand: usize) -> bool {
        match &self.cells[req][cand] {
            None => false,
            Some(cells) => cells.iter().all(|&c| !self.grid.is_occupied(c) && self.taken[c] == 0),
        }
    }

    fn set(&mut self, req: usize, cand: usize, on: bool) {
        let cells = self.cells[req][cand].as_ref().expect("feasible candidate");
        for &c in cells {
            if on {
                self.taken[c] += 1;
            } else {
                self.taken[c] -= 1;
            }
        }
    }

    /// Depth-first search with forward checking. Returns true when every
    /// request from `depth` on is placed.
    fn dfs(&mut self, depth: usize) -> bool {
        if depth == self.cells.len() {
            return true;
        }
        for cand in 0..self.cells[depth].len() {
            if self.visits >= self.budget {
                return false;
            }
            self.visits += 1;
            if !self.feasible(depth, cand) {
                continue;
            }
            self.set(depth, cand, true);
            self.path.push(cand);
            if self.path.len() > self.best.len() {
                self.best = self.path.clone();
            }
            let later_ok =
                (depth + 1..self.cells.len()).all(|r| (0..self.cells[r].len()).any(|c| self.feasible(r, c)));
            if later_ok && self.dfs(depth + 1) {
                return true;
            }
            self.path.pop();
            self.set(depth, cand, false);
        }
        false
    }
}

fn clamp_into(r: Rect, canvas: &Rect) -> Rect {
    let x = r.x.min(canvas.right() - r.w).max(canvas.x);
    let y = r.y.min(canvas.bottom() - r.h).max(canvas.y);
    Rect::new(x, y, r.w, r.h)
}

/// Places requests in order. Fixed requests claim their cells first even
/// when those are occupied. The rest are searched jointly; if the search
/// fails or exceeds `budget` node visits, the deepest conflict-free prefix
/// is kept and each remaining request takes its least-occluded candidate.
/// Claimed cells are recorded in `grid`.
pub fn place_all(
    requests: &[PlacementRequest],
    grid: &mut OccupancyGrid,
    budget: usize,
    diags: &mut Diagnostics,
) -> Vec<PlacementResult> {
    let canvas = Rect::new(0.0, 0.0, grid.width, grid.height);
    let mut results: Vec<Option<PlacementResult>> = vec![None; requests.len()];
    for (i, req) in requests.iter().enumerate().filter(|(_, r)| r.fixed) {
        let Some(c) = req.candidates.first() else { continue };
        let cells = grid.cells_for_rect(&c.rect);
        if grid.occlusion(&cells) > 0 {
            diags.warn("FixedOverlap", req.path.clone(), format!("fixed annotation `{}` overlaps existing content", req.id));
        }
        grid.claim(&req.id, cells);
        results[i] = Some(PlacementResult { id: req.id.clone(), bbox: c.rect, anchor_used: c.anchor, candidate: 0, fallback: false });
    }

    let free: Vec<usize> = (0..requests.len()).filter(|i| !requests[*i].fixed).collect();
    let cells = free
        .iter()
        .map(|&i| {
            requests[i]
                .candidates
                .iter()
                .map(|c| canvas.contains_rect(&c.rect, 1e-9).then(|| grid.cells_for_rect(&c.rect)))
                .collect()
        })
        .collect();
    let mut s = Search {
        grid,
        canvas,
        cells,
        taken: vec![0; grid.cols * grid.rows],
        visits: 0,
        budget,
        path: Vec::new(),
        best: Vec::new(),
    };
    let solved = s.dfs(0);
    let chosen = if solved { s.path.clone() } else { s.best.clone() };
    let cells = std::mem::take(&mut s.cells);
    let canvas = s.canvas;
    if !solved {
        let stuck = free.get(chosen.len()).map(|&i| requests[i].path.clone()).unwrap_or_default();
        diags.warn(
            "PlacementFallback",
            stuck,
            format!("no conflict-free layout found after {} steps; using least-occluded positions", s.visits),
        );
    }

    for (k, &ri) in free.iter().enumerate() {
        let req = &requests[ri];
        let (cand, fallback) = match chosen.get(k) {
            Some(&c) => (c, false),
            None => {
                // Least occluded on-canvas candidate by covered area, ties by order.
                let mut best: Option<(f64, usize)> = None;
                for (ci, c) in cells[k].iter().enumerate() {
                    if c.is_none() {
                        continue;
                    }
                    let occ = grid.occluded_area(&req.candidates[ci].rect);
                    if best.is_none_or(|(b, _)| occ < b) {
                        best = Some((occ, ci));
                    }
                }
                match best {
                    Some((occ, ci)) => (ci, occ > 0.0),
                    None => (0, true),
                }
            }
        };
        let Some(c) = req.candidates.get(cand) else { continue };
        let bbox = clamp_into(c.rect, &canvas);
        let claimed = grid.cells_for_rect(&bbox);
        if fallback {
            diags.warn("PlacementFallback", req.path.clone(), format!("annotation `{}` overlaps other content", req.id));
        }
        grid.claim(&req.id, claimed);
        results[ri] = Some(PlacementResult { id: req.id.clone(), bbox, anchor_used: c.anchor, candidate: cand, fallback });
    }
    results.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(id: &str, candidates: Vec<Candidate>) -> PlacementRequest {
        PlacementRequest { id: id.into(), path: String::new(), candidates, fixed: false }
    }

    #[test]
    fn mark_cells_by_arithmetic() {
        let g = OccupancyGrid::new(100.0, 100.0, 4.0);
        // Aligned 8×8 box covers 2×2 cells; shifted by 2 it straddles 3×3.
        assert_eq!(g.cells_for_rect(&Rect::new(48.0, 48.0, 8.0, 8.0)).len(), 4);
        assert_eq!(g.cells_for_rect(&Rect::new(46.0, 46.0, 8.0, 8.0)).len(), 9);
        assert_eq!(g.cells_for_rect(&Rect::new(0.0, 0.0, 100.0, 100.0)).len(), 625);
        assert_eq!(g.cells_for_rect(&Rect::new(10.0, 10.0, 0.0, 0.0)), vec![2 * 25 + 2]);
        assert!(g.cells_for_rect(&Rect::new(-20.0, 0.0, 5.0, 5.0)).is_empty());
    }

    #[test]
    fn upleft_corner_arithmetic() {
        let pos = Position { kind: PositionKind::Anchor2D(Anchor2D::UpLeft), dx: 0.0, dy: 0.0 };
        let c = candidate_anchors(&Rect::new(100.0, 100.0, 20.0, 20.0), (30.0, 10.0), Some(&pos), false);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].rect.right(), c[0].rect.bottom()), (96.0, 96.0));
    }

    #[test]
    fn auto_gives_seventeen() {
        let c = candidate_anchors(&Rect::new(100.0, 100.0, 20.0, 20.0), (30.0, 10.0), None, false);
        assert_eq!(c.len(), 17);
        assert_eq!(c[0].anchor, AnchorUsed::Anchor2D { anchor: Anchor2D::Up, gap: GAP });
        assert_eq!(c[16].rect.center(), Point::new(110.0, 110.0));
    }

    #[test]
    fn anchor1d_mid_centers_on_horizontal_target() {
        let pos = Position { kind: PositionKind::Anchor1D(Anchor1D::Mid), dx: 0.0, dy: 0.0 };
        let t = Rect::new(50.0, 200.0, 300.0, 10.0);
        let c = candidate_anchors(&t, (40.0, 12.0), Some(&pos), false);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].rect.center().x, t.center().x);
    }

    #[test]
    fn single_annotation_takes_first_free_candidate() {
        let mut g = OccupancyGrid::new(200.0, 200.0, 4.0);
        let target = Rect::new(96.0, 96.0, 8.0, 8.0);
        g.mark(&g.cells_for_rect(&target));
        let cands = candidate_anchors(&target, (30.0, 12.0), None, false);
        // Oracle: the 'up' candidate's cells are all free.
        assert!(g.cells_for_rect(&cands[0].rect).iter().all(|c| !g.is_occupied(*c)));
        let out = place_all(&[req("a", cands)], &mut g, DEFAULT_BUDGET, &mut Diagnostics::new());
        assert_eq!(out[0].candidate, 0);
        assert!(!out[0].fallback);
    }

    #[test]
    fn two_annotations_on_one_mark_get_distinct_slots() {
        let mut g = OccupancyGrid::new(200.0, 200.0, 4.0);
        let target = Rect::new(96.0, 96.0, 8.0, 8.0);
        g.mark(&g.cells_for_rect(&target));
        let cands = candidate_anchors(&target, (30.0, 12.0), None, false);
        let out = place_all(&[req("a", cands.clone()), req("b", cands)], &mut g, DEFAULT_BUDGET, &mut Diagnostics::new());
        assert_ne!(out[0].candidate, out[1].candidate);
        assert_eq!(out[0].bbox.overlap_area(&out[1].bbox), 0.0);
        assert!(out.iter().all(|r| !r.fallback));
    }

    #[test]
    fn full_canvas_falls_back_to_first() {
        let mut g = OccupancyGrid::new(100.0, 100.0, 4.0);
        g.mark(&g.cells_for_rect(&Rect::new(0.0, 0.0, 100.0, 100.0)));
        let cands = candidate_anchors(&Rect::new(40.0, 40.0, 10.0, 10.0), (20.0, 10.0), None, false);
        let mut d = Diagnostics::new();
        let out = place_all(&[req("a", cands.clone())], &mut g, DEFAULT_BUDGET, &mut d);
        assert!(out[0].fallback);
        assert_eq!(out[0].bbox, cands[0].rect);
        assert!(d.items().iter().any(|x| x.code == "PlacementFallback"));
    }

    #[test]
    fn fixed_requests_claim_even_when_occupied() {
        let mut g = OccupancyGrid::new(100.0, 100.0, 4.0);
        let r = Rect::new(10.0, 10.0, 10.0, 10.0);
        g.mark(&g.cells_for_rect(&r));
        let mut d = Diagnostics::new();
        let fixed = PlacementRequest { id: "f".into(), path: String::new(), candidates: vec![Candidate { rect: r, anchor: AnchorUsed::Fixed }], fixed: true };
        let out = place_all(&[fixed], &mut g, DEFAULT_BUDGET, &mut d);
        assert_eq!(out[0].bbox, r);
        assert_eq!(d.items()[0].code, "FixedOverlap");
    }

    #[test]
    fn segment_cells() {
        let g = OccupancyGrid::new(40.0, 40.0, 4.0);
        let cells = g.cells_for_segment(Point::new(2.0, 2.0), Point::new(38.0, 2.0), 0.5);
        assert_eq!(cells.len(), 10);
        let diag = g.cells_for_segment(Point::new(2.0, 2.0), Point::new(38.0, 38.0), 0.0);
        assert!(diag.len() >= 10);
        for i in 0..10 {
            assert!(diag.contains(&(i * 10 + i)));
        }
    }

    #[test]
    fn polygon_fill() {
        let g = OccupancyGrid::new(40.0, 40.0, 4.0);
        let square = [Point::new(0.0, 0.0), Point::new(8.0, 0.0), Point::new(8.0, 8.0), Point::new(0.0, 8.0)];
        assert_eq!(g.cells_for_polygon_fill(&square), vec![0, 1, 10, 11]);
    }
}
