//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Pinned tolerances:
//! - portability: connector endpoint within the mark bbox inflated by 1 px;
//!   three compiles in under 1 s total.
//! - soundness: zero shared cells; bbox overlap with obstacles at most one
//!   cell (4 px) in its smaller dimension.
//! - expression oracle: exact row-set equality.
//! - determinism: byte-identical SVG and identical placements.
//! - brevity: at most 30 pretty-printed lines of annotations per demo.
//! - ensembles: depth-3 chain in at most 4 rounds.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use annogram::data::{Column, ColumnType, DataTable, Value};
use annogram::diag::Diagnostics;
use annogram::expr::{parse_expr, select_rows};
use annogram::geom::{Point, Rect};
use annogram::pipeline::{compile_str, CompileError, Options, Output};
use annogram::placement::{place_all, AnchorUsed, Candidate, OccupancyGrid, PlacementRequest};
use annogram::scene::{AxisPartKind, Geometry, SemanticTag};
use annogram::spec::{
    parse_spec_str, serialize_spec_string, DataSelector, Ensemble, IndicatorKind, PositionKind, Shape, Space, Spec,
    Target,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CELL: f64 = 4.0;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn compile(text: &str) -> Result<Output, CompileError> {
    compile_str(text, Path::new("."), &Options::default())
}

// ---------------------------------------------------------------- 1

const PORTABLE_BLOCK: &str = r#"[{"targets": [{"dataPoint": {"expr": "datum.sales == max(sales)"}}],
  "text": {"content": "Best month"}, "connector": {"markers": "arrow-end"}}]"#;

fn portability() -> Verdict {
    let data = r#"[{"month": "Jan", "sales": 12}, {"month": "Feb", "sales": 19}, {"month": "Mar", "sales": 31},
                   {"month": "Apr", "sales": 24}, {"month": "May", "sales": 17}]"#;
    let start = Instant::now();
    let mut notes = Vec::new();
    for mark in ["bar", "line", "point"] {
        let doc = format!(
            r#"{{"chart": {{"mark": "{mark}", "encoding": {{"x": {{"field": "month", "type": "ordinal"}},
                "y": {{"field": "sales", "type": "quantitative"}}}}}},
              "data": {{"values": {data}}}, "annotations": {PORTABLE_BLOCK}}}"#
        );
        let out = compile(&doc).map_err(|e| format!("{mark}: {e}"))?;
        let conn = out
            .annotations
            .iter()
            .find(|a| a.id == "anno/0/connector")
            .ok_or(format!("{mark}: no connector"))?;
        let annogram::assemble::AnnoGeometry::Strokes { paths, .. } = &conn.geometry else {
            return Err(format!("{mark}: connector is not a stroke"));
        };
        let end = paths.first().and_then(|p| p.last_point()).ok_or(format!("{mark}: empty connector"))?;
        let mark_box = out.scene.mark_for_row(2).ok_or(format!("{mark}: no mark for row 2"))?.bbox.inflate(1.0);
        if !(end.x >= mark_box.x && end.x <= mark_box.right() && end.y >= mark_box.y && end.y <= mark_box.bottom()) {
            return Err(format!("{mark}: endpoint {end:?} outside {mark_box:?}"));
        }
        notes.push(format!("{mark} ok"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        return Err(format!("took {elapsed:.3}s"));
    }
    Ok(format!("{} in {:.0} ms", notes.join(", "), elapsed * 1000.0))
}

// ---------------------------------------------------------------- 2

/// Cells of the half-open grid overlapping `r` (open-interval test).
fn oracle_rect_cells(r: &Rect, cols: usize, rows: usize) -> HashSet<usize> {
    let mut out = HashSet::new();
    for row in 0..rows {
        for col in 0..cols {
            let (x0, y0) = (col as f64 * CELL, row as f64 * CELL);
            if x0 < r.x + r.w && r.x < x0 + CELL && y0 < r.y + r.h && r.y < y0 + CELL {
                out.insert(row * cols + col);
            }
        }
    }
    out
}

fn dist_point_rect(p: Point, x0: f64, y0: f64) -> f64 {
    let dx = (x0 - p.x).max(0.0).max(p.x - (x0 + CELL));
    let dy = (y0 - p.y).max(0.0).max(p.y - (y0 + CELL));
    (dx * dx + dy * dy).sqrt()
}

/// Cells a stroked segment touches, by dense sampling.
fn oracle_segment_cells(a: Point, b: Point, hw: f64, cols: usize, rows: usize, out: &mut HashSet<usize>) {
    let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let n = (len / 0.05).ceil().max(1.0) as usize;
    let reach = hw - 1e-6;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let p = Point { x: a.x + (b.x - a.x) * t, y: a.y + (b.y - a.y) * t };
        let c0 = (((p.x - hw) / CELL).floor().max(0.0)) as usize;
        let r0 = (((p.y - hw) / CELL).floor().max(0.0)) as usize;
        for row in r0..=((p.y + hw) / CELL).floor() as usize {
            for col in c0..=((p.x + hw) / CELL).floor() as usize {
                if row < rows && col < cols && dist_point_rect(p, col as f64 * CELL, row as f64 * CELL) < reach {
                    out.insert(row * cols + col);
                }
            }
        }
    }
}

fn ray_inside(p: Point, poly: &[Point]) -> bool {
    let mut crossings = 0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x > p.x {
                crossings += 1;
            }
        }
    }
    crossings % 2 == 1
}

struct Obstacles {
    cells: HashSet<usize>,
    boxes: Vec<Rect>,
}

/// Scene occupancy computed independently of the placement module.
fn oracle_obstacles(out: &Output) -> Obstacles {
    let cols = (out.scene.width / CELL).ceil() as usize;
    let rows = (out.scene.height / CELL).ceil() as usize;
    let mut cells = HashSet::new();
    let mut boxes = Vec::new();
    for n in out.scene.nodes() {
        let skip = !n.style.visible
            || matches!(n.tag, SemanticTag::PlotArea | SemanticTag::AxisPart { part: AxisPartKind::Grid, .. });
        if skip {
            continue;
        }
        let hw = n.style.stroke_width.max(1.0) / 2.0;
        match &n.geometry {
            Geometry::None => {}
            Geometry::Rect { rect } => {
                cells.extend(oracle_rect_cells(rect, cols, rows));
                boxes.push(*rect);
            }
            Geometry::Circle { cx, cy, r } => {
                let b = Rect { x: cx - r, y: cy - r, w: 2.0 * r, h: 2.0 * r };
                cells.extend(oracle_rect_cells(&b, cols, rows));
                boxes.push(b);
            }
            Geometry::Text { run } => {
                let b = run.bbox();
                cells.extend(oracle_rect_cells(&b, cols, rows));
                boxes.push(b);
            }
            Geometry::Line { from, to } => oracle_segment_cells(*from, *to, hw, cols, rows, &mut cells),
            Geometry::Polyline { points } => {
                for w in points.windows(2) {
                    oracle_segment_cells(w[0], w[1], hw, cols, rows, &mut cells);
                }
            }
            Geometry::Path { points } => {
                for row in 0..rows {
                    for col in 0..cols {
                        let c = Point { x: (col as f64 + 0.5) * CELL, y: (row as f64 + 0.5) * CELL };
                        if ray_inside(c, points) {
                            cells.insert(row * cols + col);
                        }
                    }
                }
                for i in 0..points.len() {
                    oracle_segment_cells(points[i], points[(i + 1) % points.len()], hw, cols, rows, &mut cells);
                }
            }
        }
    }
    Obstacles { cells, boxes }
}

fn random_chart(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..=30usize);
    let mark = ["bar", "line", "point", "area"][rng.random_range(0..4)];
    let discrete_x = mark == "bar" || rng.random_bool(0.4);
    let mut rows = Vec::new();
    for i in 0..n {
        let x = if discrete_x { format!("\"c{i}\"") } else { format!("{}", rng.random_range(0..1000) as f64 / 10.0) };
        rows.push(format!(r#"{{"x": {x}, "y": {}}}"#, rng.random_range(0..500) as f64 / 10.0));
    }
    let xtype = if discrete_x { "nominal" } else { "quantitative" };
    let title = if rng.random_bool(0.5) { r#", "title": "Random chart""# } else { "" };
    let k = rng.random_range(1..=4usize);
    let mut annos = Vec::new();
    for _ in 0..k {
        let target = match rng.random_range(0..5) {
            0 => r#""none""#.to_string(),
            1 | 2 => format!(r#"{{"dataPoint": {{"indices": [{}]}}}}"#, rng.random_range(0..n)),
            3 => r#"{"dataPoint": {"expr": "datum.y == max(y)"}}"#.to_string(),
            _ => r#"{"axis": {"axis": "y", "parts": "tick-label"}}"#.to_string(),
        };
        let anchors = ["upLeft", "up", "upRight", "midLeft", "midRight", "downLeft", "down", "downRight"];
        let position = match rng.random_range(0..6) {
            0 => format!(r#", "position": {{"anchor": "{}"}}"#, anchors[rng.random_range(0..anchors.len())]),
            1 if target != r#""none""# => r#", "position": {"anchor1D": "auto"}"#.to_string(),
            _ => String::new(),
        };
        let words = rng.random_range(1..=3);
        let content: Vec<&str> = (0..words).map(|_| ["peak", "note", "outlier", "drop", "Q3"][rng.random_range(0..5)]).collect();
        annos.push(format!(r#"{{"targets": [{target}], "text": {{"content": "{}"{position}}}}}"#, content.join(" ")));
    }
    format!(
        r#"{{"chart": {{"mark": "{mark}"{title}, "encoding": {{"x": {{"field": "x", "type": "{xtype}"}},
            "y": {{"field": "y", "type": "quantitative"}}}}}},
          "data": {{"values": [{}]}}, "annotations": [{}]}}"#,
        rows.join(", "),
        annos.join(", ")
    )
}

fn soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut placed, mut fallbacks, mut shadowed) = (0, 0, 0);
    for chart in 0..200 {
        let doc = random_chart(&mut rng);
        let out = compile(&doc).map_err(|e| format!("chart {chart}: {e}\n{doc}"))?;
        let obs = oracle_obstacles(&out);
        let cols = (out.scene.width / CELL).ceil() as usize;
        let rows = (out.scene.height / CELL).ceil() as usize;
        let canvas = out.scene.canvas();
        let cells: Vec<HashSet<usize>> = out.placements.iter().map(|p| oracle_rect_cells(&p.bbox, cols, rows)).collect();
        for (i, p) in out.placements.iter().enumerate() {
            placed += 1;
            if p.fallback {
                fallbacks += 1;
                continue;
            }
            if !canvas.contains_rect(&p.bbox, 1e-9) {
                return Err(format!("chart {chart}: {} off canvas", p.id));
            }
            if let Some(c) = cells[i].intersection(&obs.cells).next() {
                return Err(format!("chart {chart}: {} shares cell {c} with the chart\n{doc}", p.id));
            }
            // A fallback box is the one that failed; conflicts it causes count
            // against it, not against the clean placement underneath.
            for (j, q) in out.placements.iter().enumerate() {
                if q.fallback && !cells[i].is_disjoint(&cells[j]) {
                    shadowed += 1;
                }
                if i != j && !q.fallback && !cells[i].is_disjoint(&cells[j]) {
                    return Err(format!("chart {chart}: {} {:?} shares cells with {} {:?}\n{doc}", p.id, p, q.id, q));
                }
            }
            for b in obs.boxes.iter().chain(out.placements.iter().enumerate().filter(|(j, q)| *j != i && !q.fallback).map(|(_, q)| &q.bbox)) {
                let iw = (p.bbox.right().min(b.right()) - p.bbox.x.max(b.x)).max(0.0);
                let ih = (p.bbox.bottom().min(b.bottom()) - p.bbox.y.max(b.y)).max(0.0);
                if iw.min(ih) > CELL {
                    return Err(format!("chart {chart}: {} overlaps {b:?} by {iw:.2}x{ih:.2}", p.id));
                }
            }
        }
    }
    Ok(format!(
        "200 charts, {placed} placements, {fallbacks} fallback ({shadowed} overlapping a clean box), 0 violations"
    ))
}

// ---------------------------------------------------------------- 3

struct Instance {
    cols: usize,
    rows: usize,
    blocked: HashSet<usize>,
    /// Candidate cell rectangles `(col, row, w, h)` per request.
    cands: Vec<Vec<(usize, usize, usize, usize)>>,
}

fn inst_cells(c: (usize, usize, usize, usize), cols: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for r in c.1..c.1 + c.3 {
        for k in c.0..c.0 + c.2 {
            out.push(r * cols + k);
        }
    }
    out
}

fn exhaustive(inst: &Instance) -> bool {
    let sets: Vec<Vec<Option<HashSet<usize>>>> = inst
        .cands
        .iter()
        .map(|cs| {
            cs.iter()
                .map(|c| {
                    let cells: HashSet<usize> = inst_cells(*c, inst.cols).into_iter().collect();
                    (c.0 + c.2 <= inst.cols && c.1 + c.3 <= inst.rows && cells.is_disjoint(&inst.blocked)).then_some(cells)
                })
                .collect()
        })
        .collect();
    let n = sets.len();
    let mut idx = vec![0usize; n];
    loop {
        let picked: Vec<&Option<HashSet<usize>>> = (0..n).map(|i| &sets[i][idx[i]]).collect();
        if picked.iter().all(|p| p.is_some()) {
            let mut ok = true;
            'pairs: for a in 0..n {
                for b in a + 1..n {
                    if !picked[a].as_ref().unwrap().is_disjoint(picked[b].as_ref().unwrap()) {
                        ok = false;
                        break 'pairs;
                    }
                }
            }
            if ok {
                return true;
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            idx[k] += 1;
            if idx[k] < sets[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// First feasible candidate per request in order, without revisiting.
fn greedy_solves(inst: &Instance) -> bool {
    let mut taken = inst.blocked.clone();
    for cs in &inst.cands {
        let pick = cs.iter().find(|c| {
            c.0 + c.2 <= inst.cols && c.1 + c.3 <= inst.rows && inst_cells(**c, inst.cols).iter().all(|x| !taken.contains(x))
        });
        match pick {
            Some(c) => taken.extend(inst_cells(*c, inst.cols)),
            None => return false,
        }
    }
    true
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let (cols, rows) = (rng.random_range(6..=12), rng.random_range(6..=12));
    let mut blocked = HashSet::new();
    for _ in 0..rng.random_range(0..cols * rows / 3) {
        blocked.insert(rng.random_range(0..cols * rows));
    }
    let n = rng.random_range(2..=4);
    let cands = (0..n)
        .map(|_| {
            // Candidates cluster around a shared hot spot so requests compete.
            let (hx, hy) = (cols / 2, rows / 2);
            (0..rng.random_range(1..=6))
                .map(|_| {
                    let (w, h) = (rng.random_range(1..=4), rng.random_range(1..=3));
                    let x = (hx as i64 + rng.random_range(-4..=3)).clamp(0, cols as i64 - 1) as usize;
                    let y = (hy as i64 + rng.random_range(-4..=3)).clamp(0, rows as i64 - 1) as usize;
                    (x, y, w, h)
                })
                .collect()
        })
        .collect();
    Instance { cols, rows, blocked, cands }
}

fn completeness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut solvable, mut unsolvable, mut backtracking) = (0, 0, 0);
    let mut tries = 0;
    while solvable < 50 {
        tries += 1;
        if tries > 100_000 {
            return Err("could not generate instances".into());
        }
        let inst = random_instance(&mut rng);
        let feasible = exhaustive(&inst);
        let needs_backtracking = feasible && !greedy_solves(&inst);
        // Keep at least half of the solvable set to instances where greedy fails.
        if feasible && !needs_backtracking && solvable - backtracking >= 25 {
            continue;
        }
        let mut grid = OccupancyGrid::new(inst.cols as f64 * CELL, inst.rows as f64 * CELL, CELL);
        grid.mark(&inst.blocked.iter().copied().collect::<Vec<_>>());
        let requests: Vec<PlacementRequest> = inst
            .cands
            .iter()
            .enumerate()
            .map(|(i, cs)| PlacementRequest {
                id: format!("r{i}"),
                path: String::new(),
                candidates: cs
                    .iter()
                    .map(|c| Candidate {
                        rect: Rect {
                            x: c.0 as f64 * CELL,
                            y: c.1 as f64 * CELL,
                            w: c.2 as f64 * CELL,
                            h: c.3 as f64 * CELL,
                        },
                        anchor: AnchorUsed::Fixed,
                    })
                    .collect(),
                fixed: false,
            })
            .collect();
        let res = place_all(&requests, &mut grid, annogram::placement::DEFAULT_BUDGET, &mut Diagnostics::new());
        let all_clean = res.iter().all(|r| !r.fallback);
        if feasible != all_clean {
            return Err(format!("instance {tries}: oracle says {feasible}, placement clean = {all_clean}"));
        }
        if feasible {
            solvable += 1;
            if needs_backtracking {
                backtracking += 1;
            }
        } else {
            unsolvable += 1;
        }
    }
    Ok(format!("50/50 solvable instances placed without fallback ({backtracking} need backtracking); {unsolvable} infeasible instances agree"))
}

// ---------------------------------------------------------------- 4

#[derive(Debug, Clone)]
enum E {
    Num(f64),
    Str(String),
    Bool(bool),
    Date(String),
    Field(&'static str),
    Agg(&'static str, &'static str),
    Neg(Box<E>),
    Not(Box<E>),
    Bin(&'static str, Box<E>, Box<E>),
}

#[derive(Debug, Clone, PartialEq)]
enum V {
    N(f64),
    S(String),
    T(i64),
    B(bool),
}

impl E {
    fn src(&self) -> String {
        match self {
            E::Num(n) if *n < 0.0 => format!("({n})"),
            E::Num(n) => format!("{n}"),
            E::Str(s) | E::Date(s) => format!("\"{s}\""),
            E::Bool(b) => b.to_string(),
            E::Field(f) => format!("datum.{f}"),
            E::Agg(f, c) => format!("{f}({c})"),
            E::Neg(e) => format!("-({})", e.src()),
            E::Not(e) => format!("!({})", e.src()),
            E::Bin(op, l, r) => format!("({} {op} {})", l.src(), r.src()),
        }
    }
}

fn gen_num(rng: &mut ChaCha8Rng, d: usize) -> E {
    let pick = if d == 0 { rng.random_range(0..3) } else { rng.random_range(0..6) };
    match pick {
        0 => E::Num(f64::from(rng.random_range(-20..=20)) / 2.0),
        1 => E::Field(["a", "b"][rng.random_range(0..2)]),
        2 => E::Agg(["min", "max", "mean", "sum", "count"][rng.random_range(0..5)], ["a", "b"][rng.random_range(0..2)]),
        3 => E::Neg(Box::new(gen_num(rng, d - 1))),
        _ => E::Bin(["+", "-", "*", "/"][rng.random_range(0..4)], Box::new(gen_num(rng, d - 1)), Box::new(gen_num(rng, d - 1))),
    }
}

fn gen_bool(rng: &mut ChaCha8Rng, d: usize) -> E {
    let cmp = ["<", "<=", ">", ">=", "==", "!="];
    let pick = if d == 0 { rng.random_range(0..1) } else { rng.random_range(0..7) };
    match pick {
        0 => E::Bool(rng.random_bool(0.5)),
        1 | 2 => E::Bin(cmp[rng.random_range(0..6)], Box::new(gen_num(rng, d - 1)), Box::new(gen_num(rng, d - 1))),
        3 => {
            let lit = E::Str(["x", "y", "z", "yy"][rng.random_range(0..4)].into());
            E::Bin(cmp[rng.random_range(0..6)], Box::new(E::Field("s")), Box::new(lit))
        }
        4 => {
            let rhs = if rng.random_bool(0.5) {
                E::Date(format!("2024-0{}-1{}", rng.random_range(1..=9), rng.random_range(0..=9)))
            } else {
                E::Agg(["min", "max"][rng.random_range(0..2)], "t")
            };
            E::Bin(cmp[rng.random_range(0..6)], Box::new(E::Field("t")), Box::new(rhs))
        }
        5 => E::Not(Box::new(gen_bool(rng, d - 1))),
        _ => E::Bin(["&&", "||"][rng.random_range(0..2)], Box::new(gen_bool(rng, d - 1)), Box::new(gen_bool(rng, d - 1))),
    }
}

struct NaiveTable {
    a: Vec<Option<f64>>,
    b: Vec<Option<f64>>,
    s: Vec<Option<String>>,
    t: Vec<i64>,
}

fn naive_date(s: &str) -> i64 {
    chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
        .and_utc()
        .timestamp_millis()
}

/// `Err(())` marks a row excluded by an evaluation failure.
fn naive_eval(e: &E, t: &NaiveTable, row: usize) -> Result<V, ()> {
    let col = |c: &str| -> Vec<Option<f64>> {
        match c {
            "a" => t.a.clone(),
            "b" => t.b.clone(),
            _ => t.t.iter().map(|v| Some(*v as f64)).collect(),
        }
    };
    Ok(match e {
        E::Num(n) => V::N(*n),
        E::Str(s) => V::S(s.clone()),
        E::Date(s) => V::T(naive_date(s)),
        E::Bool(b) => V::B(*b),
        E::Field("a") => V::N(t.a[row].ok_or(())?),
        E::Field("b") => V::N(t.b[row].ok_or(())?),
        E::Field("s") => V::S(t.s[row].clone().ok_or(())?),
        E::Field(_) => V::T(t.t[row]),
        E::Agg(f, c) => {
            let vals: Vec<f64> = col(c).into_iter().flatten().collect();
            let v = match *f {
                "count" => vals.len() as f64,
                "sum" => vals.iter().sum(),
                "mean" if vals.is_empty() => return Err(()),
                "mean" => vals.iter().sum::<f64>() / vals.len() as f64,
                _ if vals.is_empty() => return Err(()),
                "min" => vals.iter().copied().fold(f64::INFINITY, f64::min),
                _ => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            };
            if *c == "t" {
                V::T(v as i64)
            } else {
                V::N(v)
            }
        }
        E::Neg(x) => match naive_eval(x, t, row)? {
            V::N(n) => V::N(-n),
            _ => unreachable!(),
        },
        E::Not(x) => match naive_eval(x, t, row)? {
            V::B(b) => V::B(!b),
            _ => unreachable!(),
        },
        E::Bin(op, l, r) if *op == "&&" || *op == "||" => {
            let V::B(lv) = naive_eval(l, t, row)? else { unreachable!() };
            if (*op == "&&" && !lv) || (*op == "||" && lv) {
                V::B(lv)
            } else {
                naive_eval(r, t, row)?
            }
        }
        E::Bin(op, l, r) => {
            let (lv, rv) = (naive_eval(l, t, row)?, naive_eval(r, t, row)?);
            match (lv, rv) {
                (V::N(x), V::N(y)) if matches!(*op, "+" | "-" | "*" | "/") => {
                    let v = match *op {
                        "+" => x + y,
                        "-" => x - y,
                        "*" => x * y,
                        _ if y == 0.0 => return Err(()),
                        _ => x / y,
                    };
                    if !v.is_finite() {
                        return Err(());
                    }
                    V::N(v)
                }
                (x, y) => {
                    let ord = match (&x, &y) {
                        (V::N(p), V::N(q)) => p.partial_cmp(q).unwrap(),
                        (V::S(p), V::S(q)) => p.cmp(q),
                        (V::T(p), V::T(q)) => p.cmp(q),
                        (V::B(p), V::B(q)) => p.cmp(q),
                        _ => unreachable!("{x:?} {y:?}"),
                    };
                    use std::cmp::Ordering::*;
                    V::B(match *op {
                        "<" => ord == Less,
                        "<=" => ord != Greater,
                        ">" => ord == Greater,
                        ">=" => ord != Less,
                        "==" => ord == Equal,
                        _ => ord != Equal,
                    })
                }
            }
        }
    })
}

fn expression_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nonempty = 0;
    for case in 0..1000 {
        let n = rng.random_range(0..=50usize);
        let nt = NaiveTable {
            a: (0..n).map(|_| rng.random_bool(0.9).then(|| f64::from(rng.random_range(-10..=10)))).collect(),
            b: (0..n).map(|_| rng.random_bool(0.9).then(|| f64::from(rng.random_range(-40..=40)) / 4.0)).collect(),
            s: (0..n).map(|_| rng.random_bool(0.9).then(|| ["x", "y", "z", "yy", "w"][rng.random_range(0..5)].to_string())).collect(),
            t: (0..n).map(|_| naive_date(&format!("2024-0{}-1{}", rng.random_range(1..=9), rng.random_range(0..=9)))).collect(),
        };
        let num = |v: &Option<f64>| v.map_or(Value::Null, Value::Number);
        let rows: Vec<Vec<Value>> = (0..n)
            .map(|i| {
                vec![
                    num(&nt.a[i]),
                    num(&nt.b[i]),
                    nt.s[i].clone().map_or(Value::Null, Value::String),
                    Value::Temporal(nt.t[i]),
                ]
            })
            .collect();
        let cols = vec![
            Column { name: "a".into(), ty: ColumnType::Number },
            Column { name: "b".into(), ty: ColumnType::Number },
            Column { name: "s".into(), ty: ColumnType::String },
            Column { name: "t".into(), ty: ColumnType::Temporal },
        ];
        let table = DataTable::new(cols, rows).map_err(|e| e.to_string())?;
        let depth = rng.random_range(1..=4);
        let e = gen_bool(&mut rng, depth);
        let src = e.src();
        let parsed = parse_expr(&src, &table.schema()).map_err(|err| format!("case {case}: `{src}`: {err}"))?;
        let got = select_rows(&parsed, &table, &mut Diagnostics::new()).map_err(|err| format!("case {case}: `{src}`: {err}"))?;
        let want: Vec<usize> = (0..n).filter(|&r| naive_eval(&e, &nt, r) == Ok(V::B(true))).collect();
        if got != want {
            return Err(format!("case {case}: `{src}`: got {got:?}, oracle {want:?}"));
        }
        if !want.is_empty() {
            nonempty += 1;
        }
    }
    Ok(format!("1000/1000 expressions agree ({nonempty} with non-empty selections)"))
}

// ---------------------------------------------------------------- 5, 6

fn corpus() -> Vec<(String, String)> {
    let dir = manifest().join("tests/corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("corpus dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

fn determinism() -> Verdict {
    let specs = corpus();
    for (name, text) in &specs {
        let a = compile(text).map_err(|e| format!("{name}: {e}"))?;
        let b = compile(text).map_err(|e| format!("{name}: {e}"))?;
        if a.svg != b.svg {
            return Err(format!("{name}: SVG differs between runs"));
        }
        if a.placements != b.placements {
            return Err(format!("{name}: placements differ between runs"));
        }
    }
    Ok(format!("{} corpus specs byte-identical across two runs", specs.len()))
}

#[derive(Default)]
struct Coverage(HashSet<&'static str>);

impl Coverage {
    fn scan(&mut self, s: &Spec) {
        for root in &s.annotations {
            for t in &root.targets {
                self.0.insert(match t {
                    Target::ById(_) => "target:id",
                    Target::Fixed(fp) if fp.space == Space::Data => "target:fixed-data",
                    Target::Fixed(_) => "target:fixed-pixel",
                    Target::ChartPart(_) => "target:chartPart",
                    Target::DataPoint(DataSelector::Indices(_)) => "target:dataPoint-indices",
                    Target::DataPoint(DataSelector::Expr(_)) => "target:dataPoint-expr",
                    Target::Axis { .. } => "target:axis",
                    Target::None => "target:none",
                });
            }
            let positions = [
                root.text.as_ref().and_then(|t| t.body.position.as_ref()),
                root.enclosure.as_ref().and_then(|t| t.body.position.as_ref()),
            ];
            for p in positions.into_iter().flatten() {
                self.0.insert(match &p.kind {
                    PositionKind::Fixed(fp) if fp.space == Space::Data => "fixed:data",
                    PositionKind::Fixed(_) => "fixed:pixel",
                    PositionKind::Anchor2D(_) => "anchor2D",
                    PositionKind::Anchor1D(_) => "anchor1D",
                });
            }
            if root.text.is_some() {
                self.0.insert("effect:text");
            }
            if let Some(e) = &root.enclosure {
                self.0.insert("effect:enclosure");
                self.0.insert(match e.body.shape {
                    Shape::Rect => "shape:rect",
                    Shape::Ellipse => "shape:ellipse",
                    Shape::Path(_) => "shape:path",
                });
            }
            if root.connector.is_some() {
                self.0.insert("effect:connector");
            }
            if let Some(i) = &root.indicator {
                self.0.insert(match i.body.kind {
                    IndicatorKind::Line => "indicator:line",
                    IndicatorKind::Area => "indicator:area",
                    IndicatorKind::Arrow => "indicator:arrow",
                });
            }
        }
        for e in &s.ensembles {
            self.0.insert(match e {
                Ensemble::Reference { .. } => "ensemble:reference",
                Ensemble::Composite { .. } => "ensemble:composite",
            });
        }
    }
}

const REQUIRED: &[&str] = &[
    "target:id",
    "target:fixed-data",
    "target:fixed-pixel",
    "target:chartPart",
    "target:dataPoint-indices",
    "target:dataPoint-expr",
    "target:axis",
    "target:none",
    "fixed:data",
    "fixed:pixel",
    "anchor1D",
    "anchor2D",
    "effect:text",
    "effect:enclosure",
    "effect:connector",
    "indicator:line",
    "indicator:area",
    "indicator:arrow",
    "ensemble:reference",
    "ensemble:composite",
];

fn round_trip() -> Verdict {
    let specs = corpus();
    if specs.len() < 25 {
        return Err(format!("corpus has {} specs, need 25", specs.len()));
    }
    let mut cov = Coverage::default();
    for (name, text) in &specs {
        let s1 = parse_spec_str(text).map_err(|e| format!("{name}: {e}"))?;
        let out1 = serialize_spec_string(&s1);
        let s2 = parse_spec_str(&out1).map_err(|e| format!("{name}: reparse: {e}"))?;
        if s1 != s2 {
            return Err(format!("{name}: parse(serialize(s)) != s"));
        }
        if serialize_spec_string(&s2) != out1 {
            return Err(format!("{name}: serialization is not a fixpoint"));
        }
        cov.scan(&s1);
    }
    let missing: Vec<&&str> = REQUIRED.iter().filter(|r| !cov.0.contains(**r)).collect();
    if !missing.is_empty() {
        return Err(format!("corpus lacks {missing:?}"));
    }
    Ok(format!("{} specs reach a fixpoint; all {} grammar features covered", specs.len(), REQUIRED.len()))
}

// ---------------------------------------------------------------- 7

fn single_effect() -> Verdict {
    let base = r#"{"chart": {"mark": "point", "encoding": {"x": {"field": "a", "type": "quantitative"},
        "y": {"field": "b", "type": "quantitative"}}}, "data": {"values": [{"a": 1, "b": 2}]}, "annotations": ANNOS}"#;
    let cases = [
        (
            r#"[{"targets": ["none"], "text": {"content": "ok"}},
                {"targets": ["none"], "enclosure": {}, "text": {"content": "a"}, "enclosure": {"padding": 1}}]"#,
            "/annotations/1/enclosure",
        ),
        (r#"[{"targets": ["none"], "connector": [{}, {"markers": "arrow-end"}]}]"#, "/annotations/0/connector/1"),
    ];
    for (annos, path) in cases {
        let e = compile(&base.replace("ANNOS", annos)).err().ok_or("duplicate effects accepted")?;
        if e.code() != "MultipleEffectsOfType" || e.path() != path {
            return Err(format!("got {} at {}, want MultipleEffectsOfType at {path}", e.code(), e.path()));
        }
    }
    Ok("duplicate key and array forms rejected with MultipleEffectsOfType at the offending node".into())
}

// ---------------------------------------------------------------- 8

fn brevity() -> Verdict {
    let mut report = Vec::new();
    let mut worst = 0;
    for demo in ["bar", "line", "scatter"] {
        let text = std::fs::read_to_string(manifest().join(format!("../../demos/{demo}.json"))).map_err(|e| e.to_string())?;
        parse_spec_str(&text).map_err(|e| format!("{demo}: {e}"))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let mut m = serde_json::Map::new();
        m.insert("annotations".into(), v["annotations"].clone());
        if let Some(e) = v.get("ensembles") {
            m.insert("ensembles".into(), e.clone());
        }
        let lines = serde_json::to_string_pretty(&serde_json::Value::Object(m)).unwrap().lines().count();
        worst = worst.max(lines);
        report.push(format!("{demo} {lines}"));
    }
    let msg = format!("annotation lines: {}", report.join(", "));
    if worst <= 30 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- 9

fn ensembles() -> Verdict {
    let chain = r#"{"chart": {"mark": "point", "encoding": {"x": {"field": "a", "type": "quantitative"},
        "y": {"field": "b", "type": "quantitative"}}}, "data": {"values": [{"a": 1, "b": 2}, {"a": 4, "b": 6}]},
      "annotations": [
        {"targets": [{"id": "t2"}], "text": {"id": "t3", "content": "three"}},
        {"targets": [{"id": "t1"}], "text": {"id": "t2", "content": "two"}},
        {"targets": [{"dataPoint": {"indices": [0]}}], "text": {"id": "t1", "content": "one"}}],
      "ensembles": [{"reference": {"from": "t1", "to": "t2"}}, {"reference": {"from": "t2", "to": "t3"}},
                    {"reference": {"from": "t3", "to": "t1"}}]}"#;
    let out = compile(chain).map_err(|e| format!("chain: {e}"))?;
    if out.rounds > 4 {
        return Err(format!("chain took {} rounds", out.rounds));
    }
    let links = out.annotations.iter().filter(|a| a.id.starts_with("ref/")).count();
    if links != 3 {
        return Err(format!("expected 3 reference links, got {links}"));
    }
    let cycle = chain
        .replace(r#"[{"dataPoint": {"indices": [0]}}], "text": {"id": "t1""#, r#"[{"id": "t3"}], "text": {"id": "t1""#);
    let start = Instant::now();
    let e = compile(&cycle).err().ok_or("cycle compiled")?;
    if e.code() != "CycleUnresolved" {
        return Err(format!("cycle gave {}", e.code()));
    }
    Ok(format!(
        "depth-3 chain resolved in {} rounds; positional cycle -> CycleUnresolved in {:.1} ms",
        out.rounds,
        start.elapsed().as_secs_f64() * 1000.0
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("portability across bar/line/point", portability),
        ("occlusion soundness (200 random charts)", soundness),
        ("backtracking completeness (50 instances)", completeness),
        ("expression oracle (1000 expressions)", expression_oracle),
        ("determinism", determinism),
        ("grammar round-trip", round_trip),
        ("single effect per type", single_effect),
        ("annotation brevity (demos)", brevity),
        ("ensemble resolution", ensembles),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {}: {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}: {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
