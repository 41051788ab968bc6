//! SVG path data (`d` attribute) parsing, normalized to absolute commands.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{Point, Rect};
use crate::scene::points_bbox;

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    MoveTo(Point),
    LineTo(Point),
    CubicTo(Point, Point, Point),
    QuadTo(Point, Point),
    ArcTo {
        rx: f64,
        ry: f64,
        rotation: f64,
        large_arc: bool,
        sweep: bool,
        to: Point,
    },
    Close,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid path data at offset {pos}: {message}")]
pub struct PathError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathData {
    pub segments: Vec<Segment>,
}

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl Cursor<'_> {
    fn skip_sep(&mut self) {
        while self.i < self.s.len() && (self.s[self.i].is_ascii_whitespace() || self.s[self.i] == b',') {
            self.i += 1;
        }
    }

    fn err(&self, message: &str) -> PathError {
        PathError { pos: self.i, message: message.into() }
    }

    fn at_number(&mut self) -> bool {
        self.skip_sep();
        matches!(self.s.get(self.i), Some(c) if c.is_ascii_digit() || matches!(c, b'-' | b'+' | b'.'))
    }

    fn number(&mut self) -> Result<f64, PathError> {
        self.skip_sep();
        let start = self.i;
        if matches!(self.s.get(self.i), Some(b'-' | b'+')) {
            self.i += 1;
        }
        let mut digits = 0;
        while matches!(self.s.get(self.i), Some(c) if c.is_ascii_digit()) {
            self.i += 1;
            digits += 1;
        }
        if self.s.get(self.i) == Some(&b'.') {
            self.i += 1;
            while matches!(self.s.get(self.i), Some(c) if c.is_ascii_digit()) {
                self.i += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            self.i = start;
            return Err(self.err("expected a number"));
        }
        if matches!(self.s.get(self.i), Some(b'e' | b'E')) {
            let save = self.i;
            self.i += 1;
            if matches!(self.s.get(self.i), Some(b'-' | b'+')) {
                self.i += 1;
            }
            if matches!(self.s.get(self.i), Some(c) if c.is_ascii_digit()) {
                while matches!(self.s.get(self.i), Some(c) if c.is_ascii_digit()) {
                    self.i += 1;
                }
            } else {
                self.i = save;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| PathError { pos: start, message: format!("bad number `{text}`") })
    }

    fn flag(&mut self) -> Result<bool, PathError> {
        self.skip_sep();
        match self.s.get(self.i) {
            Some(b'0') => {
                self.i += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.i += 1;
                Ok(true)
            }
            _ => Err(self.err("expected arc flag 0 or 1")),
        }
    }
}

impl PathData {
    pub fn parse(d: &str) -> Result<Self, PathError> {
        let mut c = Cursor { s: d.as_bytes(), i: 0 };
        let mut segs = Vec::new();
        let mut cur = Point::default();
        let mut start = Point::default();
        let mut last_ctrl: Option<(u8, Point)> = None;
        let mut cmd: Option<u8> = None;
        loop {
            c.skip_sep();
            if c.i >= c.s.len() {
                break;
            }
            let ch = c.s[c.i];
            if ch.is_ascii_alphabetic() {
                if !b"MmLlHhVvCcSsQqTtAaZz".contains(&ch) {
                    return Err(c.err("unknown path command"));
                }
                c.i += 1;
                cmd = Some(ch);
            } else if cmd.is_none() {
                return Err(c.err("path must start with a command"));
            } else if matches!(cmd, Some(b'Z' | b'z')) {
                return Err(c.err("numbers after close command"));
            }
            let op = cmd.expect("set above");
            if segs.is_empty() && !matches!(op, b'M' | b'm') {
                return Err(c.err("path must start with a moveto"));
            }
            let rel = op.is_ascii_lowercase();
            let base = if rel { cur } else { Point::default() };
            let pt = |c: &mut Cursor, base: Point| -> Result<Point, PathError> {
                let x = c.number()?;
                let y = c.number()?;
                Ok(Point::new(base.x + x, base.y + y))
            };
            let reflect = |kind: u8| match last_ctrl {
                Some((k, p)) if k == kind => Point::new(2.0 * cur.x - p.x, 2.0 * cur.y - p.y),
                _ => cur,
            };
            let mut ctrl = None;
            match op.to_ascii_uppercase() {
                b'M' => {
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::MoveTo(p));
                    cur = p;
                    start = p;
                    // Subsequent pairs are implicit linetos.
                    cmd = Some(if rel { b'l' } else { b'L' });
                }
                b'L' => {
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::LineTo(p));
                    cur = p;
                }
                b'H' => {
                    let x = c.number()? + if rel { cur.x } else { 0.0 };
                    cur = Point::new(x, cur.y);
                    segs.push(Segment::LineTo(cur));
                }
                b'V' => {
                    let y = c.number()? + if rel { cur.y } else { 0.0 };
                    cur = Point::new(cur.x, y);
                    segs.push(Segment::LineTo(cur));
                }
                b'C' => {
                    let c1 = pt(&mut c, base)?;
                    let c2 = pt(&mut c, base)?;
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::CubicTo(c1, c2, p));
                    ctrl = Some((b'C', c2));
                    cur = p;
                }
                b'S' => {
                    let c1 = reflect(b'C');
                    let c2 = pt(&mut c, base)?;
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::CubicTo(c1, c2, p));
                    ctrl = Some((b'C', c2));
                    cur = p;
                }
                b'Q' => {
                    let q = pt(&mut c, base)?;
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::QuadTo(q, p));
                    ctrl = Some((b'Q', q));
                    cur = p;
                }
                b'T' => {
                    let q = reflect(b'Q');
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::QuadTo(q, p));
                    ctrl = Some((b'Q', q));
                    cur = p;
                }
                b'A' => {
                    let rx = c.number()?.abs();
                    let ry = c.number()?.abs();
                    let rotation = c.number()?;
                    let large_arc = c.flag()?;
                    let sweep = c.flag()?;
                    let p = pt(&mut c, base)?;
                    segs.push(Segment::ArcTo { rx, ry, rotation, large_arc, sweep, to: p });
                    cur = p;
                }
                b'Z' => {
                    segs.push(Segment::Close);
                    cur = start;
                    cmd = Some(b'Z');
                }
                _ => unreachable!(),
            }
            last_ctrl = ctrl;
            if !op.eq_ignore_ascii_case(&b'Z') && !c.at_number() {
                cmd = None;
            }
            if cmd.is_none() {
                c.skip_sep();
                if c.i < c.s.len() && !c.s[c.i].is_ascii_alphabetic() {
                    return Err(c.err("unexpected character"));
                }
            }
        }
        if segs.is_empty() {
            return Err(PathError { pos: 0, message: "empty path".into() });
        }
        Ok(Self { segments: segs })
    }

    /// Box covering all endpoints, control points and arc radii. Contains
    /// the drawn curve but is not always tight.
    pub fn bbox(&self) -> Rect {
        let mut pts = Vec::new();
        let mut cur = Point::default();
        for s in &self.segments {
            match s {
                Segment::MoveTo(p) | Segment::LineTo(p) => pts.push(*p),
                Segment::CubicTo(a, b, p) => pts.extend([*a, *b, *p]),
                Segment::QuadTo(a, p) => pts.extend([*a, *p]),
                Segment::ArcTo { rx, ry, to, .. } => {
                    let r = rx.max(*ry);
                    let c = cur.lerp(*to, 0.5);
                    let reach = r + cur.distance(*to) / 2.0;
                    pts.extend([*to, Point::new(c.x - reach, c.y - reach), Point::new(c.x + reach, c.y + reach)]);
                }
                Segment::Close => {}
            }
            if let Segment::MoveTo(p)
            | Segment::LineTo(p)
            | Segment::CubicTo(_, _, p)
            | Segment::QuadTo(_, p)
            | Segment::ArcTo { to: p, .. } = s
            {
                cur = *p;
            }
        }
        points_bbox(&pts).unwrap_or_default()
    }

    /// Endpoint bbox (ignores control points), used for fitting shapes.
    pub fn endpoint_bbox(&self) -> Rect {
        let pts: Vec<Point> = self
            .segments
            .iter()
            .filter_map(|s| match s {
                Segment::MoveTo(p) | Segment::LineTo(p) | Segment::CubicTo(_, _, p) | Segment::QuadTo(_, p) => Some(*p),
                Segment::ArcTo { to, .. } => Some(*to),
                Segment::Close => None,
            })
            .collect();
        points_bbox(&pts).unwrap_or_default()
    }

    pub fn first_point(&self) -> Option<Point> {
        self.segments.iter().find_map(|s| match s {
            Segment::MoveTo(p) => Some(*p),
            _ => None,
        })
    }

    pub fn last_point(&self) -> Option<Point> {
        self.segments.iter().rev().find_map(|s| match s {
            Segment::MoveTo(p) | Segment::LineTo(p) | Segment::CubicTo(_, _, p) | Segment::QuadTo(_, p) => Some(*p),
            Segment::ArcTo { to, .. } => Some(*to),
            Segment::Close => None,
        })
    }

    /// Endpoints and control points in drawing order.
    fn control_polyline(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for s in &self.segments {
            match s {
                Segment::MoveTo(p) | Segment::LineTo(p) => pts.push(*p),
                Segment::CubicTo(a, b, p) => pts.extend([*a, *b, *p]),
                Segment::QuadTo(a, p) => pts.extend([*a, *p]),
                Segment::ArcTo { to, .. } => pts.push(*to),
                Segment::Close => {}
            }
        }
        pts
    }

    /// `(tip, from)` for an arrowhead at the start of the path: the first
    /// point and the nearest following distinct control point.
    pub fn start_tangent(&self) -> Option<(Point, Point)> {
        let pts = self.control_polyline();
        let tip = *pts.first()?;
        let from = pts.iter().find(|p| p.distance(tip) > 1e-9)?;
        Some((tip, *from))
    }

    /// `(tip, from)` for an arrowhead at the end of the path.
    pub fn end_tangent(&self) -> Option<(Point, Point)> {
        let pts = self.control_polyline();
        let tip = *pts.last()?;
        let from = pts.iter().rev().find(|p| p.distance(tip) > 1e-9)?;
        Some((tip, *from))
    }

    /// Applies `p → (p.x·sx + tx, p.y·sy + ty)`.
    pub fn transform(&self, sx: f64, sy: f64, tx: f64, ty: f64) -> PathData {
        let f = |p: &Point| Point::new(p.x * sx + tx, p.y * sy + ty);
        let segments = self
            .segments
            .iter()
            .map(|s| match s {
                Segment::MoveTo(p) => Segment::MoveTo(f(p)),
                Segment::LineTo(p) => Segment::LineTo(f(p)),
                Segment::CubicTo(a, b, p) => Segment::CubicTo(f(a), f(b), f(p)),
                Segment::QuadTo(a, p) => Segment::QuadTo(f(a), f(p)),
                Segment::ArcTo { rx, ry, rotation, large_arc, sweep, to } => Segment::ArcTo {
                    rx: rx * sx.abs(),
                    ry: ry * sy.abs(),
                    rotation: *rotation,
                    large_arc: *large_arc,
                    // A reflection flips the winding direction.
                    sweep: if sx * sy < 0.0 { !sweep } else { *sweep },
                    to: f(to),
                },
                Segment::Close => Segment::Close,
            })
            .collect();
        PathData { segments }
    }

    /// Serializes with absolute commands and 2-decimal coordinates.
    pub fn to_svg(&self) -> String {
        let mut out = String::new();
        let n = crate::geom::fmt2;
        for s in &self.segments {
            if !out.is_empty() {
                out.push(' ');
            }
            let _ = match s {
                Segment::MoveTo(p) => write!(out, "M{},{}", n(p.x), n(p.y)),
                Segment::LineTo(p) => write!(out, "L{},{}", n(p.x), n(p.y)),
                Segment::CubicTo(a, b, p) => {
                    write!(out, "C{},{} {},{} {},{}", n(a.x), n(a.y), n(b.x), n(b.y), n(p.x), n(p.y))
                }
                Segment::QuadTo(a, p) => write!(out, "Q{},{} {},{}", n(a.x), n(a.y), n(p.x), n(p.y)),
                Segment::ArcTo { rx, ry, rotation, large_arc, sweep, to } => write!(
                    out,
                    "A{},{} {} {} {} {},{}",
                    n(*rx),
                    n(*ry),
                    n(*rotation),
                    u8::from(*large_arc),
                    u8::from(*sweep),
                    n(to.x),
                    n(to.y)
                ),
                Segment::Close => write!(out, "Z"),
            };
        }
        out
    }
}
