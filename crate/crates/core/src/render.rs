//! Deterministic SVG output for a scene plus resolved annotations.

use std::fmt::Write as _;

use crate::assemble::{AnnoGeometry, AnnoKind, ResolvedAnnotation, ARROW_HALF_WIDTH, ARROW_LENGTH};
use crate::geom::{fmt2, Point};
use crate::scene::{Geometry, NodeStyle, SceneGraph, SceneNode, TextRun};
use crate::spec::{FontWeight, Markers, Style};
use crate::svgpath::PathData;

const FONT_FAMILY: &str = "Helvetica, Arial, sans-serif";

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Triangle with its tip at `tip`, pointing away from `from`.
pub fn arrowhead(tip: Point, from: Point) -> [Point; 3] {
    let len = tip.distance(from).max(1e-9);
    let (ux, uy) = ((tip.x - from.x) / len, (tip.y - from.y) / len);
    let base = Point::new(tip.x - ux * ARROW_LENGTH, tip.y - uy * ARROW_LENGTH);
    let (nx, ny) = (-uy * ARROW_HALF_WIDTH, ux * ARROW_HALF_WIDTH);
    [tip, Point::new(base.x + nx, base.y + ny), Point::new(base.x - nx, base.y - ny)]
}

fn node_paint(s: &NodeStyle) -> String {
    let mut a = String::new();
    let _ = write!(a, r#" fill="{}""#, s.fill.as_deref().unwrap_or("none"));
    if let Some(stroke) = &s.stroke {
        let _ = write!(a, r#" stroke="{}" stroke-width="{}""#, stroke, fmt2(s.stroke_width));
    }
    if s.opacity < 1.0 {
        let _ = write!(a, r#" opacity="{}""#, fmt2(s.opacity));
    }
    a
}

fn text_element(out: &mut String, id: &str, run: &TextRun, color: &str, extra: &str) {
    let _ = write!(
        out,
        r#"<text id="{}" x="{}" y="{}" font-family="{}" font-size="{}" text-anchor="{}" fill="{}"{}"#,
        escape(id),
        fmt2(run.x),
        fmt2(run.y),
        FONT_FAMILY,
        fmt2(run.size),
        run.anchor.name(),
        color,
        extra
    );
    if run.bold {
        out.push_str(r#" font-weight="bold""#);
    }
    if let Some(r) = run.rotate {
        let _ = write!(out, r#" transform="rotate({} {} {})""#, fmt2(r), fmt2(run.x), fmt2(run.y));
    }
    let _ = writeln!(out, ">{}</text>", escape(&run.content));
}

fn points_attr(points: &[Point]) -> String {
    points.iter().map(|p| format!("{},{}", fmt2(p.x), fmt2(p.y))).collect::<Vec<_>>().join(" ")
}

fn geometry_element(out: &mut String, id: &str, g: &Geometry, style: &NodeStyle) {
    let id = escape(id);
    let paint = node_paint(style);
    let _ = match g {
        Geometry::None => Ok(()),
        Geometry::Rect { rect } => writeln!(
            out,
            r#"<rect id="{id}" x="{}" y="{}" width="{}" height="{}"{paint}/>"#,
            fmt2(rect.x),
            fmt2(rect.y),
            fmt2(rect.w),
            fmt2(rect.h)
        ),
        Geometry::Circle { cx, cy, r } => {
            writeln!(out, r#"<circle id="{id}" cx="{}" cy="{}" r="{}"{paint}/>"#, fmt2(*cx), fmt2(*cy), fmt2(*r))
        }
        Geometry::Line { from, to } => writeln!(
            out,
            r#"<line id="{id}" x1="{}" y1="{}" x2="{}" y2="{}"{paint}/>"#,
            fmt2(from.x),
            fmt2(from.y),
            fmt2(to.x),
            fmt2(to.y)
        ),
        Geometry::Polyline { points } => writeln!(out, r#"<polyline id="{id}" points="{}"{paint}/>"#, points_attr(points)),
        Geometry::Path { points } => writeln!(out, r#"<polygon id="{id}" points="{}"{paint}/>"#, points_attr(points)),
        Geometry::Text { run } => {
            text_element(out, &id, run, style.fill.as_deref().unwrap_or("#000000"), "");
            Ok(())
        }
    };
}

fn render_node(out: &mut String, n: &SceneNode) {
    if n.children.is_empty() {
        if n.style.visible {
            geometry_element(out, &n.id, &n.geometry, &n.style);
        }
        return;
    }
    let _ = writeln!(out, r#"<g id="{}">"#, escape(&n.id));
    if n.style.visible {
        geometry_element(out, &format!("{}/shape", n.id), &n.geometry, &n.style);
    }
    for c in &n.children {
        render_node(out, c);
    }
    out.push_str("</g>\n");
}

fn stroke_attrs(s: &Style) -> String {
    let mut a = format!(r#" stroke="{}" stroke-width="{}""#, s.stroke, fmt2(s.stroke_width));
    if let Some(d) = &s.dash {
        let parts: Vec<String> = d.iter().map(|v| fmt2(*v)).collect();
        let _ = write!(a, r#" stroke-dasharray="{}""#, parts.join(" "));
    }
    a.push_str(&opacity_attr(s));
    a
}

fn opacity_attr(s: &Style) -> String {
    if s.opacity < 1.0 {
        format!(r#" opacity="{}""#, fmt2(s.opacity))
    } else {
        String::new()
    }
}

fn fill_attr(s: &Style) -> String {
    format!(r#" fill="{}""#, s.fill.as_deref().unwrap_or("none"))
}

fn stroke_path(out: &mut String, id: &str, p: &PathData, markers: Markers, s: &Style) {
    let _ = writeln!(out, r#"<path id="{}" d="{}" fill="none"{}/>"#, escape(id), p.to_svg(), stroke_attrs(s));
    let heads = [
        (markers.at_start(), p.start_tangent(), "arrow-start"),
        (markers.at_end(), p.end_tangent(), "arrow-end"),
    ];
    for (on, tangent, name) in heads {
        let (true, Some((tip, from))) = (on, tangent) else { continue };
        let tri = arrowhead(tip, from);
        let _ = writeln!(
            out,
            r#"<path id="{}/{name}" d="M{},{} L{},{} L{},{} Z" fill="{}" stroke="none"/>"#,
            escape(id),
            fmt2(tri[0].x),
            fmt2(tri[0].y),
            fmt2(tri[1].x),
            fmt2(tri[1].y),
            fmt2(tri[2].x),
            fmt2(tri[2].y),
            s.stroke
        );
    }
}

fn render_annotation(out: &mut String, a: &ResolvedAnnotation) {
    let class = match &a.kind {
        AnnoKind::Effect(k) => k.name(),
        AnnoKind::Link => "reference",
    };
    let _ = writeln!(out, r#"<g id="{}" class="annotation {class}">"#, escape(&a.id));
    let s = &a.style;
    let body = format!("{}/body", a.id);
    let _ = match &a.geometry {
        AnnoGeometry::Text(run) => {
            let color = s.fill.as_deref().unwrap_or(&s.stroke);
            let extra = if s.opacity < 1.0 { format!(r#" opacity="{}""#, fmt2(s.opacity)) } else { String::new() };
            let mut run = run.clone();
            run.bold = s.font_weight == FontWeight::Bold;
            text_element(out, &body, &run, color, &extra);
            Ok(())
        }
        AnnoGeometry::Rect(r) => {
            // Bands are unstroked; without an explicit fill they get a
            // translucent tint of the stroke color.
            let band = matches!(a.kind, AnnoKind::Effect(crate::spec::EffectKind::Indicator));
            let paint = match (band, &s.fill) {
                (true, None) => format!(r#" fill="{}" fill-opacity="0.15" stroke="none""#, s.stroke),
                (true, Some(f)) => format!(r#" fill="{f}" stroke="none"{}"#, opacity_attr(s)),
                (false, _) => format!("{}{}", fill_attr(s), stroke_attrs(s)),
            };
            writeln!(
                out,
                r#"<rect id="{}" x="{}" y="{}" width="{}" height="{}"{paint}/>"#,
                escape(&body),
                fmt2(r.x),
                fmt2(r.y),
                fmt2(r.w),
                fmt2(r.h)
            )
        }
        AnnoGeometry::Ellipse { cx, cy, rx, ry } => writeln!(
            out,
            r#"<ellipse id="{}" cx="{}" cy="{}" rx="{}" ry="{}"{}{}/>"#,
            escape(&body),
            fmt2(*cx),
            fmt2(*cy),
            fmt2(*rx),
            fmt2(*ry),
            fill_attr(s),
            stroke_attrs(s)
        ),
        AnnoGeometry::Outline(p) => {
            writeln!(out, r#"<path id="{}" d="{}"{}{}/>"#, escape(&body), p.to_svg(), fill_attr(s), stroke_attrs(s))
        }
        AnnoGeometry::Strokes { paths, markers } => {
            for (i, p) in paths.iter().enumerate() {
                stroke_path(out, &format!("{body}/{i}"), p, *markers, s);
            }
            Ok(())
        }
    };
    out.push_str("</g>\n");
}

/// Renders the chart and its annotations. The output depends only on the
/// inputs; coordinates are written with two decimals.
pub fn render_svg(scene: &SceneGraph, annotations: &[ResolvedAnnotation]) -> String {
    let mut out = String::new();
    let (w, h) = (fmt2(scene.width), fmt2(scene.height));
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r##"<rect id="background" x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
    render_node(&mut out, &scene.root);
    out.push_str("<g id=\"annotations\">\n");
    for a in annotations {
        render_annotation(&mut out, a);
    }
    out.push_str("</g>\n</svg>\n");
    out
}
