use serde_json::{json, Map, Value};

use super::*;
use crate::chart::Encoding;

fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sorted(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        v => v,
    }
}

fn num(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        json!(v as i64)
    } else {
        json!(v)
    }
}

fn coord(c: &Coord) -> Value {
    match c {
        Coord::Number(n) => num(*n),
        Coord::String(s) => Value::String(s.clone()),
    }
}

fn encoding(e: &Encoding) -> Value {
    let mut m = Map::new();
    m.insert("field".into(), json!(e.field));
    m.insert("type".into(), json!(e.ty.name()));
    if let Some(d) = &e.scale_domain {
        m.insert("scale".into(), json!({ "domain": d.iter().map(coord).collect::<Vec<_>>() }));
    }
    Value::Object(m)
}

fn chart(c: &ChartSpec) -> Value {
    let mut enc = Map::new();
    enc.insert("x".into(), encoding(&c.x));
    enc.insert("y".into(), encoding(&c.y));
    if let Some(col) = &c.color {
        enc.insert("color".into(), encoding(col));
    }
    let mut m = Map::new();
    m.insert("mark".into(), json!(c.mark.name()));
    m.insert("width".into(), json!(c.width));
    m.insert("height".into(), json!(c.height));
    for (k, v) in [("title", &c.title), ("subtitle", &c.subtitle), ("caption", &c.caption)] {
        if let Some(s) = v {
            m.insert(k.into(), json!(s));
        }
    }
    m.insert("encoding".into(), Value::Object(enc));
    Value::Object(m)
}

fn space(s: Space) -> &'static str {
    match s {
        Space::Data => "data",
        Space::Pixel => "pixel",
    }
}

fn fixed(f: &FixedPos, into: &mut Map<String, Value>) {
    into.insert("type".into(), json!(space(f.space)));
    into.insert("x".into(), coord(&f.x));
    into.insert("y".into(), coord(&f.y));
}

fn target(t: &Target) -> Value {
    match t {
        Target::None => json!("none"),
        Target::ById(id) => json!({ "id": id }),
        Target::Fixed(f) => {
            let mut m = Map::new();
            fixed(f, &mut m);
            json!({ "fixed": m })
        }
        Target::ChartPart(p) => json!({ "chartPart": p.name() }),
        Target::DataPoint(DataSelector::Indices(ix)) => json!({ "dataPoint": { "indices": ix } }),
        Target::DataPoint(DataSelector::Expr(e)) => json!({ "dataPoint": { "expr": e.to_string() } }),
        Target::Axis { axis, parts, range } => {
            let mut m = Map::new();
            m.insert("axis".into(), json!(axis.name()));
            m.insert("parts".into(), json!(parts.iter().map(|p| p.name()).collect::<Vec<_>>()));
            match range {
                Some(AxisRange::Interval(a, b)) => {
                    m.insert("range".into(), json!([coord(a), coord(b)]));
                }
                Some(AxisRange::Expr(e)) => {
                    m.insert("range".into(), json!(e.to_string()));
                }
                None => {}
            }
            json!({ "axis": m })
        }
    }
}

fn position(p: &Position) -> Value {
    let mut m = Map::new();
    match &p.kind {
        PositionKind::Fixed(f) => fixed(f, &mut m),
        PositionKind::Anchor1D(a) => {
            m.insert("anchor1D".into(), json!(a.name()));
        }
        PositionKind::Anchor2D(a) => {
            m.insert("anchor".into(), json!(a.name()));
        }
    }
    m.insert("dx".into(), num(p.dx));
    m.insert("dy".into(), num(p.dy));
    Value::Object(m)
}

fn style(s: &Style) -> Value {
    let mut m = Map::new();
    m.insert("stroke".into(), json!(s.stroke));
    m.insert("strokeWidth".into(), num(s.stroke_width));
    m.insert("fill".into(), json!(s.fill.as_deref().unwrap_or("none")));
    m.insert("opacity".into(), num(s.opacity));
    m.insert("fontSize".into(), num(s.font_size));
    m.insert(
        "fontWeight".into(),
        json!(match s.font_weight {
            FontWeight::Normal => "normal",
            FontWeight::Bold => "bold",
        }),
    );
    m.insert("textAnchor".into(), json!(s.text_anchor.name()));
    if let Some(d) = &s.dash {
        m.insert("dash".into(), Value::Array(d.iter().map(|v| num(*v)).collect()));
    }
    Value::Object(m)
}

fn effect<X>(a: &Annotation<X>, body: impl FnOnce(&X, &mut Map<String, Value>)) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), json!(a.id));
    m.insert("style".into(), style(&a.style));
    body(&a.body, &mut m);
    Value::Object(m)
}

fn expr_value(e: &IndicatorExpr) -> Value {
    match e {
        IndicatorExpr::Single(e) => json!(e.to_string()),
        IndicatorExpr::Interval(a, b) => json!([a.to_string(), b.to_string()]),
    }
}

fn root(r: &AnnotationRoot) -> Value {
    let mut m = Map::new();
    m.insert("targets".into(), Value::Array(r.targets.iter().map(target).collect()));
    if let Some(t) = &r.text {
        m.insert(
            "text".into(),
            effect(t, |b, m| {
                m.insert("content".into(), json!(b.content));
                if let Some(p) = &b.position {
                    m.insert("position".into(), position(p));
                }
            }),
        );
    }
    if let Some(e) = &r.enclosure {
        m.insert(
            "enclosure".into(),
            effect(e, |b, m| {
                match &b.shape {
                    Shape::Rect => m.insert("shape".into(), json!("rect")),
                    Shape::Ellipse => m.insert("shape".into(), json!("ellipse")),
                    Shape::Path(d) => {
                        m.insert("d".into(), json!(d));
                        m.insert("shape".into(), json!("path"))
                    }
                };
                m.insert("padding".into(), num(b.padding));
                if let Some(p) = &b.position {
                    m.insert("position".into(), position(p));
                }
            }),
        );
    }
    if let Some(c) = &r.connector {
        m.insert(
            "connector".into(),
            effect(c, |b, m| {
                m.insert("markers".into(), json!(b.markers.name()));
                m.insert("interpolation".into(), json!(b.interpolation.name()));
                if let Some(d) = &b.path_override {
                    m.insert("path".into(), json!(d));
                }
            }),
        );
    }
    if let Some(i) = &r.indicator {
        m.insert(
            "indicator".into(),
            effect(i, |b, m| {
                m.insert("kind".into(), json!(b.kind.name()));
                m.insert("axis".into(), json!(b.axis.name()));
                m.insert("expr".into(), expr_value(&b.expr));
            }),
        );
    }
    Value::Object(m)
}

fn ensemble(e: &Ensemble) -> Value {
    match e {
        Ensemble::Reference { from, to, style: s } => {
            json!({ "reference": { "from": from, "to": to, "style": style(s) } })
        }
        Ensemble::Composite { id, members } => json!({ "composite": { "id": id, "members": members } }),
    }
}

/// Canonical JSON: sorted keys, every default written out.
pub fn serialize_spec(s: &Spec) -> Value {
    let data = match &s.data {
        DataSource::Url(u) => json!({ "url": u }),
        DataSource::Values(rows) => json!({ "values": rows }),
    };
    let mut m = Map::new();
    m.insert("annotations".into(), sorted(Value::Array(s.annotations.iter().map(root).collect())));
    m.insert("chart".into(), sorted(chart(&s.chart)));
    // Inline rows keep their column order.
    m.insert("data".into(), data);
    m.insert("ensembles".into(), sorted(Value::Array(s.ensembles.iter().map(ensemble).collect())));
    Value::Object(m)
}

pub fn serialize_spec_string(s: &Spec) -> String {
    let mut out = serde_json::to_string_pretty(&serialize_spec(s)).expect("JSON values always serialize");
    out.push('\n');
    out
}
