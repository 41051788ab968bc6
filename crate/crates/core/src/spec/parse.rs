use super::json::{self, escape_token, Node};
use super::*;
use crate::chart::{EncodingType, Encoding, Mark};
use crate::expr;
use crate::svgpath::PathData;

const DEFAULT_WIDTH: u32 = 400;
const DEFAULT_HEIGHT: u32 = 300;
const EFFECT_KEYS: [&str; 4] = ["text", "enclosure", "connector", "indicator"];

type Result<T> = std::result::Result<T, SpecError>;

fn schema(path: &str, message: impl Into<String>) -> SpecError {
    SpecError::Schema { path: path.to_string(), message: message.into() }
}

fn child(path: &str, key: &str) -> String {
    format!("{path}/{}", escape_token(key))
}

fn index(path: &str, i: usize) -> String {
    format!("{path}/{i}")
}

/// Object reader that rejects unknown and repeated keys.
struct Obj<'a> {
    path: String,
    members: &'a [(String, Node)],
    used: Vec<bool>,
}

impl<'a> Obj<'a> {
    fn new(node: &'a Node, path: &str) -> Result<Self> {
        match node {
            Node::Object(members) => {
                Ok(Obj { path: path.to_string(), members, used: vec![false; members.len()] })
            }
            other => Err(schema(path, format!("expected an object, found {}", other.kind()))),
        }
    }

    fn get(&mut self, key: &str) -> Result<Option<(&'a Node, String)>> {
        let mut found = None;
        for (i, (k, v)) in self.members.iter().enumerate() {
            if k == key {
                if found.is_some() {
                    return Err(schema(&child(&self.path, key), format!("duplicate key `{key}`")));
                }
                self.used[i] = true;
                found = Some(v);
            }
        }
        Ok(found.map(|v| (v, child(&self.path, key))))
    }

    fn req(&mut self, key: &str) -> Result<(&'a Node, String)> {
        self.get(key)?.ok_or_else(|| schema(&self.path, format!("missing required key `{key}`")))
    }

    fn count(&self, key: &str) -> usize {
        self.members.iter().filter(|(k, _)| k == key).count()
    }

    fn finish(self) -> Result<()> {
        match self.members.iter().zip(&self.used).find(|(_, used)| !**used) {
            Some(((k, _), _)) => Err(schema(&child(&self.path, k), format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }

    fn opt_str(&mut self, key: &str) -> Result<Option<String>> {
        self.get(key)?.map(|(n, p)| string(n, &p)).transpose()
    }

    fn opt_num(&mut self, key: &str) -> Result<Option<f64>> {
        self.get(key)?.map(|(n, p)| number(n, &p)).transpose()
    }
}

fn string(n: &Node, path: &str) -> Result<String> {
    match n {
        Node::String(s) => Ok(s.clone()),
        other => Err(schema(path, format!("expected a string, found {}", other.kind()))),
    }
}

fn nonempty(n: &Node, path: &str) -> Result<String> {
    let s = string(n, path)?;
    if s.is_empty() {
        return Err(schema(path, "must not be empty"));
    }
    Ok(s)
}

fn number(n: &Node, path: &str) -> Result<f64> {
    match n {
        Node::Number(v) => Ok(*v),
        other => Err(schema(path, format!("expected a number, found {}", other.kind()))),
    }
}

fn array<'a>(n: &'a Node, path: &str) -> Result<&'a [Node]> {
    match n {
        Node::Array(items) => Ok(items),
        other => Err(schema(path, format!("expected an array, found {}", other.kind()))),
    }
}

fn enum_str<T: Copy>(n: &Node, path: &str, all: &[T], name: impl Fn(T) -> &'static str) -> Result<T> {
    let s = string(n, path)?;
    all.iter().copied().find(|v| name(*v) == s).ok_or_else(|| {
        let names: Vec<_> = all.iter().map(|v| format!("`{}`", name(*v))).collect();
        schema(path, format!("unknown value `{s}`; expected one of {}", names.join(", ")))
    })
}

fn coord(n: &Node, path: &str) -> Result<Coord> {
    match n {
        Node::Number(v) => Ok(Coord::Number(*v)),
        Node::String(s) => Ok(Coord::String(s.clone())),
        other => Err(schema(path, format!("expected a number or string, found {}", other.kind()))),
    }
}

fn expression(n: &Node, path: &str) -> Result<Expr> {
    let src = string(n, path)?;
    expr::parse(&src).map_err(|source| SpecError::Expr { path: path.to_string(), source })
}

fn color(n: &Node, path: &str) -> Result<String> {
    let s = string(n, path)?;
    let ok = s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit());
    if !ok {
        return Err(schema(path, format!("`{s}` is not a #RRGGBB color")));
    }
    Ok(s.to_ascii_lowercase())
}

fn chart(n: &Node, path: &str) -> Result<ChartSpec> {
    let mut o = Obj::new(n, path)?;
    let (m, mp) = o.req("mark")?;
    let mark_name = string(m, &mp)?;
    let mark = Mark::from_name(&mark_name)
        .ok_or_else(|| schema(&mp, format!("unknown mark `{mark_name}`; expected bar, line, point or area")))?;
    let dim = |o: &mut Obj, key: &str, default: u32| -> Result<u32> {
        match o.get(key)? {
            None => Ok(default),
            Some((n, p)) => {
                let v = number(n, &p)?;
                if v.fract() != 0.0 || !(1.0..=100_000.0).contains(&v) {
                    return Err(schema(&p, "must be a positive integer"));
                }
                Ok(v as u32)
            }
        }
    };
    let width = dim(&mut o, "width", DEFAULT_WIDTH)?;
    let height = dim(&mut o, "height", DEFAULT_HEIGHT)?;
    let title = o.opt_str("title")?;
    let subtitle = o.opt_str("subtitle")?;
    let caption = o.opt_str("caption")?;
    let (e, ep) = o.req("encoding")?;
    o.finish()?;
    let mut eo = Obj::new(e, &ep)?;
    let (xn, xp) = eo.req("x")?;
    let (yn, yp) = eo.req("y")?;
    let x = encoding(xn, &xp)?;
    let y = encoding(yn, &yp)?;
    let color = eo.get("color")?.map(|(n, p)| encoding(n, &p)).transpose()?;
    eo.finish()?;
    Ok(ChartSpec { mark, x, y, color, width, height, title, subtitle, caption })
}

fn encoding(n: &Node, path: &str) -> Result<Encoding> {
    let mut o = Obj::new(n, path)?;
    let (f, fp) = o.req("field")?;
    let field = nonempty(f, &fp)?;
    let (t, tp) = o.req("type")?;
    let ty = enum_str(
        t,
        &tp,
        &[EncodingType::Quantitative, EncodingType::Nominal, EncodingType::Ordinal, EncodingType::Temporal],
        EncodingType::name,
    )?;
    let mut scale_domain = None;
    if let Some((s, sp)) = o.get("scale")? {
        let mut so = Obj::new(s, &sp)?;
        if let Some((d, dp)) = so.get("domain")? {
            let items = array(d, &dp)?;
            let coords = items.iter().enumerate().map(|(i, c)| coord(c, &index(&dp, i))).collect::<Result<Vec<_>>>()?;
            if coords.is_empty() {
                return Err(schema(&dp, "domain must not be empty"));
            }
            if !ty.is_discrete() && coords.len() != 2 {
                return Err(schema(&dp, "continuous domain must be [min, max]"));
            }
            scale_domain = Some(coords);
        }
        so.finish()?;
    }
    o.finish()?;
    Ok(Encoding { field, ty, scale_domain })
}

fn data(n: &Node, path: &str) -> Result<DataSource> {
    let mut o = Obj::new(n, path)?;
    let url = o.get("url")?;
    let values = o.get("values")?;
    o.finish()?;
    match (url, values) {
        (Some((u, up)), None) => Ok(DataSource::Url(nonempty(u, &up)?)),
        (None, Some((v, vp))) => {
            let rows = array(v, &vp)?;
            for (i, r) in rows.iter().enumerate() {
                if !matches!(r, Node::Object(_)) {
                    return Err(schema(&index(&vp, i), "each row must be an object"));
                }
            }
            Ok(DataSource::Values(rows.iter().map(Node::to_value).collect()))
        }
        _ => Err(schema(path, "data needs exactly one of `url` or `values`")),
    }
}

fn fixed_pos(n: &Node, path: &str) -> Result<FixedPos> {
    let mut o = Obj::new(n, path)?;
    let (t, tp) = o.req("type")?;
    let space = enum_str(t, &tp, &[Space::Data, Space::Pixel], |s| match s {
        Space::Data => "data",
        Space::Pixel => "pixel",
    })?;
    let (x, xp) = o.req("x")?;
    let (y, yp) = o.req("y")?;
    let x = coord(x, &xp)?;
    let y = coord(y, &yp)?;
    fixed_tail(o, space, x, y, &xp, &yp)
}

fn fixed_tail(o: Obj, space: Space, x: Coord, y: Coord, xp: &str, yp: &str) -> Result<FixedPos> {
    o.finish()?;
    if space == Space::Pixel {
        for (c, p) in [(&x, xp), (&y, yp)] {
            if !matches!(c, Coord::Number(_)) {
                return Err(schema(p, "pixel coordinates must be numbers"));
            }
        }
    }
    Ok(FixedPos { space, x, y })
}

fn target(n: &Node, path: &str) -> Result<Target> {
    if let Node::String(s) = n {
        return if s == "none" {
            Ok(Target::None)
        } else {
            Err(schema(path, format!("unknown target `{s}`; the only string target is \"none\"")))
        };
    }
    let Node::Object(members) = n else {
        return Err(schema(path, format!("expected a target object or \"none\", found {}", n.kind())));
    };
    if members.len() != 1 {
        return Err(schema(path, "a target object has exactly one key: id, fixed, chartPart, dataPoint or axis"));
    }
    let (key, v) = &members[0];
    let p = child(path, key);
    match key.as_str() {
        "id" => Ok(Target::ById(nonempty(v, &p)?)),
        "fixed" => Ok(Target::Fixed(fixed_pos(v, &p)?)),
        "chartPart" => Ok(Target::ChartPart(enum_str(
            v,
            &p,
            &[ChartPartKind::Title, ChartPartKind::Legend, ChartPartKind::Subtitle, ChartPartKind::Caption],
            ChartPartKind::name,
        )?)),
        "dataPoint" => {
            let mut o = Obj::new(v, &p)?;
            let idx = o.get("indices")?;
            let ex = o.get("expr")?;
            o.finish()?;
            match (idx, ex) {
                (Some((l, lp)), None) => {
                    let mut out: Vec<usize> = Vec::new();
                    for (i, item) in array(l, &lp)?.iter().enumerate() {
                        let ip = index(&lp, i);
                        let v = number(item, &ip)?;
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(schema(&ip, "row indices are non-negative integers"));
                        }
                        if !out.contains(&(v as usize)) {
                            out.push(v as usize);
                        }
                    }
                    if out.is_empty() {
                        return Err(schema(&lp, "indices must not be empty"));
                    }
                    Ok(Target::DataPoint(DataSelector::Indices(out)))
                }
                (None, Some((e, epath))) => Ok(Target::DataPoint(DataSelector::Expr(expression(e, &epath)?))),
                _ => Err(schema(&p, "dataPoint needs exactly one of `indices` or `expr`")),
            }
        }
        "axis" => {
            let mut o = Obj::new(v, &p)?;
            let (a, ap) = o.req("axis")?;
            let axis = enum_str(a, &ap, &[AxisName::X, AxisName::Y], AxisName::name)?;
            let (parts_node, pp) = o.req("parts")?;
            let kinds = [AxisPartKind::Label, AxisPartKind::Tick, AxisPartKind::Grid, AxisPartKind::TickLabel];
            let parts = match parts_node {
                Node::String(_) => vec![enum_str(parts_node, &pp, &kinds, AxisPartKind::name)?],
                other => {
                    let mut out = Vec::new();
                    for (i, item) in array(other, &pp)?.iter().enumerate() {
                        let k = enum_str(item, &index(&pp, i), &kinds, AxisPartKind::name)?;
                        if !out.contains(&k) {
                            out.push(k);
                        }
                    }
                    if out.is_empty() {
                        return Err(schema(&pp, "parts must not be empty"));
                    }
                    out
                }
            };
            let range = match o.get("range")? {
                None => None,
                Some((Node::Array(items), rp)) => {
                    if items.len() != 2 {
                        return Err(schema(&rp, "range interval must be [from, to]"));
                    }
                    Some(AxisRange::Interval(coord(&items[0], &index(&rp, 0))?, coord(&items[1], &index(&rp, 1))?))
                }
                Some((r, rp)) => Some(AxisRange::Expr(expression(r, &rp)?)),
            };
            o.finish()?;
            Ok(Target::Axis { axis, parts, range })
        }
        other => Err(schema(&p, format!("unknown target kind `{other}`"))),
    }
}

fn position(n: &Node, path: &str) -> Result<Position> {
    let mut o = Obj::new(n, path)?;
    let dx = o.opt_num("dx")?.unwrap_or(0.0);
    let dy = o.opt_num("dy")?.unwrap_or(0.0);
    let ty = o.get("type")?;
    let a2 = o.get("anchor")?;
    let a1 = o.get("anchor1D")?;
    let kind = match (ty, a2, a1) {
        (Some((t, tp)), None, None) => {
            let space = enum_str(t, &tp, &[Space::Data, Space::Pixel], |s| match s {
                Space::Data => "data",
                Space::Pixel => "pixel",
            })?;
            let (x, xp) = o.req("x")?;
            let (y, yp) = o.req("y")?;
            let (x, y) = (coord(x, &xp)?, coord(y, &yp)?);
            let fp = fixed_tail(o, space, x, y, &xp, &yp)?;
            return Ok(Position { kind: PositionKind::Fixed(fp), dx, dy });
        }
        (None, Some((a, ap)), None) => PositionKind::Anchor2D(enum_str(a, &ap, &Anchor2D::ALL, Anchor2D::name)?),
        (None, None, Some((a, ap))) => PositionKind::Anchor1D(enum_str(a, &ap, &Anchor1D::ALL, Anchor1D::name)?),
        _ => return Err(schema(path, "position needs exactly one of `type` (fixed), `anchor` or `anchor1D`")),
    };
    o.finish()?;
    Ok(Position { kind, dx, dy })
}

fn style(o: &mut Obj, base: Style) -> Result<Style> {
    let Some((n, path)) = o.get("style")? else { return Ok(base) };
    let mut s = base;
    let mut so = Obj::new(n, &path)?;
    if let Some((v, p)) = so.get("stroke")? {
        s.stroke = color(v, &p)?;
    }
    if let Some((v, p)) = so.get("strokeWidth")? {
        s.stroke_width = number(v, &p)?;
        if s.stroke_width < 0.0 {
            return Err(schema(&p, "must be ≥ 0"));
        }
    }
    if let Some((v, p)) = so.get("fill")? {
        s.fill = match v {
            Node::String(f) if f == "none" => None,
            v => Some(color(v, &p)?),
        };
    }
    if let Some((v, p)) = so.get("opacity")? {
        s.opacity = number(v, &p)?;
        if !(0.0..=1.0).contains(&s.opacity) {
            return Err(schema(&p, "opacity must lie in [0, 1]"));
        }
    }
    if let Some((v, p)) = so.get("fontSize")? {
        s.font_size = number(v, &p)?;
        if s.font_size <= 0.0 {
            return Err(schema(&p, "must be positive"));
        }
    }
    if let Some((v, p)) = so.get("fontWeight")? {
        s.font_weight = enum_str(v, &p, &[FontWeight::Normal, FontWeight::Bold], |w| match w {
            FontWeight::Normal => "normal",
            FontWeight::Bold => "bold",
        })?;
    }
    if let Some((v, p)) = so.get("textAnchor")? {
        s.text_anchor = enum_str(v, &p, &[TextAnchor::Start, TextAnchor::Middle, TextAnchor::End], TextAnchor::name)?;
    }
    if let Some((v, p)) = so.get("dash")? {
        let items = array(v, &p)?;
        let mut dash = Vec::with_capacity(items.len());
        for (i, d) in items.iter().enumerate() {
            let x = number(d, &index(&p, i))?;
            if x < 0.0 {
                return Err(schema(&index(&p, i), "dash lengths must be ≥ 0"));
            }
            dash.push(x);
        }
        s.dash = if dash.is_empty() { None } else { Some(dash) };
    }
    so.finish()?;
    Ok(s)
}

struct Ids {
    seen: Vec<String>,
}

impl Ids {
    fn claim(&mut self, id: &str, path: &str) -> Result<()> {
        if self.seen.iter().any(|s| s == id) {
            return Err(SpecError::DuplicateId { path: path.to_string(), id: id.to_string() });
        }
        self.seen.push(id.to_string());
        Ok(())
    }
}

/// Reads the shared id/style header and hands the remaining keys to `body`.
fn effect<X>(
    n: &Node,
    path: &str,
    root: usize,
    kind: &str,
    base: Style,
    ids: &mut Ids,
    body: impl FnOnce(&mut Obj) -> Result<X>,
) -> Result<Annotation<X>> {
    let mut o = Obj::new(n, path)?;
    let (id, id_path) = match o.get("id")? {
        Some((v, p)) => (nonempty(v, &p)?, p),
        None => (format!("anno/{root}/{kind}"), path.to_string()),
    };
    ids.claim(&id, &id_path)?;
    let style = style(&mut o, base)?;
    let body = body(&mut o)?;
    o.finish()?;
    Ok(Annotation { id, style, body })
}

fn effect_node<'a>(o: &mut Obj<'a>, key: &str) -> Result<Option<(&'a Node, String)>> {
    if o.count(key) > 1 {
        return Err(SpecError::MultipleEffectsOfType { path: child(&o.path, key), effect: key.to_string() });
    }
    match o.get(key)? {
        Some((Node::Array(items), p)) => match items.len() {
            0 => Err(schema(&p, "expected an effect object")),
            1 => Ok(Some((&items[0], index(&p, 0)))),
            _ => Err(SpecError::MultipleEffectsOfType { path: index(&p, 1), effect: key.to_string() }),
        },
        other => Ok(other),
    }
}

fn root(n: &Node, path: &str, ri: usize, ids: &mut Ids) -> Result<AnnotationRoot> {
    let mut o = Obj::new(n, path)?;
    let (t, tp) = o.req("targets")?;
    let items = array(t, &tp)?;
    if items.is_empty() {
        return Err(SpecError::EmptyTargets { path: tp });
    }
    let targets = items.iter().enumerate().map(|(i, t)| target(t, &index(&tp, i))).collect::<Result<Vec<_>>>()?;

    let mut nodes = Vec::new();
    for key in EFFECT_KEYS {
        nodes.push(effect_node(&mut o, key)?);
    }
    let [text_n, encl_n, conn_n, ind_n] = <[_; 4]>::try_from(nodes).expect("four effect keys");
    if text_n.is_none() && encl_n.is_none() && conn_n.is_none() && ind_n.is_none() {
        return Err(schema(path, "an annotation root needs at least one of text, enclosure, connector or indicator"));
    }

    let text = text_n
        .map(|(n, p)| {
            effect(n, &p, ri, "text", Style::default(), ids, |o| {
                let (c, cp) = o.req("content")?;
                let content = nonempty(c, &cp)?;
                let position = o.get("position")?.map(|(n, p)| position(n, &p)).transpose()?;
                Ok(TextAnn { content, position })
            })
        })
        .transpose()?;

    let enclosure = encl_n
        .map(|(n, p)| {
            effect(n, &p, ri, "enclosure", Style::default(), ids, |o| {
                let shape_name = match o.get("shape")? {
                    Some((s, sp)) => (string(s, &sp)?, sp),
                    None => ("rect".to_string(), String::new()),
                };
                let d = o.get("d")?;
                let shape = match (shape_name.0.as_str(), d) {
                    ("rect", None) => Shape::Rect,
                    ("ellipse", None) => Shape::Ellipse,
                    ("path", Some((d, dp))) => {
                        let d = string(d, &dp)?;
                        PathData::parse(&d).map_err(|e| schema(&dp, e.to_string()))?;
                        Shape::Path(d)
                    }
                    ("path", None) => return Err(schema(&o.path, "a path enclosure needs `d`")),
                    ("rect" | "ellipse", Some((_, dp))) => {
                        return Err(schema(&dp, "`d` is only valid with shape \"path\""))
                    }
                    (other, _) => {
                        return Err(schema(
                            &shape_name.1,
                            format!("unknown shape `{other}`; expected rect, ellipse or path"),
                        ))
                    }
                };
                let padding = match o.get("padding")? {
                    Some((v, vp)) => {
                        let pad = number(v, &vp)?;
                        if pad < 0.0 {
                            return Err(schema(&vp, "padding must be ≥ 0"));
                        }
                        pad
                    }
                    None => DEFAULT_PADDING,
                };
                let position = o.get("position")?.map(|(n, p)| position(n, &p).map(|pos| (pos, p))).transpose()?;
                if let Some((Position { kind: PositionKind::Anchor1D(_), .. }, pp)) = &position {
                    return Err(schema(pp, "an enclosure takes a fixed or anchor position, not anchor1D"));
                }
                Ok(EnclosureAnn { shape, position: position.map(|p| p.0), padding })
            })
        })
        .transpose()?;

    let conn_base = Style {
        stroke: text.as_ref().map_or_else(|| DEFAULT_STROKE.to_string(), |t| t.style.stroke.clone()),
        ..Style::default()
    };
    let connector = conn_n
        .map(|(n, p)| {
            effect(n, &p, ri, "connector", conn_base, ids, |o| {
                let markers = match o.get("markers")? {
                    Some((m, mp)) => enum_str(
                        m,
                        &mp,
                        &[Markers::None, Markers::ArrowStart, Markers::ArrowEnd, Markers::ArrowBoth],
                        Markers::name,
                    )?,
                    None => Markers::None,
                };
                let path_override = match o.get("path")? {
                    Some((d, dp)) => {
                        let d = string(d, &dp)?;
                        PathData::parse(&d).map_err(|e| schema(&dp, e.to_string()))?;
                        Some(d)
                    }
                    None => None,
                };
                let interpolation = match o.get("interpolation")? {
                    Some((m, mp)) => enum_str(
                        m,
                        &mp,
                        &[Interpolation::Linear, Interpolation::CatmullRom, Interpolation::Stepwise],
                        Interpolation::name,
                    )?,
                    None => Interpolation::Linear,
                };
                Ok(ConnectorAnn { markers, path_override, interpolation })
            })
        })
        .transpose()?;

    let indicator = ind_n
        .map(|(n, p)| {
            effect(n, &p, ri, "indicator", Style::default(), ids, |o| {
                let (k, kp) = o.req("kind")?;
                let kind =
                    enum_str(k, &kp, &[IndicatorKind::Line, IndicatorKind::Area, IndicatorKind::Arrow], IndicatorKind::name)?;
                let axis = match o.get("axis")? {
                    Some((a, ap)) => enum_str(a, &ap, &[AxisName::X, AxisName::Y], AxisName::name)?,
                    None => AxisName::Y,
                };
                let (e, ep) = o.req("expr")?;
                let expr = match e {
                    Node::Array(items) => {
                        if items.len() != 2 {
                            return Err(schema(&ep, "an interval is [lo, hi]"));
                        }
                        if kind != IndicatorKind::Area {
                            return Err(schema(&ep, format!("a {} indicator takes a single expression", kind.name())));
                        }
                        IndicatorExpr::Interval(expression(&items[0], &index(&ep, 0))?, expression(&items[1], &index(&ep, 1))?)
                    }
                    e => IndicatorExpr::Single(expression(e, &ep)?),
                };
                Ok(IndicatorAnn { kind, axis, expr })
            })
        })
        .transpose()?;

    o.finish()?;
    Ok(AnnotationRoot { targets, text, enclosure, connector, indicator })
}

fn ensemble(n: &Node, path: &str, ids: &mut Ids) -> Result<Ensemble> {
    let Node::Object(members) = n else {
        return Err(schema(path, format!("expected an ensemble object, found {}", n.kind())));
    };
    if members.len() != 1 {
        return Err(schema(path, "an ensemble has exactly one key: reference or composite"));
    }
    let (key, v) = &members[0];
    let p = child(path, key);
    let mut o = Obj::new(v, &p)?;
    let out = match key.as_str() {
        "reference" => {
            let (f, fp) = o.req("from")?;
            let (t, tp) = o.req("to")?;
            let from = nonempty(f, &fp)?;
            let to = nonempty(t, &tp)?;
            if from == to {
                return Err(schema(&tp, "a reference needs two different ids"));
            }
            let style = style(&mut o, Style::default())?;
            Ensemble::Reference { from, to, style }
        }
        "composite" => {
            let (i, ip) = o.req("id")?;
            let id = nonempty(i, &ip)?;
            ids.claim(&id, &ip)?;
            let (m, mp) = o.req("members")?;
            let items = array(m, &mp)?;
            if items.is_empty() {
                return Err(schema(&mp, "members must not be empty"));
            }
            let mut members = Vec::new();
            for (k, item) in items.iter().enumerate() {
                let s = nonempty(item, &index(&mp, k))?;
                if !members.contains(&s) {
                    members.push(s);
                }
            }
            Ensemble::Composite { id, members }
        }
        other => return Err(schema(&p, format!("unknown ensemble kind `{other}`"))),
    };
    o.finish()?;
    Ok(out)
}

/// Parses a spec document. Expressions are parsed but not type-checked;
/// see [`super::bind`].
pub fn parse_spec(doc: &Node) -> Result<Spec> {
    let mut o = Obj::new(doc, "")?;
    let (c, cp) = o.req("chart")?;
    let chart = chart(c, &cp)?;
    let (d, dp) = o.req("data")?;
    let data = data(d, &dp)?;
    let mut ids = Ids { seen: Vec::new() };
    let mut annotations = Vec::new();
    if let Some((a, ap)) = o.get("annotations")? {
        for (i, r) in array(a, &ap)?.iter().enumerate() {
            annotations.push(root(r, &index(&ap, i), i, &mut ids)?);
        }
    }
    let mut ensembles = Vec::new();
    if let Some((e, ep)) = o.get("ensembles")? {
        for (i, en) in array(e, &ep)?.iter().enumerate() {
            ensembles.push(ensemble(en, &index(&ep, i), &mut ids)?);
        }
    }
    o.finish()?;
    Ok(Spec { chart, data, annotations, ensembles })
}

pub fn parse_spec_str(text: &str) -> Result<Spec> {
    let node = json::parse(text).map_err(|e| SpecError::Json(e.to_string()))?;
    parse_spec(&node)
}
