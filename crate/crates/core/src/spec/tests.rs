use super::*;
use crate::data::{ColumnType, Schema};

fn wrap(annotations: &str) -> String {
    format!(
        r#"{{"chart": {{"mark": "point", "encoding": {{
            "x": {{"field": "a", "type": "quantitative"}},
            "y": {{"field": "b", "type": "quantitative"}}}}}},
          "data": {{"values": [{{"a": 1, "b": 2}}]}},
          "annotations": {annotations}}}"#
    )
}

fn schema() -> Schema {
    Schema::new([("a".to_string(), ColumnType::Number), ("b".to_string(), ColumnType::Number)])
}

#[test]
fn minimal_root_gets_auto_id() {
    let s = parse_spec_str(&wrap(r#"[{"targets": [{"dataPoint": {"indices": [0]}}], "text": {"content": "hi"}}]"#))
        .unwrap();
    let t = s.annotations[0].text.as_ref().unwrap();
    assert_eq!(t.id, "anno/0/text");
    assert_eq!(t.style, Style::default());
    assert_eq!(s.annotations[0].targets, vec![Target::DataPoint(DataSelector::Indices(vec![0]))]);
}

#[test]
fn duplicate_effect_keys() {
    let e = parse_spec_str(&wrap(
        r#"[{"targets": ["none"], "text": {"content": "a"}}, {"targets": ["none"], "text": {"content": "a"}, "text": {"content": "b"}}]"#,
    ))
    .unwrap_err();
    assert_eq!(e.code(), "MultipleEffectsOfType");
    assert_eq!(e.path(), "/annotations/1/text");

    let e = parse_spec_str(&wrap(r#"[{"targets": ["none"], "text": [{"content": "a"}, {"content": "b"}]}]"#)).unwrap_err();
    assert_eq!(e.code(), "MultipleEffectsOfType");
    assert_eq!(e.path(), "/annotations/0/text/1");
}

#[test]
fn empty_targets() {
    let e = parse_spec_str(&wrap(r#"[{"targets": [], "text": {"content": "a"}}]"#)).unwrap_err();
    assert_eq!(e.code(), "EmptyTargets");
    assert_eq!(e.path(), "/annotations/0/targets");
}

#[test]
fn schema_errors_carry_paths() {
    let cases = [
        (r#"[{"targets": ["none"], "text": {"content": "a", "colour": 1}}]"#, "/annotations/0/text/colour"),
        (r#"[{"targets": [{"axis": {"axis": "z", "parts": "tick"}}], "text": {"content": "a"}}]"#, "/annotations/0/targets/0/axis/axis"),
        (r#"[{"targets": [{"dataPoint": {"indices": [-1]}}], "text": {"content": "a"}}]"#, "/annotations/0/targets/0/dataPoint/indices/0"),
        (r#"[{"targets": [{"fixed": {"type": "pixel", "x": "a", "y": 1}}], "text": {"content": "a"}}]"#, "/annotations/0/targets/0/fixed/x"),
        (r#"[{"targets": ["none"], "text": {"content": "a", "style": {"stroke": "red"}}}]"#, "/annotations/0/text/style/stroke"),
        (r#"[{"targets": ["none"], "enclosure": {"shape": "path", "d": "Q"}}]"#, "/annotations/0/enclosure/d"),
        (r#"[{"targets": ["none"]}]"#, "/annotations/0"),
    ];
    for (src, path) in cases {
        let e = parse_spec_str(&wrap(src)).unwrap_err();
        assert_eq!(e.code(), "SchemaError", "{src}: {e}");
        assert_eq!(e.path(), path, "{src}");
    }
}

#[test]
fn duplicate_ids() {
    let e = parse_spec_str(&wrap(
        r#"[{"targets": ["none"], "text": {"id": "t", "content": "a"}}, {"targets": ["none"], "text": {"id": "t", "content": "b"}}]"#,
    ))
    .unwrap_err();
    assert_eq!(e.code(), "DuplicateId");
    assert_eq!(e.path(), "/annotations/1/text/id");
}

#[test]
fn expression_syntax_errors_are_reported_at_parse() {
    let e = parse_spec_str(&wrap(r#"[{"targets": [{"dataPoint": {"expr": "datum.a >"}}], "text": {"content": "a"}}]"#))
        .unwrap_err();
    assert_eq!(e.code(), "SyntaxError");
    assert_eq!(e.path(), "/annotations/0/targets/0/dataPoint/expr");
}

#[test]
fn connector_inherits_text_stroke() {
    let s = parse_spec_str(&wrap(
        r##"[{"targets": ["none"], "text": {"content": "a", "style": {"stroke": "#AA0000"}}, "connector": {}}]"##,
    ))
    .unwrap();
    assert_eq!(s.annotations[0].connector.as_ref().unwrap().style.stroke, "#aa0000");
}

#[test]
fn serialization_materializes_defaults_and_is_canonical() {
    let s = parse_spec_str(&wrap(r#"[{"targets": ["none"], "text": {"content": "hi"}}]"#)).unwrap();
    let v = serialize_spec(&s);
    let style = &v["annotations"][0]["text"]["style"];
    assert_eq!(style["stroke"], "#333333");
    assert_eq!(style["fontSize"], 11);
    assert_eq!(style["fill"], "none");
    assert_eq!(serialize_spec_string(&s), serialize_spec_string(&s));
    let back = parse_spec_str(&serialize_spec_string(&s)).unwrap();
    assert_eq!(back, s);
}

#[test]
fn full_round_trip() {
    let src = r##"[
      {"targets": [{"axis": {"axis": "x", "parts": ["tick-label", "tick"], "range": [2, 5]}}],
       "enclosure": {"shape": "ellipse", "padding": 2, "style": {"dash": [3, 2]}}},
      {"targets": [{"axis": {"axis": "y", "parts": "grid", "range": "datum.value > 1"}}],
       "text": {"id": "t1", "content": "x", "position": {"anchor1D": "mid", "dx": 3}}},
      {"targets": [{"fixed": {"type": "data", "x": 1, "y": 2}}, {"chartPart": "title"}],
       "text": {"content": "y", "position": {"type": "pixel", "x": 10, "y": 20}},
       "enclosure": {"shape": "path", "d": "M0 0 L10 0 L5 8 Z"},
       "connector": {"markers": "arrow-both", "interpolation": "catmull-rom", "path": "M0 0 C 1 1 2 2 3 3"}},
      {"targets": [{"id": "t1"}], "indicator": {"kind": "area", "expr": ["1", "mean(b)"], "style": {"fill": "#00ff00", "opacity": 0.25}}},
      {"targets": [{"dataPoint": {"expr": "datum.a >= 1 && !(datum.b == 3)"}}],
       "indicator": {"kind": "line", "axis": "x", "expr": "max(a) - 0.5"}, "text": {"content": "z", "position": {"anchor": "downRight"}}}
    ]"##;
    let doc = wrap(src).replace(
        r#""annotations""#,
        r#""ensembles": [{"reference": {"from": "t1", "to": "anno/4/text"}}, {"composite": {"id": "g", "members": ["t1", "anno/2/text"]}}], "annotations""#,
    );
    let s = parse_spec_str(&doc).unwrap();
    let out = serialize_spec_string(&s);
    let back = parse_spec_str(&out).unwrap();
    assert_eq!(back, s);
    assert_eq!(serialize_spec_string(&back), out);
    bind(&s, &schema()).unwrap();
}

#[test]
fn bind_type_checks() {
    let bad = [
        (r#"[{"targets": [{"dataPoint": {"expr": "datum.a + 1"}}], "text": {"content": "a"}}]"#, "TypeError"),
        (r#"[{"targets": [{"dataPoint": {"expr": "datum.zz > 1"}}], "text": {"content": "a"}}]"#, "UnknownField"),
        (r#"[{"targets": ["none"], "indicator": {"kind": "line", "expr": "datum.a"}}]"#, "TypeError"),
        (r#"[{"targets": ["none"], "indicator": {"kind": "line", "expr": "\"x\""}}]"#, "TypeError"),
    ];
    for (src, code) in bad {
        let s = parse_spec_str(&wrap(src)).unwrap();
        assert_eq!(bind(&s, &schema()).unwrap_err().code(), code, "{src}");
    }
    let ok = parse_spec_str(&wrap(r#"[{"targets": ["none"], "indicator": {"kind": "area", "expr": "datum.a > 0"}}]"#)).unwrap();
    bind(&ok, &schema()).unwrap();
}

#[test]
fn malformed_json() {
    assert_eq!(parse_spec_str("{").unwrap_err().code(), "MalformedJson");
}
