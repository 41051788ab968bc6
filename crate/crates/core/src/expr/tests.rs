use super::*;
use crate::data::{Column, ColumnType, DataTable, Value};
use crate::diag::Diagnostics;
use proptest::prelude::*;

fn schema_x() -> Schema {
    Schema::new([("x".to_string(), ColumnType::Number)])
}

fn temps(vals: &[Option<f64>]) -> DataTable {
    DataTable::new(
        vec![Column { name: "t".into(), ty: ColumnType::Number }],
        vals.iter().map(|v| vec![v.map_or(Value::Null, Value::Number)]).collect(),
    )
    .unwrap()
}

#[test]
fn comparison_node() {
    let e = parse_expr("datum.x > 2", &schema_x()).unwrap();
    assert_eq!(
        e,
        Expr::binary(BinOp::Gt, Expr::Field("x".into()), Expr::Lit(Literal::Number(2.0)))
    );
}

#[test]
fn unknown_field() {
    assert_eq!(parse_expr("datum.q > 1", &schema_x()).unwrap_err().code(), "UnknownField");
    assert_eq!(parse_expr("max(q) > 1", &schema_x()).unwrap_err().code(), "UnknownField");
}

#[test]
fn precedence() {
    let t = temps(&[Some(1.0)]);
    let e = parse_expr("1 + 2 * 3", &t.schema()).unwrap();
    assert_eq!(eval_constant(&e, &t).unwrap(), Scalar::Number(7.0));
    let e = parse_expr("(1 + 2) * 3", &t.schema()).unwrap();
    assert_eq!(eval_constant(&e, &t).unwrap(), Scalar::Number(9.0));
    let e = parse("!true || true && false").unwrap();
    assert_eq!(e.to_string(), "(!(true) || (true && false))");
}

#[test]
fn syntax_errors_carry_position() {
    match parse("datum.x > ").unwrap_err() {
        ExprError::Syntax { pos, .. } => assert_eq!(pos, 10),
        e => panic!("{e:?}"),
    }
    assert!(matches!(parse("1 < 2 < 3"), Err(ExprError::Syntax { .. })));
    assert!(matches!(parse("foo(x)"), Err(ExprError::Syntax { .. })));
    assert!(matches!(parse("\"abc"), Err(ExprError::Syntax { .. })));
    assert!(matches!(parse("   "), Err(ExprError::Syntax { pos: 0, .. })));
}

#[test]
fn type_errors() {
    let s = Schema::new([("x".to_string(), ColumnType::Number), ("s".to_string(), ColumnType::String)]);
    for src in ["datum.x > \"a\"", "datum.s + 1", "datum.x && true", "!datum.x", "mean(s)", "true < false"] {
        assert_eq!(parse_expr(src, &s).unwrap_err().code(), "TypeError", "{src}");
    }
}

#[test]
fn eval_examples() {
    let t = temps(&[Some(35.0)]);
    let e = parse_expr("datum.t > 30", &t.schema()).unwrap();
    assert_eq!(eval_row(&e, 0, &t).unwrap(), Scalar::Bool(true));

    let t = temps(&[Some(2.0), Some(5.0), Some(1.0)]);
    let e = parse_expr("max(t)", &t.schema()).unwrap();
    assert_eq!(eval_row(&e, 0, &t).unwrap(), Scalar::Number(5.0));
}

#[test]
fn argmax_selection_matches_scan() {
    let vals = [Some(2.0), Some(5.0), None, Some(5.0), Some(1.0)];
    let t = temps(&vals);
    let e = parse_expr("datum.t == max(t)", &t.schema()).unwrap();
    let mut d = Diagnostics::new();
    let got = select_rows(&e, &t, &mut d).unwrap();
    // Brute force: the maximum of the non-null cells, then every row equal to it.
    let m = vals.iter().flatten().copied().fold(f64::MIN, f64::max);
    let want: Vec<usize> = vals.iter().enumerate().filter(|(_, v)| **v == Some(m)).map(|(i, _)| i).collect();
    assert_eq!(got, want);
    assert_eq!(d.items().len(), 1, "null row reported");
}

#[test]
fn select_edge_cases() {
    let t = temps(&[Some(1.0), Some(4.0), Some(2.0)]);
    let mut d = Diagnostics::new();
    let all = parse_expr("1 == 1", &t.schema()).unwrap();
    assert_eq!(select_rows(&all, &t, &mut d).unwrap(), vec![0, 1, 2]);
    let none = parse_expr("datum.t > max(t)", &t.schema()).unwrap();
    assert!(select_rows(&none, &t, &mut d).unwrap().is_empty());
    let not_bool = parse_expr("datum.t + 1", &t.schema()).unwrap();
    assert_eq!(select_rows(&not_bool, &t, &mut d).unwrap_err().code(), "TypeError");
}

#[test]
fn division_by_zero_is_an_error() {
    let t = temps(&[Some(0.0), Some(2.0)]);
    let e = parse_expr("1 / datum.t > 0", &t.schema()).unwrap();
    assert_eq!(eval_row(&e, 0, &t).unwrap_err(), ExprError::DivisionByZero);
    let mut d = Diagnostics::new();
    assert_eq!(select_rows(&e, &t, &mut d).unwrap(), vec![1]);
    assert_eq!(d.items()[0].code, "RowsSkipped");
}

#[test]
fn aggregates_skip_nulls() {
    let t = temps(&[Some(2.0), None, Some(4.0)]);
    for (src, want) in [("mean(t)", 3.0), ("sum(t)", 6.0), ("count(t)", 2.0), ("min(t)", 2.0)] {
        let e = parse_expr(src, &t.schema()).unwrap();
        assert_eq!(eval_constant(&e, &t).unwrap(), Scalar::Number(want), "{src}");
    }
    let empty = temps(&[None]);
    let e = parse_expr("max(t)", &empty.schema()).unwrap();
    assert_eq!(eval_constant(&e, &empty).unwrap_err().code(), "NullOperand");
}

#[test]
fn temporal_literals() {
    let t = DataTable::new(
        vec![Column { name: "d".into(), ty: ColumnType::Temporal }],
        vec![
            vec![Value::Temporal(crate::data::parse_temporal("2020-01-01").unwrap())],
            vec![Value::Temporal(crate::data::parse_temporal("2021-06-01").unwrap())],
        ],
    )
    .unwrap();
    let e = parse_expr("datum.d >= \"2021-01-01\"", &t.schema()).unwrap();
    assert_eq!(select_rows(&e, &t, &mut Diagnostics::new()).unwrap(), vec![1]);
    assert_eq!(parse_expr("datum.d > \"soon\"", &t.schema()).unwrap_err().code(), "TypeError");
    assert_eq!(e.to_string(), "(datum.d >= \"2021-01-01T00:00:00.000Z\")");
}

#[test]
fn bracket_fields_and_negative_literals() {
    let e = parse("datum[\"a b\"] > -3").unwrap();
    assert_eq!(e, Expr::binary(BinOp::Gt, Expr::Field("a b".into()), Expr::Lit(Literal::Number(-3.0))));
    assert_eq!(parse(&e.to_string()).unwrap(), e);
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-1e6f64..1e6).prop_map(|n| Expr::Lit(Literal::Number(n))),
        "[a-z \"\\\\]{0,5}".prop_map(|s| Expr::Lit(Literal::String(s))),
        any::<bool>().prop_map(|b| Expr::Lit(Literal::Bool(b))),
        "[a-z_][a-z0-9_ ]{0,5}".prop_map(Expr::Field),
        (
            prop_oneof![Just(AggFn::Min), Just(AggFn::Max), Just(AggFn::Mean), Just(AggFn::Sum), Just(AggFn::Count)],
            "[a-z][a-z0-9]{0,4}"
        )
            .prop_map(|(a, f)| Expr::Agg(a, f)),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let ops = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Lt),
            Just(BinOp::Le),
            Just(BinOp::Gt),
            Just(BinOp::Ge),
            Just(BinOp::Eq),
            Just(BinOp::Ne),
            Just(BinOp::And),
            Just(BinOp::Or),
        ];
        prop_oneof![
            (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            inner.clone().prop_map(|e| Expr::Unary(UnOp::Not, Box::new(e))),
            inner
                .prop_filter("negated literals fold", |e| !matches!(e, Expr::Lit(Literal::Number(_))))
                .prop_map(|e| Expr::Unary(UnOp::Neg, Box::new(e))),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, e, "{}", printed);
    }
}
