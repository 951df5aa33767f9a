use super::*;
use proptest::prelude::*;

fn env_ab() -> ParamEnv {
    ParamEnv::from_pairs([("a", 1.0), ("b", 1.0)]).unwrap()
}

fn canon(text: &str) -> Expr {
    parse(text).unwrap().simplify()
}

#[test]
fn parses_and_evaluates_cellular_stream() {
    let e = parse("sin(a*x1)*sin(b*x2)").unwrap();
    assert_eq!(e.eval([0.0, 0.0], &env_ab()).unwrap(), 0.0);
}

#[test]
fn parses_cosh_stream() {
    let e = parse("x2*cosh(x1)").unwrap();
    assert_eq!(e.eval([0.0, 3.0], &ParamEnv::new()).unwrap(), 3.0);
}

#[test]
fn syntax_error_offset() {
    assert_eq!(
        parse("1+").unwrap_err(),
        ExprError::Syntax { offset: 2, message: "unexpected end of input".into() }
    );
    assert!(matches!(parse("(x1"), Err(ExprError::Syntax { offset: 3, .. })));
    assert!(matches!(parse("x1 x2"), Err(ExprError::Syntax { offset: 3, .. })));
}

#[test]
fn empty_and_unknown_function() {
    assert_eq!(parse("   ").unwrap_err(), ExprError::Empty);
    assert_eq!(
        parse("2*foo(x1)").unwrap_err(),
        ExprError::UnknownFunction { name: "foo".into(), offset: 2 }
    );
}

#[test]
fn precedence_and_associativity() {
    let env = ParamEnv::new();
    let ev = |s: &str| parse(s).unwrap().eval([2.0, 3.0], &env).unwrap();
    assert_eq!(ev("2^3^2"), 512.0);
    assert_eq!(ev("-2^2"), -4.0);
    assert_eq!(ev("(-2)^2"), 4.0);
    assert_eq!(ev("1-2-3"), -4.0);
    assert_eq!(ev("8/4/2"), 1.0);
    assert_eq!(ev("x1+x2*2"), 8.0);
    assert_eq!(ev("x1^-1"), 0.5);
    assert_eq!(ev("-x1*x2"), -6.0);
    assert_eq!(ev("pi"), std::f64::consts::PI);
    assert_eq!(ev("1.5e2"), 150.0);
}

#[test]
fn unary_minus_folds_only_literals() {
    assert_eq!(parse("-2").unwrap(), Expr::Const(-2.0));
    assert_eq!(parse("-(2)").unwrap(), Expr::neg(Expr::c(2.0)));
    assert_eq!(parse("-x1").unwrap(), Expr::neg(Expr::x1()));
}

#[test]
fn evaluation_examples() {
    let env = ParamEnv::new();
    assert_eq!(parse("cosh(x1)").unwrap().eval([0.0, 0.0], &env).unwrap(), 1.0);
    assert_eq!(parse("x1^2+x2^2").unwrap().eval([3.0, 4.0], &env).unwrap(), 25.0);
}

#[test]
fn domain_errors_name_the_subtree() {
    let env = ParamEnv::new();
    match parse("ln(x1)").unwrap().eval([-1.0, 0.0], &env) {
        Err(ExprError::Domain { op, subtree }) => {
            assert_eq!(op, "ln");
            assert_eq!(subtree, "ln(x1)");
        }
        other => panic!("expected domain error, got {other:?}"),
    }
    assert!(matches!(
        parse("1/x1").unwrap().eval([0.0, 0.0], &env),
        Err(ExprError::Domain { .. })
    ));
    assert!(matches!(
        parse("sqrt(x1)").unwrap().eval([-1.0, 0.0], &env),
        Err(ExprError::Domain { .. })
    ));
    assert!(matches!(
        parse("x1^0.5").unwrap().eval([-1.0, 0.0], &env),
        Err(ExprError::Domain { .. })
    ));
    assert_eq!(parse("x1^3").unwrap().eval([-2.0, 0.0], &env).unwrap(), -8.0);
}

#[test]
fn unbound_parameter() {
    assert_eq!(
        parse("a*x1").unwrap().eval([1.0, 1.0], &ParamEnv::new()).unwrap_err(),
        ExprError::UnboundParameter("a".into())
    );
}

#[test]
fn param_env_rejects_duplicates_and_non_finite() {
    assert!(matches!(
        ParamEnv::from_pairs([("a", 1.0), ("a", 2.0)]),
        Err(ExprError::DuplicateParameter(_))
    ));
    assert!(matches!(
        ParamEnv::from_pairs([("a", f64::NAN)]),
        Err(ExprError::NonFiniteParameter { .. })
    ));
}

#[test]
fn derivative_examples() {
    assert_eq!(parse("x2*cosh(x1)").unwrap().differentiate(Var::X1), canon("x2*sinh(x1)"));
    assert_eq!(parse("sin(a*x1)").unwrap().differentiate(Var::X2), Expr::Const(0.0));
    let d = parse("sin(a*x1)*sin(b*x2)").unwrap().differentiate(Var::X1);
    assert_eq!(d, canon("a*cos(a*x1)*sin(b*x2)"));
    assert_eq!(d.to_string(), "a*cos(a*x1)*sin(b*x2)");
    assert_eq!(parse("x1^2").unwrap().differentiate(Var::X1).to_string(), "2*x1");
}

#[test]
fn laplacian_of_cosh_stream_is_itself() {
    let u = parse("x2*cosh(x1)").unwrap();
    let lap = u.laplacian();
    for &x in &[[0.3, -1.2], [1.7, 0.4], [-2.0, 2.0]] {
        let a = lap.eval(x, &ParamEnv::new()).unwrap();
        let b = u.eval(x, &ParamEnv::new()).unwrap();
        assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
    }
}

#[test]
fn simplify_examples() {
    assert_eq!(parse("0*cosh(x1)+x2").unwrap().simplify(), Expr::x2());
    assert_eq!(parse("1*sin(x1)").unwrap().simplify().to_string(), "sin(x1)");
    assert_eq!(parse("2+3").unwrap().simplify(), Expr::Const(5.0));
    assert_eq!(parse("x1-x1").unwrap().simplify(), Expr::Const(0.0));
    assert_eq!(parse("--x1").unwrap().simplify(), Expr::x1());
}

#[test]
fn simplify_keeps_domain_errors() {
    let e = parse("ln(0-1)").unwrap().simplify();
    assert!(e.eval_bound([0.0, 0.0]).is_err());
}

#[test]
fn bind_substitutes_parameters() {
    let e = parse("sin(a*x1)").unwrap();
    let env = ParamEnv::from_pairs([("a", 2.0)]).unwrap();
    let bound = e.bind(&env).unwrap();
    assert!(bound.params().is_empty());
    assert_eq!(bound.eval_bound([0.25, 0.0]).unwrap(), (0.5f64).sin());
}

#[test]
fn printing_round_trips_tricky_shapes() {
    for text in [
        "-(2)",
        "(-2)^x1",
        "x1--2",
        "x1^-2",
        "-(x1+x2)*3",
        "x1-(x2-1)",
        "x1/(x2*3)",
        "(x1^2)^3",
        "x1^2^3",
        "-x1^2",
        "--x1",
        "-(-2)",
    ] {
        let e = parse(text).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e, "{text} printed as {printed}");
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3.0f64..3.0).prop_map(Expr::Const),
        Just(Expr::x1()),
        Just(Expr::x2()),
    ]
}

/// Expressions that are smooth and bounded-ish on [-1, 1]².
fn smooth_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(
                a,
                Expr::add(Expr::c(2.5), Expr::unary(UnaryOp::Sin, b))
            )),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Cos, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Tanh, a)),
            inner.clone().prop_map(|a| Expr::unary(
                UnaryOp::Exp,
                Expr::unary(UnaryOp::Sin, a)
            )),
            inner.clone().prop_map(|a| Expr::unary(
                UnaryOp::Sinh,
                Expr::unary(UnaryOp::Cos, a)
            )),
            inner.clone().prop_map(|a| Expr::unary(
                UnaryOp::Sqrt,
                Expr::add(Expr::c(1.0), Expr::pow(a, Expr::c(2.0)))
            )),
            inner.clone().prop_map(|a| Expr::unary(
                UnaryOp::Ln,
                Expr::add(Expr::c(2.0), Expr::unary(UnaryOp::Cos, a))
            )),
            (inner.clone(), 1u8..4).prop_map(|(a, k)| Expr::pow(a, Expr::c(k as f64))),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| [a, b])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(e in smooth_expr(), x in point()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        let env = ParamEnv::new();
        let (a, b) = (e.eval(x, &env), back.eval(x, &env));
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits(), "{}", printed),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?} for {}", a, b, printed),
        }
    }

    #[test]
    fn derivative_matches_central_difference(e in smooth_expr(), x in point(), wrt in prop_oneof![Just(Var::X1), Just(Var::X2)]) {
        let env = ParamEnv::new();
        let h = 1e-5;
        let step = |s: f64| match wrt {
            Var::X1 => [x[0] + s, x[1]],
            Var::X2 => [x[0], x[1] + s],
        };
        let (Ok(fp), Ok(fm)) = (e.eval(step(h), &env), e.eval(step(-h), &env)) else {
            return Ok(());
        };
        let fd = (fp - fm) / (2.0 * h);
        let exact = e.differentiate(wrt).eval(x, &env).unwrap();
        prop_assume!(exact.abs() < 1e4);
        prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "{} d/{:?}: {} vs {}", e, wrt, exact, fd);
    }

    #[test]
    fn simplify_preserves_value(e in smooth_expr(), x in point()) {
        let env = ParamEnv::new();
        if let Ok(a) = e.eval(x, &env) {
            let b = e.simplify().eval(x, &env).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{}: {} vs {}", e, a, b);
        }
    }
}
