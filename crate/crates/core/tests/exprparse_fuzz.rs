use fractel::exprparse::{parse, BinOp, Bindings, Expr, UnaryOp, Var};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0.0f64..100.0).prop_map(Expr::Const),
        (0u32..20).prop_map(|k| Expr::Const(f64::from(k))),
        prop_oneof![Just(Var::X), Just(Var::Y), Just(Var::T), Just(Var::S)].prop_map(Expr::Var),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 64, 2, |inner| {
        let unary = prop_oneof![
            Just(UnaryOp::Neg),
            Just(UnaryOp::Exp),
            Just(UnaryOp::Sin),
            Just(UnaryOp::Cos),
            Just(UnaryOp::Sqrt),
            Just(UnaryOp::Abs),
        ];
        let binary = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, a)| Expr::Unary(op, Box::new(a))),
            (binary, inner.clone(), inner).prop_map(|(op, l, r)| Expr::Binary(op, Box::new(l), Box::new(r))),
        ]
    })
}

fn bindings() -> impl Strategy<Value = Bindings> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y, t, s)| Bindings::new().x(x).y(y).t(t).s(s))
}

const TOKENS: &[&str] = &[
    "x", "y", "t", "s", "pi", "e", "1", "2.5", "1e3", ".5", "+", "-", "*", "/", "^", "(", ")", "exp", "sin", "cos", "sqrt",
    "abs", " ", "foo", ",", "1e", "..",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printed_trees_reparse_to_themselves(e in expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
        prop_assert_eq!(back.to_string(), printed.clone());
        let again = parse(&back.to_string()).unwrap();
        prop_assert_eq!(again, back);
    }

    #[test]
    fn reparsed_trees_evaluate_identically(e in expr(), b in bindings()) {
        let back = parse(&e.to_string()).unwrap();
        match (e.eval(&b), back.eval(&b)) {
            (Ok(u), Ok(v)) => prop_assert_eq!(u.to_bits(), v.to_bits()),
            (Err(_), Err(_)) => {}
            (u, v) => prop_assert!(false, "{} gave {:?} then {:?}", e, u, v),
        }
    }

    #[test]
    fn evaluation_never_yields_non_finite_values(e in expr(), b in bindings()) {
        if let Ok(v) = e.eval(&b) {
            prop_assert!(v.is_finite());
        }
        prop_assert_eq!(e.eval(&b), e.eval(&b));
    }

    #[test]
    fn random_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let src = String::from_utf8_lossy(&bytes);
        if let Err(err) = parse(&src) {
            prop_assert!(err.offset() <= src.len());
            let _ = err.caret(&src);
        }
    }

    #[test]
    fn token_soup_never_panics(idx in proptest::collection::vec(0..TOKENS.len(), 0..40), b in bindings()) {
        let src: String = idx.iter().map(|&i| TOKENS[i]).collect();
        match parse(&src) {
            Ok(e) => {
                let _ = e.eval(&b);
            }
            Err(err) => prop_assert!(err.offset() <= src.len()),
        }
    }
}

#[test]
fn precedence_table() {
    let b = Bindings::new().x(2.0).y(0.0);
    let cases = [
        ("2+3*4", 14.0),
        ("(2+3)*4", 20.0),
        ("2^3^2", 512.0),
        ("-x^2", -4.0),
        ("2^-1", 0.5),
        ("-2*-3", 6.0),
        ("8/4/2", 1.0),
        ("8-4-2", 2.0),
        ("x^2+exp(-y)", 5.0),
        ("  2 *\t( x + 1 ) ", 6.0),
        ("--x", 2.0),
        ("cos(pi)", -1.0),
        ("e^0", 1.0),
    ];
    for (src, want) in cases {
        let got = parse(src).unwrap().eval(&b).unwrap();
        assert!((got - want).abs() < 1e-15, "{src}: {got} vs {want}");
    }
}

#[test]
fn malformed_inputs_are_rejected_with_offsets() {
    let cases = [("sin(", 4), ("", 0), ("2+", 2), ("(1", 2), ("1)", 1), ("2**3", 2), ("x y", 2)];
    for (src, offset) in cases {
        let err = parse(src).unwrap_err();
        assert_eq!(err.offset(), offset, "{src}: {err}");
    }
    assert!(parse("z+1").is_err());
    assert!(parse("sinx").is_err());
}
