use binoether_core::expr::{parse, Func, PhaseSpace, Printer, ScalarExpr};
use proptest::prelude::*;

const DOF: usize = 2;

fn space() -> PhaseSpace {
    PhaseSpace::canonical(DOF).unwrap()
}

fn leaf() -> impl Strategy<Value = ScalarExpr> {
    prop_oneof![
        (-40i32..40).prop_map(|k| ScalarExpr::Num(k as f64 / 8.0)),
        (0..2 * DOF).prop_map(ScalarExpr::Coord),
    ]
}

/// Trees built directly from the enum, bypassing constant folding.
fn any_expr() -> impl Strategy<Value = ScalarExpr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| ScalarExpr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -3i32..4).prop_map(|(a, k)| ScalarExpr::Pow(Box::new(a), k)),
            (inner, 0..4usize).prop_map(|(a, f)| {
                let f = [Func::Sin, Func::Cos, Func::Exp, Func::Ln][f];
                ScalarExpr::Call(f, Box::new(a))
            }),
        ]
    })
}

/// Polynomials: sums and products of leaves and small powers.
fn polynomial() -> impl Strategy<Value = ScalarExpr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ScalarExpr::Mul(Box::new(a), Box::new(b))),
            (inner, 0i32..4).prop_map(|(a, k)| ScalarExpr::Pow(Box::new(a), k)),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0f64..2.0, 2 * DOF)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_evaluation_equivalent(
        e in any_expr(),
        points in proptest::collection::vec(point(), 32),
    ) {
        let s = space();
        let text = Printer::new(&e, &s).to_string();
        let back = parse(&text, &s).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        for x in &points {
            match (e.eval(x), back.eval(x)) {
                (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => {
                    prop_assert!(close(a, b, 1e-12), "{text}: {a} vs {b}");
                }
                (Ok(_), Ok(_)) => {}
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{text}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn jet_gradient_matches_central_differences(e in polynomial(), x in point()) {
        let jet = e.eval_jet(&x).unwrap();
        prop_assert_eq!(jet.value, e.eval(&x).unwrap());
        let h = 1e-6;
        for i in 0..x.len() {
            let mut up = x.clone();
            let mut down = x.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (e.eval(&up).unwrap() - e.eval(&down).unwrap()) / (2.0 * h);
            // the difference quotient loses about |f| * eps / h
            let slack = 1e-6 * jet.gradient[i].abs().max(1.0) + 1e-9 * jet.value.abs();
            prop_assert!((fd - jet.gradient[i]).abs() <= slack, "d{i}: {fd} vs {}", jet.gradient[i]);
        }
    }

    #[test]
    fn jet_gradient_equals_symbolic_derivative(e in any_expr(), x in point()) {
        if let Ok(jet) = e.eval_jet(&x) {
            for i in 0..x.len() {
                if let Ok(d) = e.diff(i).eval(&x) {
                    if d.is_finite() && jet.gradient[i].is_finite() {
                        prop_assert!(close(d, jet.gradient[i], 1e-9), "d{i}: {d} vs {}", jet.gradient[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn diff_is_linear(
        f in polynomial(),
        g in polynomial(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in point(),
        i in 0..2 * DOF,
    ) {
        let combined = ScalarExpr::num(a) * f.clone() + ScalarExpr::num(b) * g.clone();
        let lhs = combined.diff(i).eval(&x).unwrap();
        let rhs = a * f.diff(i).eval(&x).unwrap() + b * g.diff(i).eval(&x).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }
}

#[test]
fn documented_examples() {
    let s = PhaseSpace::canonical(1).unwrap();
    let e = parse("(p1+q1)^2", &s).unwrap();
    assert_eq!(e.eval(&[1.0, 2.0]).unwrap(), 9.0);
    let jet = e.eval_jet(&[1.0, 2.0]).unwrap();
    assert_eq!(jet.gradient, vec![6.0, 6.0]);
    let prod = parse("p1*q1", &s).unwrap();
    assert_eq!(prod.eval_jet(&[3.0, 4.0]).unwrap().gradient, vec![4.0, 3.0]);
    assert_eq!(parse("5", &s).unwrap().eval_jet(&[0.3, -1.0]).unwrap().gradient, vec![0.0, 0.0]);
    assert!(parse("1/q1", &s).unwrap().eval(&[0.0, 1.0]).is_err());
    let d = e.diff_named("q1", &s).unwrap();
    for x in [[1.0, 2.0], [-0.5, 0.25]] {
        assert_eq!(d.eval(&x).unwrap(), 2.0 * (x[0] + x[1]));
    }
    assert!(parse("p1", &s).unwrap().diff(0).is_zero());
}
