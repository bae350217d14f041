mod common;

use proptest::prelude::*;
use submanifold::catalog::catalog_entries;
use submanifold::dsl::{parse_embedding, parse_embedding_bytes, parse_expression, Expr};
use submanifold::{eval_ast, jet_eval, Jet};

const VARS: [&str; 2] = ["x", "y"];

fn expr_source() -> impl Strategy<Value = String> {
    let leaf =
        prop_oneof![Just("x".to_string()), Just("y".to_string()), (-3.0f64..3.0).prop_map(|c| format!("{c:?}")),];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]))
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), prop::sample::select(vec!["sin", "cos", "sinh", "cosh", "exp", "log", "sqrt"]))
                .prop_map(|(a, f)| format!("{f}({a})")),
            (inner.clone(), prop::sample::select(vec!["2", "3", "-1", "0.5", "1.5"]))
                .prop_map(|(a, e)| format!("({a})^({e})")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

fn parse(src: &str) -> Expr {
    parse_expression(src, &VARS).unwrap()
}

fn jets(point: &[f64]) -> Vec<Jet> {
    (0..2).map(|i| Jet::var(i, point[i], 2)).collect()
}

/// Bitwise equality with every NaN treated as equal.
fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-10 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parsing_arbitrary_bytes_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = parse_embedding_bytes(&bytes);
    }

    #[test]
    fn parsing_near_miss_sources_never_panics(cut in 0usize..400, insert in any::<char>()) {
        let src = catalog_entries()[5].source;
        let mut s: String = src.chars().take(cut).collect();
        s.push(insert);
        s.extend(src.chars().skip(cut));
        let _ = parse_embedding(&s);
    }

    #[test]
    fn print_parse_round_trip(src in expr_source()) {
        let e = parse(&src);
        let vars = vec!["x".to_string(), "y".to_string()];
        let printed = e.display(&vars).to_string();
        prop_assert_eq!(parse(&printed), e);
    }

    #[test]
    fn eval_matches_jet_value_exactly(src in expr_source(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let e = parse(&src);
        let plain = eval_ast(&e, &[x, y]);
        let jet = e.eval_jet(&jets(&[x, y]));
        match (plain, jet) {
            (Ok(v), Ok(j)) => prop_assert!(v.to_bits() == j.value().to_bits() || (v.is_nan() && j.value().is_nan()),
                "{} vs {}", v, j.value()),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "disagree: {:?} vs {:?}", a.map(|_| ()), b.map(|j| j.value())),
        }
    }

    #[test]
    fn leibniz_rule(f in expr_source(), g in expr_source(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let vars = jets(&[x, y]);
        let (Ok(fj), Ok(gj)) = (parse(&f).eval_jet(&vars), parse(&g).eval_jet(&vars)) else { return Ok(()); };
        let product = parse(&format!("({f}) * ({g})")).eval_jet(&vars).unwrap();
        let expected = &fj * &gj;
        prop_assert!(same_bits(product.coeffs(), expected.coeffs()), "{:?} vs {:?}", product.coeffs(), expected.coeffs());
        let scale = fj.coeffs().iter().chain(gj.coeffs()).fold(1.0f64, |m, c| m.max(c.abs())).powi(2);
        prop_assume!(scale.is_finite() && scale < 1e12);
        for i in 0..2 {
            let want = fj.partial(&[i]) * gj.value() + fj.value() * gj.partial(&[i]);
            prop_assert!(close(product.partial(&[i]), want, scale));
            for j in 0..2 {
                let want = fj.partial(&[i, j]) * gj.value() + fj.partial(&[i]) * gj.partial(&[j])
                    + fj.partial(&[j]) * gj.partial(&[i]) + fj.value() * gj.partial(&[i, j]);
                prop_assert!(close(product.partial(&[i, j]), want, scale));
            }
        }
    }

    #[test]
    fn chain_rule(f in expr_source(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let vars = jets(&[x, y]);
        let Ok(fj) = parse(&f).eval_jet(&vars) else { return Ok(()); };
        let composed = parse(&format!("sin({f})")).eval_jet(&vars).unwrap();
        let expected = fj.sin();
        prop_assert!(same_bits(composed.coeffs(), expected.coeffs()), "{:?} vs {:?}", composed.coeffs(), expected.coeffs());
        let scale = fj.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs())).powi(3);
        prop_assume!(scale.is_finite() && scale < 1e12);
        let (s, c) = fj.value().sin_cos();
        for i in 0..2 {
            prop_assert!(close(composed.partial(&[i]), c * fj.partial(&[i]), scale));
            for j in 0..2 {
                let want = -s * fj.partial(&[i]) * fj.partial(&[j]) + c * fj.partial(&[i, j]);
                prop_assert!(close(composed.partial(&[i, j]), want, scale));
            }
        }
    }
}

#[test]
fn catalog_eval_matches_jet_value_on_1000_points() {
    for entry in catalog_entries() {
        let map = entry.parse();
        for p in common::sample_points(&map, 1000, 11) {
            let jets = jet_eval(&map, &p).unwrap();
            for (c, j) in map.components.iter().zip(&jets) {
                assert_eq!(eval_ast(c, &p).unwrap().to_bits(), j.value().to_bits(), "{} at {p:?}", entry.name);
            }
        }
    }
}

#[test]
fn catalog_maps_round_trip_through_printing() {
    for entry in catalog_entries() {
        let map = entry.parse();
        assert_eq!(parse_embedding(&map.to_string()).unwrap(), map, "{}", entry.name);
    }
}

#[test]
fn mixed_partials_are_order_independent() {
    let map = catalog_entries()[5].parse();
    let jets = jet_eval(&map, &[0.5, 4.0, 1.0, 0.3]).unwrap();
    for j in &jets {
        for (a, b, c) in [(0, 1, 2), (3, 1, 1), (2, 0, 3)] {
            let v = j.partial(&[a, b, c]);
            for perm in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                assert_eq!(j.partial(&perm).to_bits(), v.to_bits());
            }
        }
    }
}
