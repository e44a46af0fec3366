//! Round trips and diagonal-environment evaluation of random words.

use std::collections::BTreeMap;

use loewner_core::chain::{Literal, Name, OperatorWord, ScalarExpr, SignedTerm, Term};
use loewner_core::dsl::{evaluate, parse_word, pretty_print, EvalError, Environment};
use loewner_core::spectral::{HermitianMatrix, SpectralError, TolerancePolicy};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = Name> {
    prop_oneof![
        (1usize..=3).prop_map(Name::T),
        (1usize..=4).prop_map(Name::P),
        (1usize..=3).prop_map(Name::W),
        Just(Name::R),
    ]
}

fn literal() -> impl Strategy<Value = Literal> {
    (1u32..=24).prop_map(|k| Literal(k as f64 / 8.0))
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        name().prop_map(Term::Name),
        literal().prop_map(Term::Number),
        (name(), literal()).prop_map(|(n, d)| Term::NameOver(n, d)),
        (literal(), literal()).prop_map(|(a, b)| Term::Ratio(a, b)),
    ]
}

fn scalar_expr() -> impl Strategy<Value = ScalarExpr> {
    prop::collection::vec((any::<bool>(), term()), 1..=3).prop_map(|ts| {
        ScalarExpr::from_terms(
            ts.into_iter()
                .map(|(negative, term)| SignedTerm { negative, term })
                .collect(),
        )
    })
}

fn word() -> impl Strategy<Value = OperatorWord> {
    let leaf = (1usize..=3, scalar_expr()).prop_map(|(i, e)| OperatorWord::symbol(i, e));
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(OperatorWord::product),
            (inner, scalar_expr()).prop_map(|(w, e)| OperatorWord::power(w, e)),
        ]
    })
}

/// Log of the diagonal entry of a word over commuting diagonal matrices.
fn log_oracle(w: &OperatorWord, logs: &BTreeMap<usize, f64>, scalars: &BTreeMap<Name, f64>, spread: &mut f64) -> f64 {
    let ev = |e: &ScalarExpr| e.eval(|n| scalars.get(&n).copied()).unwrap();
    let v = match w {
        OperatorWord::Symbol { index, exponent } => ev(exponent) * logs[index],
        OperatorWord::Product(fs) => fs.iter().map(|f| log_oracle(f, logs, scalars, spread)).sum(),
        OperatorWord::Power(c, e) => ev(e) * log_oracle(c, logs, scalars, spread),
    };
    *spread = spread.max(v.abs());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(w in word()) {
        let text = pretty_print(&w);
        prop_assert_eq!(parse_word(&text).unwrap(), w.clone());
        prop_assert_eq!(pretty_print(&parse_word(&text).unwrap()), text);
    }

    #[test]
    fn diagonal_environment_matches_scalars(
        w in word(),
        diag in prop::collection::vec(prop::collection::vec(0.6f64..1.8, 3), 3),
        t in prop::collection::vec(0.0f64..=1.0, 3),
        p in prop::collection::vec(1.0f64..2.0, 4),
        ws in prop::collection::vec(0.0f64..=1.0, 3),
        r in 0.0f64..1.5,
    ) {
        let mut env = Environment::<f64>::new(TolerancePolicy::default());
        let mut scalars = BTreeMap::new();
        for (i, v) in t.iter().enumerate() { scalars.insert(Name::T(i + 1), *v); }
        for (i, v) in p.iter().enumerate() { scalars.insert(Name::P(i + 1), *v); }
        for (i, v) in ws.iter().enumerate() { scalars.insert(Name::W(i + 1), *v); }
        scalars.insert(Name::R, r);
        for (n, v) in &scalars { env.bind_scalar(*n, *v); }
        for (i, d) in diag.iter().enumerate() {
            env.bind_matrix(i + 1, HermitianMatrix::from_diagonal(d)).unwrap();
        }
        match evaluate(&w, &env) {
            Ok(value) => {
                let got = value.as_matrix();
                for j in 0..3 {
                    let logs: BTreeMap<usize, f64> = (1..=3).map(|i| (i, diag[i - 1][j].ln())).collect();
                    let mut spread = 0.0;
                    let expected = log_oracle(&w, &logs, &scalars, &mut spread).exp();
                    let rel = (got[(j, j)] - expected).abs() / expected;
                    prop_assert!(rel <= 1e-10, "{} entry {}: {} vs {}", pretty_print(&w), j, got[(j, j)], expected);
                }
                prop_assert!(got.iter().enumerate().all(|(k, x)| k % 4 == 0 || *x == 0.0 || x.abs() < 1e-12 * got.norm()));
            }
            Err(EvalError::Spectral(SpectralError::Overflow { .. }))
            | Err(EvalError::Spectral(SpectralError::NearSingular { .. })) => {
                // only legitimate when some intermediate leaves the representable range
                let mut spread = 0.0;
                for j in 0..3 {
                    let logs: BTreeMap<usize, f64> = (1..=3).map(|i| (i, diag[i - 1][j].ln())).collect();
                    log_oracle(&w, &logs, &scalars, &mut spread);
                }
                prop_assert!(spread > 11.0, "{}: spread {}", pretty_print(&w), spread);
            }
            Err(e) => prop_assert!(false, "{}: {}", pretty_print(&w), e),
        }
    }
}

#[test]
fn documented_examples() {
    let w = parse_word("(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}").unwrap();
    assert_eq!(pretty_print(&w), "(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}");
    let err = parse_word("A1^{q}").unwrap_err();
    assert_eq!((err.line, err.column), (1, 5));
    let err = parse_word("A1 (A2").unwrap_err();
    assert!(err.to_string().starts_with("1:7:"));
}
