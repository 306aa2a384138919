use proptest::prelude::*;
use torfib_cli::dsl::{parse, Located, Monomial, Poly, Statement, Term};
use torfib_cli::InputModel;

fn name() -> impl Strategy<Value = String> {
    "[A-Z][a-z0-9]{0,3}"
}

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "z", "u", "v", "w2"]).prop_map(String::from)
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((var(), 1u32..5), 1..3)
}

fn term() -> impl Strategy<Value = Term> {
    (prop_oneof![(-9i64..=-1), (1i64..=9)], prop::collection::vec((var(), 1u32..4), 0..3))
        .prop_map(|(coeff, vars)| Term { coeff, vars })
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(term(), 1..4).prop_map(|terms| Poly { terms })
}

fn matrix() -> impl Strategy<Value = Vec<Vec<Poly>>> {
    (1usize..4, 1usize..4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(poly(), c), r))
}

fn statement() -> impl Strategy<Value = Statement> {
    prop_oneof![
        (2u32..1000).prop_map(|p| Statement::Field { p }),
        (name(), prop::collection::vec(var(), 1..4), prop::collection::vec(monomial(), 1..4))
            .prop_map(|(name, vars, rels)| Statement::Ring { name, vars, rels }),
        (name(), name(), name()).prop_map(|(name, left, right)| Statement::Fiber { name, left, right }),
        (name(), name(), matrix()).prop_map(|(name, ring, rows)| Statement::Module { name, ring, rows }),
        (name(), 0usize..20).prop_map(|(module, length)| Statement::Resolve { module, length }),
        (name(), name(), 0usize..20).prop_map(|(left, right, max)| Statement::Tor { left, right, max }),
        (any::<u64>(), 0usize..500).prop_map(|(seed, count)| Statement::Scan { seed, count }),
        (0usize..40).prop_map(|degree| Statement::VerifyDvr { degree }),
    ]
}

proptest! {
    #[test]
    fn pretty_printed_models_reparse_to_themselves(stmts in prop::collection::vec(statement(), 0..8)) {
        let model = InputModel {
            statements: stmts.into_iter().enumerate().map(|(i, stmt)| Located { line: i + 1, stmt }).collect(),
        };
        let text = model.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn parser_never_panics(text in "[ -~\n]{0,80}") {
        let _ = parse(&text);
    }
}
