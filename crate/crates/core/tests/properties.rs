//! Law-level property tests: parser round-trips, substitution algebra,
//! preservation of rule validity under products, counterexample replay, and
//! the order-theoretic invariants of the algebra constructors.

use proptest::prelude::*;

use pi2_core::semantics::{make_lambda, rule_holds, verify_counterexample};
use pi2_core::syntax::{parse_formula, parse_rule};
use pi2_core::{FiniteGodelAlgebra, Formula, Pi2Rule, Substitution, TableDescription};

const VARS: [&str; 5] = ["a", "b", "c", "d", "e"];
const BOUND_VARS: [&str; 2] = ["u", "v"];

fn formula(vars: &'static [&'static str], depth: u32, size: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::Bot),
        1 => Just(Formula::Top),
        3 => proptest::sample::select(vars.to_vec()).prop_map(Formula::var),
    ];
    leaf.prop_recursive(depth, size, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
        ]
    })
}

fn substitution(depth: u32) -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(
        proptest::sample::select(VARS.to_vec()).prop_map(str::to_string),
        formula(&VARS, depth, 8),
        0..3,
    )
    .prop_map(Substitution::new)
}

/// Rules with up to 3 free and up to 2 bound variables and formula depth 3;
/// the conclusion only uses free variables, so the shape invariant holds by
/// construction.
fn rule() -> impl Strategy<Value = Pi2Rule> {
    static FREE: [&str; 3] = ["a", "b", "c"];
    static ALL: [&str; 5] = ["a", "b", "c", "u", "v"];
    (
        0..=2usize,
        proptest::collection::vec(formula(&ALL, 3, 12), 0..=2),
        formula(&FREE, 3, 12),
    )
        .prop_map(|(bound_count, premises, conclusion)| {
            let bound: Vec<String> = BOUND_VARS[..bound_count]
                .iter()
                .map(|s| s.to_string())
                .collect();
            Pi2Rule::new(premises, conclusion, bound).expect("conclusion avoids bound variables")
        })
}

proptest! {
    #[test]
    fn parse_print_roundtrip(f in formula(&VARS, 6, 48)) {
        let printed = f.to_string();
        prop_assert_eq!(parse_formula(&printed).unwrap(), f);
    }

    #[test]
    fn substitution_identity(f in formula(&VARS, 4, 16)) {
        prop_assert_eq!(Substitution::identity().apply(&f), f);
    }

    #[test]
    fn substitution_composition(
        f in formula(&VARS, 3, 12),
        s1 in substitution(2),
        s2 in substitution(2),
    ) {
        let stepwise = s2.apply(&s1.apply(&f));
        let composed = s1.then(&s2).apply(&f);
        prop_assert_eq!(stepwise, composed);
    }

    #[test]
    fn rule_print_roundtrip_and_shape(r in rule()) {
        let reparsed = parse_rule(&r.to_string()).unwrap();
        prop_assert_eq!(&reparsed, &r);
        for bound in reparsed.bound() {
            prop_assert!(!reparsed.conclusion().contains_var(bound));
        }
    }

    // arbitrary input never panics the parsers; it parses or errors
    #[test]
    fn parser_total_on_arbitrary_input(text in "[ -~]{0,60}") {
        let _ = parse_formula(&text);
        let _ = parse_rule(&text);
    }

    #[test]
    fn counterexamples_replay(r in rule(), n in 2usize..=6) {
        let alg = FiniteGodelAlgebra::make_chain(n).unwrap();
        let result = rule_holds(&alg, &r);
        if let Some(cex) = &result.counterexample {
            prop_assert!(!result.holds);
            prop_assert!(verify_counterexample(&alg, &r, cex));
        } else {
            prop_assert!(result.holds);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    // Validity of a rule is preserved by direct products of chains.
    #[test]
    fn product_preservation(r in rule(), m in 2usize..=5, n in 2usize..=5) {
        let a = FiniteGodelAlgebra::make_chain(m).unwrap();
        let b = FiniteGodelAlgebra::make_chain(n).unwrap();
        if rule_holds(&a, &r).holds && rule_holds(&b, &r).holds {
            let product = FiniteGodelAlgebra::make_product(&[a, b]).unwrap();
            prop_assert!(rule_holds(&product, &r).holds, "rule {} fails on the product", r);
        }
    }
}

fn small_algebras() -> Vec<FiniteGodelAlgebra> {
    let chain = |n| FiniteGodelAlgebra::make_chain(n).unwrap();
    let product = |sizes: &[usize]| {
        let factors: Vec<_> = sizes.iter().map(|&n| chain(n)).collect();
        FiniteGodelAlgebra::make_product(&factors).unwrap()
    };
    let diamond = FiniteGodelAlgebra::from_table(&TableDescription {
        elements: vec!["0".into(), "a".into(), "b".into(), "1".into()],
        leq: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
    })
    .unwrap();
    vec![
        chain(2),
        chain(3),
        chain(6),
        chain(12),
        product(&[2, 2]),
        product(&[3, 2]),
        product(&[4, 3]),
        product(&[2, 2, 3]),
        diamond,
    ]
}

#[test]
fn residuation_law_exhaustive() {
    for alg in small_algebras() {
        assert!(alg.size() <= 12);
        for a in 0..alg.size() as u32 {
            for b in 0..alg.size() as u32 {
                for c in 0..alg.size() as u32 {
                    assert_eq!(
                        alg.leq(alg.meet(a, b), c),
                        alg.leq(a, alg.imp(b, c)),
                        "residuation fails at ({a},{b},{c})"
                    );
                }
            }
        }
        alg.verify_godel_laws().unwrap();
    }
}

#[test]
fn chain_bound_monotone_under_products() {
    let chain = |n| FiniteGodelAlgebra::make_chain(n).unwrap();
    for m in 2..=4usize {
        for n in 2..=3usize {
            let a = chain(m);
            let b = chain(n);
            let product = FiniteGodelAlgebra::make_product(&[a.clone(), b.clone()]).unwrap();
            assert!(product.size() <= 12);
            assert!(product.chain_bound() >= a.chain_bound().max(b.chain_bound()));
        }
    }
}

// Two independent computations of the same quantity: the subset search and
// the largest lambda formula the algebra refutes. The lambda formula for
// index k has k-1 variables, so the probe sticks to algebras with small
// chain bounds; sizes still range up to 12.
#[test]
fn chain_bound_agrees_with_lambda_probe() {
    let chain = |n| FiniteGodelAlgebra::make_chain(n).unwrap();
    let product = |sizes: &[usize]| {
        let factors: Vec<_> = sizes.iter().map(|&n| chain(n)).collect();
        FiniteGodelAlgebra::make_product(&factors).unwrap()
    };
    let diamond = FiniteGodelAlgebra::from_table(&TableDescription {
        elements: vec!["0".into(), "a".into(), "b".into(), "1".into()],
        leq: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
    })
    .unwrap();
    let algebras = vec![
        chain(2),
        chain(3),
        chain(4),
        chain(5),
        product(&[2, 2]),
        product(&[3, 2]),
        product(&[4, 3]),
        product(&[5, 2]),
        product(&[2, 2, 3]),
        diamond,
    ];
    for alg in algebras {
        assert!(alg.size() <= 12);
        let lambda_bound = (2..=6)
            .filter(|&k| !alg.holds_identity(&make_lambda(k).unwrap()))
            .max()
            .map_or(2, |k| k + 1);
        assert_eq!(
            alg.chain_bound(),
            lambda_bound,
            "algebra of size {}",
            alg.size()
        );
    }
}

#[test]
fn lambda_contract_up_to_eight() {
    for k in 2..=8usize {
        let lambda = make_lambda(k).unwrap();
        for m in 2..=8usize {
            assert_eq!(
                FiniteGodelAlgebra::make_chain(m)
                    .unwrap()
                    .holds_identity(&lambda),
                m <= k
            );
        }
    }
}
