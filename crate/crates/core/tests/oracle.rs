//! Quick cross-validation of the symbolic engine against brute force on a
//! seeded random corpus. The full 200-rule run lives in the acceptance
//! suite; this is the fast everyday version.

use rayon::prelude::*;

use pi2_core::corpus::random_rules;
use pi2_core::semantics::rule_holds;
use pi2_core::symbolic::{chain_spectrum, q_valid, rule_holds_on_chain_symbolic};
use pi2_core::FiniteGodelAlgebra;

#[test]
fn symbolic_agrees_with_brute_force_on_small_corpus() {
    let rules = random_rules(0xfeed, 40);
    let chains: Vec<FiniteGodelAlgebra> = (2..=6)
        .map(|n| FiniteGodelAlgebra::make_chain(n).unwrap())
        .collect();
    rules.par_iter().for_each(|rule| {
        for (n, chain) in (2..=6).zip(&chains) {
            let brute = rule_holds(chain, rule).holds;
            let symbolic = rule_holds_on_chain_symbolic(rule, n).unwrap();
            assert_eq!(brute, symbolic, "rule {rule} on chain of size {n}");
        }
    });
}

#[test]
fn spectra_are_constant_past_the_threshold() {
    let rules = random_rules(0xfeed, 40);
    rules.par_iter().for_each(|rule| {
        let spectrum = chain_spectrum(rule);
        for extra in 1..=2 {
            let n = spectrum.threshold + extra;
            assert_eq!(
                rule_holds_on_chain_symbolic(rule, n).unwrap(),
                spectrum.tail,
                "rule {rule} at size {n}"
            );
        }
        // a cofinite tail forces validity on the dense chain
        if spectrum.tail {
            assert!(q_valid(rule), "rule {rule}");
        }
    });
}
