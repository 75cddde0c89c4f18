//! Ground-truth rule satisfaction on finite algebras, by exhaustive
//! enumeration of valuations, plus constructors for the named formulas and
//! rules used throughout the crate.
//!
//! A rule `forall qs . f1, ..., fk => g` holds in an algebra `A` iff for
//! every valuation `v` of the free variables: whenever every premise
//! evaluates to top under every reassignment of the bound variables, the
//! conclusion evaluates to top under `v`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::algebra::{next_valuation, CompiledTerm, FiniteGodelAlgebra, Valuation};
use crate::syntax::{Formula, Pi2Rule};

/// Outcome of a rule check; `counterexample` is present iff `holds` is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleCheckResult {
    pub holds: bool,
    pub counterexample: Option<Valuation>,
}

/// Decide whether `rule` holds in `alg`, reporting the first counterexample
/// in a fixed canonical order when it does not.
///
/// Valuations of the free variables are enumerated in mixed-radix order over
/// the variables in first-occurrence order, the last variable varying
/// fastest. A variable with a negative occurrence in the conclusion runs
/// from top downward, the others from bottom upward; the counterexample
/// returned is the first one in this order, independent of parallel
/// scheduling.
pub fn rule_holds(alg: &FiniteGodelAlgebra, rule: &Pi2Rule) -> RuleCheckResult {
    let free = rule.free_variables();
    let bound: Vec<String> = rule.bound().to_vec();
    let order: Vec<String> = free.iter().chain(bound.iter()).cloned().collect();
    let premises: Vec<CompiledTerm> = rule
        .premises()
        .iter()
        .map(|p| CompiledTerm::compile(p, &order).expect("premise variables indexed"))
        .collect();
    let conclusion =
        CompiledTerm::compile(rule.conclusion(), &order).expect("conclusion variables indexed");

    let size = alg.size() as u32;
    let mut negative = BTreeSet::new();
    collect_negative(rule.conclusion(), false, &mut negative);
    let descending: Vec<bool> = free.iter().map(|v| negative.contains(v)).collect();

    let total: u64 = (0..free.len()).fold(1u64, |acc, _| acc.saturating_mul(size as u64));
    let scan = |range: std::ops::Range<u64>| -> Option<u64> {
        let mut vals = vec![0u32; order.len()];
        let mut stack = Vec::with_capacity(16);
        'outer: for index in range {
            // decode the free-variable digits, last variable fastest
            let mut rest = index;
            for k in (0..free.len()).rev() {
                let digit = (rest % size as u64) as u32;
                rest /= size as u64;
                vals[k] = if descending[k] {
                    size - 1 - digit
                } else {
                    digit
                };
            }
            // premises must be top under every bound reassignment
            for val in vals[free.len()..].iter_mut() {
                *val = 0;
            }
            loop {
                for premise in &premises {
                    if premise.eval(alg, &vals, &mut stack) != alg.top() {
                        continue 'outer;
                    }
                }
                if !next_valuation(&mut vals[free.len()..], size) {
                    break;
                }
            }
            if conclusion.eval(alg, &vals, &mut stack) != alg.top() {
                return Some(index);
            }
        }
        None
    };

    const CHUNK: u64 = 4096;
    let found = if total <= CHUNK {
        scan(0..total)
    } else {
        let chunks = total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .find_map_first(|c| scan(c * CHUNK..((c + 1) * CHUNK).min(total)))
    };

    match found {
        None => RuleCheckResult {
            holds: true,
            counterexample: None,
        },
        Some(index) => {
            let mut rest = index;
            let mut digits = vec![0u32; free.len()];
            for k in (0..free.len()).rev() {
                let digit = (rest % size as u64) as u32;
                rest /= size as u64;
                digits[k] = if descending[k] {
                    size - 1 - digit
                } else {
                    digit
                };
            }
            let valuation: Valuation = free.iter().cloned().zip(digits.iter().copied()).collect();
            RuleCheckResult {
                holds: false,
                counterexample: Some(valuation),
            }
        }
    }
}

/// Re-verify a counterexample against the rule by direct term evaluation:
/// all premises top under every bound reassignment, conclusion not top.
pub fn verify_counterexample(
    alg: &FiniteGodelAlgebra,
    rule: &Pi2Rule,
    valuation: &Valuation,
) -> bool {
    let size = alg.size() as u32;
    let bound: Vec<String> = rule.bound().to_vec();
    let mut bound_vals = vec![0u32; bound.len()];
    loop {
        let mut v = valuation.clone();
        for (name, &value) in bound.iter().zip(&bound_vals) {
            v.set(name.clone(), value);
        }
        for premise in rule.premises() {
            match alg.eval_term(premise, &v) {
                Ok(value) if value == alg.top() => {}
                _ => return false,
            }
        }
        if !next_valuation(&mut bound_vals, size) {
            break;
        }
    }
    match alg.eval_term(rule.conclusion(), valuation) {
        Ok(value) => value != alg.top(),
        Err(_) => false,
    }
}

fn collect_negative(f: &Formula, negative: bool, out: &mut BTreeSet<String>) {
    match f {
        Formula::Var(name) => {
            if negative {
                out.insert(name.clone());
            }
        }
        Formula::Bot | Formula::Top => {}
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_negative(a, negative, out);
            collect_negative(b, negative, out);
        }
        Formula::Imp(a, b) => {
            collect_negative(a, !negative, out);
            collect_negative(b, negative, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NamedRuleError {
    #[error("rho takes an index of at least 1, got {0}")]
    RhoIndex(usize),
    #[error("lambda takes an index of at least 2, got {0}")]
    LambdaIndex(usize),
}

/// The density rule: `forall r . g -> ((p->r)|(r->q)|c) => g -> ((p->q)|c)`.
pub fn make_density() -> Pi2Rule {
    crate::syntax::parse_rule("forall r . g -> ((p->r)|(r->q)|c) => g -> ((p->q)|c)")
        .expect("density rule text parses")
}

/// The rule family built from the slash connective:
///
/// `forall p1..pn . (0/p1 & p1/p2 & ... & p_{n-1}/pn) -> (p1|...|pn|p) => p`
///
/// Measured validity on chains (exhaustive evaluation): the rule fails on
/// every chain with at most `n + 1` elements and holds on every chain with
/// at least `n + 2` elements.
pub fn make_rho(n: usize) -> Result<Pi2Rule, NamedRuleError> {
    if n < 1 {
        return Err(NamedRuleError::RhoIndex(n));
    }
    let bound: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let var = |name: &String| Formula::var(name.clone());
    let mut slashes = vec![Formula::slash(Formula::Bot, var(&bound[0]))];
    for pair in bound.windows(2) {
        slashes.push(Formula::slash(var(&pair[0]), var(&pair[1])));
    }
    let lhs = Formula::big_and(slashes).expect("nonempty");
    let rhs = Formula::big_or(bound.iter().map(var).chain([Formula::var("p")])).expect("nonempty");
    let premise = Formula::imp(lhs, rhs);
    Ok(Pi2Rule::new(vec![premise], Formula::var("p"), bound).expect("p is not bound"))
}

/// A formula valid on exactly the chains with at most `k` elements:
///
/// `~p1 | (p2 -> p1) | ... | (p_{k-1} -> p_{k-2}) | p_{k-1}`
///
/// For `k = 2` this is `~p1 | p1`.
pub fn make_lambda(k: usize) -> Result<Formula, NamedRuleError> {
    if k < 2 {
        return Err(NamedRuleError::LambdaIndex(k));
    }
    let vars: Vec<Formula> = (1..k).map(|i| Formula::var(format!("p{i}"))).collect();
    let mut disjuncts = vec![Formula::neg(vars[0].clone())];
    for pair in vars.windows(2) {
        disjuncts.push(Formula::imp(pair[1].clone(), pair[0].clone()));
    }
    disjuncts.push(vars[vars.len() - 1].clone());
    Ok(Formula::big_or(disjuncts).expect("nonempty"))
}

/// The prelinearity formula `(p->q)|(q->p)`.
pub fn prelinearity() -> Formula {
    crate::syntax::parse_formula("(p->q)|(q->p)").expect("prelinearity text parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteGodelAlgebra;
    use crate::syntax::parse_rule;

    fn chain(n: usize) -> FiniteGodelAlgebra {
        FiniteGodelAlgebra::make_chain(n).unwrap()
    }

    #[test]
    fn density_fails_on_chain_three_with_canonical_counterexample() {
        let result = rule_holds(&chain(3), &make_density());
        assert!(!result.holds);
        let cex = result.counterexample.unwrap();
        assert_eq!(cex.get("g"), Some(2));
        assert_eq!(cex.get("p"), Some(2));
        assert_eq!(cex.get("q"), Some(1));
        assert_eq!(cex.get("c"), Some(0));
        assert!(verify_counterexample(&chain(3), &make_density(), &cex));
    }

    #[test]
    fn density_fails_on_chain_two() {
        let result = rule_holds(&chain(2), &make_density());
        assert!(!result.holds);
        assert!(verify_counterexample(
            &chain(2),
            &make_density(),
            &result.counterexample.unwrap()
        ));
    }

    #[test]
    fn double_negation_rule_fails_on_two_holds_on_three() {
        let rule = parse_rule("forall q . ~~q -> (q|p) => p").unwrap();
        assert!(!rule_holds(&chain(2), &rule).holds);
        assert!(rule_holds(&chain(3), &rule).holds);
    }

    #[test]
    fn prelinearity_axiom_holds_on_chains() {
        let axiom = Pi2Rule::axiom(prelinearity());
        for n in 2..=6 {
            assert!(rule_holds(&chain(n), &axiom).holds);
        }
    }

    #[test]
    fn density_shape() {
        let density = make_density();
        assert_eq!(density.bound(), ["r".to_string()]);
        assert_eq!(density.free_variables(), vec!["g", "p", "q", "c"]);
        let mut all: Vec<String> = density.all_variables().into_iter().collect();
        all.sort();
        assert_eq!(all, ["c", "g", "p", "q", "r"]);
    }

    #[test]
    fn rho_shape_and_errors() {
        assert_eq!(make_rho(0).unwrap_err(), NamedRuleError::RhoIndex(0));
        let rho3 = make_rho(3).unwrap();
        assert_eq!(rho3.bound(), ["p1".to_string(), "p2".into(), "p3".into()]);
        assert_eq!(rho3.conclusion(), &Formula::var("p"));
    }

    // Oracle for the rho family: measure the exact validity threshold by
    // brute force before anything else relies on it.
    #[test]
    fn rho_measured_threshold() {
        for n in 1..=3 {
            let rho = make_rho(n).unwrap();
            for m in 2..=(n + 4) {
                let holds = rule_holds(&chain(m), &rho).holds;
                assert_eq!(holds, m >= n + 2, "rho_{n} on chain of size {m}");
            }
        }
    }

    #[test]
    fn rho_two_examples() {
        let rho2 = make_rho(2).unwrap();
        assert!(!rule_holds(&chain(2), &rho2).holds);
        assert!(rule_holds(&chain(4), &rho2).holds);
    }

    // Oracle for the lambda family, run over the whole advertised table.
    #[test]
    fn lambda_contract_table() {
        for k in 2..=6 {
            let lambda = make_lambda(k).unwrap();
            for m in 2..=8 {
                assert_eq!(
                    chain(m).holds_identity(&lambda),
                    m <= k,
                    "lambda_{k} on chain of size {m}"
                );
            }
        }
        assert_eq!(make_lambda(1).unwrap_err(), NamedRuleError::LambdaIndex(1));
    }

    #[test]
    fn lambda_two_is_excluded_middle() {
        let l2 = make_lambda(2).unwrap();
        assert_eq!(
            l2,
            Formula::or(Formula::neg(Formula::var("p1")), Formula::var("p1"))
        );
        assert!(chain(2).holds_identity(&l2));
        assert!(!chain(3).holds_identity(&l2));
    }

    #[test]
    fn axiom_degeneration_matches_holds_identity() {
        let lambda3 = make_lambda(3).unwrap();
        let as_rule = Pi2Rule::axiom(lambda3.clone());
        for m in 2..=6 {
            assert_eq!(
                rule_holds(&chain(m), &as_rule).holds,
                chain(m).holds_identity(&lambda3)
            );
        }
    }

    #[test]
    fn pi1_degeneration_matches_direct_quasi_identity_check() {
        let rules = [
            parse_rule("p, p->q => q").unwrap(),
            parse_rule("p | q => p").unwrap(),
            parse_rule("~~p => p").unwrap(),
        ];
        for rule in &rules {
            for m in 2..=5 {
                let alg = chain(m);
                // direct check: single valuation, premises top implies conclusion top
                let free = rule.free_variables();
                let mut vals = vec![0u32; free.len()];
                let mut direct = true;
                loop {
                    let v: Valuation = free.iter().cloned().zip(vals.iter().copied()).collect();
                    let premises_top = rule
                        .premises()
                        .iter()
                        .all(|p| alg.eval_term(p, &v).unwrap() == alg.top());
                    if premises_top && alg.eval_term(rule.conclusion(), &v).unwrap() != alg.top() {
                        direct = false;
                        break;
                    }
                    if !next_valuation(&mut vals, alg.size() as u32) {
                        break;
                    }
                }
                assert_eq!(rule_holds(&alg, rule).holds, direct);
            }
        }
    }
}
