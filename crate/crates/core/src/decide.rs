//! Admissibility and derivability verdicts over Goedel-Dummett logic, and
//! classification of inductive classes of finite Goedel algebras.
//!
//! A rule is derivable iff it is valid on every finite chain. It is
//! admissible iff it is valid on the dense chain or on cofinally many finite
//! chains; over this logic admissibility and hereditary admissibility
//! coincide, so the verdict reports them together.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::FiniteGodelAlgebra;
use crate::semantics::{make_lambda, NamedRuleError};
use crate::symbolic::{chain_spectrum, q_valid, Spectrum};
use crate::syntax::{Formula, Pi2Rule};

/// The full outcome of deciding a rule, with the evidence that backs it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub derivable: bool,
    pub admissible: bool,
    pub hereditarily_admissible: bool,
    pub spectrum: Spectrum,
    pub q_valid: bool,
    /// A chain size refuting derivability, when there is one. The reported
    /// witness prefers a chain with at least three elements; the two-element
    /// chain is named only when it is the sole refuting size. The spectrum
    /// carries the complete list either way.
    pub refuting_chain: Option<usize>,
}

/// Decide derivability and admissibility of a rule over Goedel-Dummett
/// logic.
pub fn decide_lc(rule: &Pi2Rule) -> Verdict {
    let spectrum = chain_spectrum(rule);
    let dense_valid = q_valid(rule);
    let derivable = spectrum.valid_everywhere();
    // two-sided criterion; the engine guarantees tail => dense validity
    let admissible = dense_valid || spectrum.tail;
    let hereditarily_admissible = admissible;
    let refuting_chain = if derivable {
        None
    } else {
        spectrum
            .refuting_sizes()
            .find(|&n| n >= 3)
            .or_else(|| spectrum.refuting_sizes().next())
    };
    debug_assert!(!derivable || admissible);
    debug_assert!(
        spectrum.tail <= dense_valid,
        "tail validity must imply dense validity"
    );
    debug_assert!(derivable == refuting_chain.is_none());
    Verdict {
        derivable,
        admissible,
        hereditarily_admissible,
        spectrum,
        q_valid: dense_valid,
        refuting_chain,
    }
}

/// A class of algebras given by finite chain generators and optionally the
/// dense chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDescriptor {
    pub finite_generators: BTreeSet<usize>,
    pub include_q: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassError {
    #[error("chain sizes must be at least 2, got {0}")]
    BadChainSize(usize),
    #[error("membership of a finite chain in a class generated with the dense chain is not decided here; drop the dense generator or ask about the dense class alone")]
    MixedQuery,
}

/// The minimal inductive class containing a finite algebra: generated by the
/// single chain of its chain bound.
pub fn classify_minimal(alg: &FiniteGodelAlgebra) -> ClassDescriptor {
    ClassDescriptor {
        finite_generators: BTreeSet::from([alg.chain_bound()]),
        include_q: false,
    }
}

/// Outcome of a chain-membership query, with a separating formula when the
/// answer is negative and a witness exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainMembership {
    pub member: bool,
    /// Valid on every generator smaller than the queried chain, refuted on
    /// the queried chain itself.
    pub witness: Option<Formula>,
}

/// Is the chain with `m` elements in the inductive class generated by the
/// chains with sizes in `generators`? Exactly the generators are members;
/// a non-member above some generator gets a lambda formula as a separating
/// witness, while a non-member below every generator is refuted without a
/// witness formula.
pub fn chain_in_class(
    m: usize,
    generators: &BTreeSet<usize>,
) -> Result<ChainMembership, ClassError> {
    if m < 2 {
        return Err(ClassError::BadChainSize(m));
    }
    if let Some(&bad) = generators.iter().find(|&&g| g < 2) {
        return Err(ClassError::BadChainSize(bad));
    }
    if generators.contains(&m) {
        return Ok(ChainMembership {
            member: true,
            witness: None,
        });
    }
    let below = generators.range(..m).next_back().copied();
    let witness = below.map(|k| match make_lambda(k) {
        Ok(f) => f,
        Err(NamedRuleError::LambdaIndex(_)) => unreachable!("generators are at least 2"),
        Err(e) => panic!("unexpected lambda error: {e}"),
    });
    Ok(ChainMembership {
        member: false,
        witness,
    })
}

/// Membership against a full descriptor; queries mixing finite chains with
/// the dense generator are refused.
pub fn chain_in_descriptor(
    m: usize,
    descriptor: &ClassDescriptor,
) -> Result<ChainMembership, ClassError> {
    if descriptor.include_q {
        return Err(ClassError::MixedQuery);
    }
    chain_in_class(m, &descriptor.finite_generators)
}

/// A class admits no admissible-but-underivable rules iff it is minimal:
/// generated by a single finite chain, or by the dense chain alone.
pub fn is_inductively_complete(descriptor: &ClassDescriptor) -> bool {
    matches!(
        (descriptor.finite_generators.len(), descriptor.include_q),
        (1, false) | (0, true)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{make_density, make_rho, prelinearity};
    use crate::syntax::parse_rule;

    #[test]
    fn density_verdict() {
        let verdict = decide_lc(&make_density());
        assert!(!verdict.derivable);
        assert!(verdict.admissible);
        assert!(verdict.hereditarily_admissible);
        assert!(verdict.q_valid);
        assert_eq!(verdict.refuting_chain, Some(3));
    }

    #[test]
    fn prelinearity_is_derivable() {
        let verdict = decide_lc(&Pi2Rule::axiom(prelinearity()));
        assert!(verdict.derivable);
        assert!(verdict.admissible);
        assert_eq!(verdict.refuting_chain, None);
    }

    #[test]
    fn excluded_middle_not_admissible() {
        let verdict = decide_lc(&parse_rule("=> p | ~p").unwrap());
        assert!(!verdict.derivable);
        assert!(!verdict.admissible);
        assert!(!verdict.hereditarily_admissible);
        assert!(!verdict.q_valid);
        assert_eq!(verdict.spectrum.refuting_sizes().next(), Some(3));
        assert!(verdict.spectrum.is_valid_at(2));
        assert_eq!(verdict.refuting_chain, Some(3));
    }

    #[test]
    fn rho_rules_admissible_not_derivable() {
        for n in 1..=3 {
            let verdict = decide_lc(&make_rho(n).unwrap());
            assert!(verdict.admissible, "rho_{n}");
            assert!(!verdict.derivable, "rho_{n}");
            assert!(verdict.spectrum.tail);
        }
    }

    #[test]
    fn rho_one_refuted_only_on_the_boolean_chain() {
        let verdict = decide_lc(&make_rho(1).unwrap());
        assert_eq!(
            verdict.spectrum.refuting_sizes().collect::<Vec<_>>(),
            vec![2]
        );
        assert_eq!(verdict.refuting_chain, Some(2));
    }

    #[test]
    fn classify_minimal_examples() {
        let chain4 = FiniteGodelAlgebra::make_chain(4).unwrap();
        assert_eq!(
            classify_minimal(&chain4).finite_generators,
            BTreeSet::from([4])
        );

        let c2 = FiniteGodelAlgebra::make_chain(2).unwrap();
        let diamond = FiniteGodelAlgebra::make_product(&[c2.clone(), c2.clone()]).unwrap();
        assert_eq!(
            classify_minimal(&diamond).finite_generators,
            BTreeSet::from([2])
        );
        assert_eq!(classify_minimal(&c2).finite_generators, BTreeSet::from([2]));
    }

    #[test]
    fn chain_membership_examples() {
        let gens = BTreeSet::from([3usize, 5]);
        assert!(chain_in_class(3, &gens).unwrap().member);

        let miss = chain_in_class(4, &gens).unwrap();
        assert!(!miss.member);
        let witness = miss.witness.unwrap();
        assert_eq!(witness, crate::semantics::make_lambda(3).unwrap());
        assert!(FiniteGodelAlgebra::make_chain(3)
            .unwrap()
            .holds_identity(&witness));
        assert!(!FiniteGodelAlgebra::make_chain(4)
            .unwrap()
            .holds_identity(&witness));

        let empty = chain_in_class(2, &BTreeSet::new()).unwrap();
        assert!(!empty.member);
        assert!(empty.witness.is_none());

        assert_eq!(
            chain_in_class(1, &gens).unwrap_err(),
            ClassError::BadChainSize(1)
        );
    }

    #[test]
    fn mixed_queries_refused() {
        let descriptor = ClassDescriptor {
            finite_generators: BTreeSet::from([3]),
            include_q: true,
        };
        assert_eq!(
            chain_in_descriptor(4, &descriptor).unwrap_err(),
            ClassError::MixedQuery
        );
    }

    #[test]
    fn inductive_completeness_examples() {
        let class = |gens: &[usize], q: bool| ClassDescriptor {
            finite_generators: gens.iter().copied().collect(),
            include_q: q,
        };
        assert!(is_inductively_complete(&class(&[3], false)));
        assert!(!is_inductively_complete(&class(&[2, 3], false)));
        assert!(is_inductively_complete(&class(&[], true)));
        assert!(!is_inductively_complete(&class(&[3], true)));
        assert!(!is_inductively_complete(&class(&[], false)));
    }

    use crate::algebra::FiniteGodelAlgebra;
    use crate::syntax::Pi2Rule;
}
