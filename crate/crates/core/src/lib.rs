//! Pi2-rules over Goedel-Dummett logic: parsing, finite-algebra semantics,
//! an exact symbolic decision engine for chain validity, admissibility
//! verdicts, inductive-class classification, and a checker for Hilbert-style
//! derivations that use Pi2-rules.

pub mod algebra;
pub mod corpus;
pub mod decide;
pub mod proofcheck;
pub mod semantics;
pub mod symbolic;
pub mod syntax;

pub use algebra::{
    is_cover_preserving_embedding, AlgebraError, AlgebraKind, EmbeddingError, EmbeddingMap,
    EvalError, FiniteGodelAlgebra, TableDescription, TableError, Valuation,
};
pub use decide::{ChainMembership, ClassDescriptor, ClassError, Verdict};
pub use proofcheck::{BaseLogic, CheckReport, Derivation, RuleSet, SchemaId, Step};
pub use semantics::{
    make_density, make_lambda, make_rho, prelinearity, rule_holds, verify_counterexample,
    NamedRuleError, RuleCheckResult,
};
pub use symbolic::{
    chain_spectrum, enumerate_profiles, q_valid, realize_profile, rule_holds_on_chain_symbolic,
    Profile, Spectrum, SymbolicError,
};
pub use syntax::{
    apply_substitution, parse_formula, parse_rule, variables, Formula, ParseError, Pi2Rule,
    RuleShapeError, Substitution,
};
