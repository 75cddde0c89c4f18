//! Checking Hilbert-style derivations that use Pi2-rules.
//!
//! A derivation establishes a judgment of rule shape: premises, a bound
//! variable context quantified inside the premises, and a goal. Steps are
//! premise instances, axiom instances, modus ponens, and applications of
//! named Pi2-rules whose bound variables are instantiated with fresh
//! eigenvariables.
//!
//! Step formulas are computed from the justifications, never trusted from
//! the input, so accepting a derivation is a complete verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteGodelAlgebra;
use crate::semantics::{prelinearity, rule_holds};
use crate::syntax::{parse_formula, Formula, Pi2Rule, Substitution};

/// The base calculus a derivation works over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseLogic {
    #[serde(rename = "IPC")]
    Ipc,
    #[serde(rename = "LC")]
    Lc,
}

/// Axiom schemas. The ten IPC schemas form a standard Hilbert basis for the
/// five-connective language; LC adds prelinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemaId {
    /// `p -> (q -> p)`
    K,
    /// `(p -> (q -> r)) -> ((p -> q) -> (p -> r))`
    S,
    /// `p & q -> p`
    #[serde(rename = "AND1")]
    And1,
    /// `p & q -> q`
    #[serde(rename = "AND2")]
    And2,
    /// `p -> (q -> (p & q))`
    #[serde(rename = "AND3")]
    And3,
    /// `p -> (p | q)`
    #[serde(rename = "OR1")]
    Or1,
    /// `q -> (p | q)`
    #[serde(rename = "OR2")]
    Or2,
    /// `(p -> r) -> ((q -> r) -> ((p | q) -> r))`
    #[serde(rename = "OR3")]
    Or3,
    /// `0 -> p`
    #[serde(rename = "EFQ")]
    Efq,
    /// `(p -> (q -> r)) -> ((p & q) -> r)`
    #[serde(rename = "IMP-DIST")]
    ImpDist,
    /// `(p -> q) | (q -> p)`
    #[serde(rename = "LC")]
    Lc,
}

pub const ALL_SCHEMAS: [SchemaId; 11] = [
    SchemaId::K,
    SchemaId::S,
    SchemaId::And1,
    SchemaId::And2,
    SchemaId::And3,
    SchemaId::Or1,
    SchemaId::Or2,
    SchemaId::Or3,
    SchemaId::Efq,
    SchemaId::ImpDist,
    SchemaId::Lc,
];

impl SchemaId {
    pub fn pattern(self) -> Formula {
        let text = match self {
            SchemaId::K => "p -> (q -> p)",
            SchemaId::S => "(p -> (q -> r)) -> ((p -> q) -> (p -> r))",
            SchemaId::And1 => "p & q -> p",
            SchemaId::And2 => "p & q -> q",
            SchemaId::And3 => "p -> (q -> (p & q))",
            SchemaId::Or1 => "p -> (p | q)",
            SchemaId::Or2 => "q -> (p | q)",
            SchemaId::Or3 => "(p -> r) -> ((q -> r) -> ((p | q) -> r))",
            SchemaId::Efq => "0 -> p",
            SchemaId::ImpDist => "(p -> (q -> r)) -> ((p & q) -> r)",
            SchemaId::Lc => "(p -> q) | (q -> p)",
        };
        parse_formula(text).expect("schema text parses")
    }

    fn allowed_in(self, base: BaseLogic) -> bool {
        self != SchemaId::Lc || base == BaseLogic::Lc
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemaId::K => "K",
            SchemaId::S => "S",
            SchemaId::And1 => "AND1",
            SchemaId::And2 => "AND2",
            SchemaId::And3 => "AND3",
            SchemaId::Or1 => "OR1",
            SchemaId::Or2 => "OR2",
            SchemaId::Or3 => "OR3",
            SchemaId::Efq => "EFQ",
            SchemaId::ImpDist => "IMP-DIST",
            SchemaId::Lc => "LC",
        };
        write!(f, "{name}")
    }
}

/// Match `f` against schema patterns in their fixed order and return the
/// first schema it instantiates.
pub fn match_axiom(f: &Formula) -> Option<SchemaId> {
    ALL_SCHEMAS
        .iter()
        .copied()
        .find(|schema| matches_pattern(&schema.pattern(), f, &mut BTreeMap::new()))
}

fn matches_pattern(
    pattern: &Formula,
    f: &Formula,
    binding: &mut BTreeMap<String, Formula>,
) -> bool {
    match (pattern, f) {
        (Formula::Var(name), _) => match binding.get(name) {
            Some(bound) => bound == f,
            None => {
                binding.insert(name.clone(), f.clone());
                true
            }
        },
        (Formula::Bot, Formula::Bot) | (Formula::Top, Formula::Top) => true,
        (Formula::And(pa, pb), Formula::And(fa, fb))
        | (Formula::Or(pa, pb), Formula::Or(fa, fb))
        | (Formula::Imp(pa, pb), Formula::Imp(fa, fb)) => {
            matches_pattern(pa, fa, binding) && matches_pattern(pb, fb, binding)
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleSetError {
    #[error("duplicate rule name: {0}")]
    DuplicateName(String),
}

/// A base logic together with named Pi2-rules available to derivations.
#[derive(Debug, Clone)]
pub struct RuleSet {
    base: BaseLogic,
    sigma: Vec<(String, Pi2Rule)>,
}

impl RuleSet {
    pub fn new(base: BaseLogic, sigma: Vec<(String, Pi2Rule)>) -> Result<Self, RuleSetError> {
        let mut seen = BTreeSet::new();
        for (name, _) in &sigma {
            if !seen.insert(name.clone()) {
                return Err(RuleSetError::DuplicateName(name.clone()));
            }
        }
        Ok(RuleSet { base, sigma })
    }

    pub fn base(&self) -> BaseLogic {
        self.base
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, &Pi2Rule)> {
        self.sigma.iter().map(|(name, rule)| (name.as_str(), rule))
    }

    pub fn get(&self, name: &str) -> Option<&Pi2Rule> {
        self.sigma.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }
}

/// One derivation step. References are indices of earlier steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Step {
    /// An instance of a context premise. The substitution may replace the
    /// context's bound variables only, and its images must not mention them.
    Premise {
        index: usize,
        #[serde(default, skip_serializing_if = "Substitution::is_identity")]
        subst: Substitution,
    },
    /// An instance of an axiom schema of the base logic.
    Axiom {
        schema: SchemaId,
        #[serde(default, skip_serializing_if = "Substitution::is_identity")]
        subst: Substitution,
    },
    /// `antecedent` holds and `implication` is `antecedent -> this`.
    Mp {
        antecedent: usize,
        implication: usize,
    },
    /// An application of a named rule: `premises[k]` is the step deriving
    /// the rule's k-th premise under `subst`, with the rule's bound
    /// variables renamed to the declared `fresh` eigenvariables.
    Sigma {
        rule: String,
        #[serde(default, skip_serializing_if = "Substitution::is_identity")]
        subst: Substitution,
        premises: Vec<usize>,
        #[serde(default)]
        fresh: BTreeMap<String, String>,
    },
}

/// A judgment (of rule shape) together with the steps claimed to establish
/// it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub context: Pi2Rule,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
pub enum CheckError {
    #[error("step refers forward or to itself: {reference}")]
    BadReference { reference: usize },
    #[error("schema {schema} is not an axiom of the base logic")]
    NotAnAxiomInstance { schema: String },
    #[error("step {implication} is not an implication with step {antecedent} as antecedent")]
    MpMismatch {
        antecedent: usize,
        implication: usize,
    },
    #[error("unknown sigma rule: {0}")]
    UnknownSigmaRule(String),
    #[error("{0}")]
    PremiseShapeMismatch(String),
    #[error("eigenvariable violation: {variable} {leak}")]
    EigenvariableViolation { variable: String, leak: String },
    #[error("last step proves {found}, but the goal is {goal}")]
    GoalMismatch { found: String, goal: String },
    #[error("derivation has no steps")]
    EmptyDerivation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub status: StepStatus,
    pub formula: Option<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub step: Option<usize>,
    pub error: CheckError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub accepted: bool,
    pub steps: Vec<StepReport>,
    pub failure: Option<Failure>,
}

impl CheckReport {
    fn rejected(steps: Vec<StepReport>, step: Option<usize>, error: CheckError) -> Self {
        CheckReport {
            accepted: false,
            steps,
            failure: Some(Failure { step, error }),
        }
    }
}

/// Verify a derivation against a rule set. Pure: the report is a function
/// of the inputs alone.
pub fn check_derivation(rs: &RuleSet, d: &Derivation) -> CheckReport {
    let mut formulas: Vec<Formula> = Vec::with_capacity(d.steps.len());
    let mut reports: Vec<StepReport> = Vec::with_capacity(d.steps.len());

    let context_free: BTreeSet<String> = d
        .context
        .all_variables()
        .into_iter()
        .filter(|v| !d.context.is_bound(v))
        .collect();

    for (index, step) in d.steps.iter().enumerate() {
        match step_formula(rs, d, &context_free, &formulas, index, step) {
            Ok(formula) => {
                reports.push(StepReport {
                    index,
                    status: StepStatus::Ok,
                    formula: Some(formula.clone()),
                });
                formulas.push(formula);
            }
            Err(error) => {
                reports.push(StepReport {
                    index,
                    status: StepStatus::Failed,
                    formula: None,
                });
                for skipped in index + 1..d.steps.len() {
                    reports.push(StepReport {
                        index: skipped,
                        status: StepStatus::Skipped,
                        formula: None,
                    });
                }
                return CheckReport::rejected(reports, Some(index), error);
            }
        }
    }

    match formulas.last() {
        None => CheckReport::rejected(reports, None, CheckError::EmptyDerivation),
        Some(last) if last != d.context.conclusion() => CheckReport::rejected(
            reports,
            None,
            CheckError::GoalMismatch {
                found: last.to_string(),
                goal: d.context.conclusion().to_string(),
            },
        ),
        Some(_) => CheckReport {
            accepted: true,
            steps: reports,
            failure: None,
        },
    }
}

fn step_formula(
    rs: &RuleSet,
    d: &Derivation,
    context_free: &BTreeSet<String>,
    formulas: &[Formula],
    index: usize,
    step: &Step,
) -> Result<Formula, CheckError> {
    let backref = |reference: usize| -> Result<(), CheckError> {
        if reference < index {
            Ok(())
        } else {
            Err(CheckError::BadReference { reference })
        }
    };
    match step {
        Step::Premise {
            index: premise_index,
            subst,
        } => {
            let Some(premise) = d.context.premises().get(*premise_index) else {
                return Err(CheckError::PremiseShapeMismatch(format!(
                    "premise index {premise_index} out of range: the context has {} premises",
                    d.context.premises().len()
                )));
            };
            for var in subst.domain() {
                if !d.context.is_bound(var) {
                    return Err(CheckError::PremiseShapeMismatch(format!(
                        "premise instances may only replace the context's bound variables, \
                         but the substitution touches '{var}'"
                    )));
                }
            }
            for image in subst.images() {
                for bound in d.context.bound() {
                    if image.contains_var(bound) {
                        return Err(CheckError::PremiseShapeMismatch(format!(
                            "substitution image {image} mentions the bound variable '{bound}'"
                        )));
                    }
                }
            }
            Ok(subst.apply(premise))
        }
        Step::Axiom { schema, subst } => {
            if !schema.allowed_in(rs.base()) {
                return Err(CheckError::NotAnAxiomInstance {
                    schema: schema.to_string(),
                });
            }
            Ok(subst.apply(&schema.pattern()))
        }
        Step::Mp {
            antecedent,
            implication,
        } => {
            backref(*antecedent)?;
            backref(*implication)?;
            match &formulas[*implication] {
                Formula::Imp(a, b) if a.as_ref() == &formulas[*antecedent] => Ok((**b).clone()),
                _ => Err(CheckError::MpMismatch {
                    antecedent: *antecedent,
                    implication: *implication,
                }),
            }
        }
        Step::Sigma {
            rule: name,
            subst,
            premises,
            fresh,
        } => {
            let Some(rule) = rs.get(name) else {
                return Err(CheckError::UnknownSigmaRule(name.clone()));
            };
            // The fresh assignment must rename exactly the rule's bound variables.
            for bound in rule.bound() {
                if !fresh.contains_key(bound) {
                    return Err(CheckError::PremiseShapeMismatch(format!(
                        "no fresh variable declared for the rule's bound variable '{bound}'"
                    )));
                }
            }
            for key in fresh.keys() {
                if !rule.is_bound(key) {
                    return Err(CheckError::PremiseShapeMismatch(format!(
                        "fresh assignment names '{key}', which is not bound in rule '{name}'"
                    )));
                }
            }
            let mut used = BTreeSet::new();
            for fresh_name in fresh.values() {
                if !used.insert(fresh_name.clone()) {
                    return Err(CheckError::EigenvariableViolation {
                        variable: fresh_name.clone(),
                        leak: "is declared fresh for two bound variables".into(),
                    });
                }
                if context_free.contains(fresh_name) {
                    return Err(CheckError::EigenvariableViolation {
                        variable: fresh_name.clone(),
                        leak: "occurs free in the context".into(),
                    });
                }
                for image in subst.images() {
                    if image.contains_var(fresh_name) {
                        return Err(CheckError::EigenvariableViolation {
                            variable: fresh_name.clone(),
                            leak: format!("occurs in the substitution image {image}"),
                        });
                    }
                }
            }
            for var in subst.domain() {
                if rule.is_bound(var) {
                    return Err(CheckError::PremiseShapeMismatch(format!(
                        "the substitution may not bind the rule's bound variable '{var}'; \
                         use the fresh assignment instead"
                    )));
                }
            }
            if premises.len() != rule.premises().len() {
                return Err(CheckError::PremiseShapeMismatch(format!(
                    "rule '{name}' has {} premises, {} steps were supplied",
                    rule.premises().len(),
                    premises.len()
                )));
            }
            let full: Substitution = subst
                .domain()
                .map(|v| (v.to_string(), subst.get(v).unwrap().clone()))
                .chain(
                    fresh
                        .iter()
                        .map(|(q, r)| (q.clone(), Formula::var(r.clone()))),
                )
                .collect();
            for (k, &step_index) in premises.iter().enumerate() {
                backref(step_index)?;
                let expected = full.apply(&rule.premises()[k]);
                if formulas[step_index] != expected {
                    return Err(CheckError::PremiseShapeMismatch(format!(
                        "step {step_index} proves {}, but premise {k} of rule '{name}' \
                         instantiates to {expected}",
                        formulas[step_index]
                    )));
                }
            }
            Ok(subst.apply(rule.conclusion()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbeError {
    #[error("refusing to probe a derivation the checker rejects")]
    DerivationRejected,
}

/// Semantic cross-check of an accepted derivation: on every supplied algebra
/// that validates the base logic and all the rule set's rules, the context
/// judgment itself must hold.
pub fn soundness_probe(
    rs: &RuleSet,
    d: &Derivation,
    algebras: &[FiniteGodelAlgebra],
) -> Result<bool, ProbeError> {
    if !check_derivation(rs, d).accepted {
        return Err(ProbeError::DerivationRejected);
    }
    let prelinear = prelinearity();
    for alg in algebras {
        let validates_base = match rs.base() {
            BaseLogic::Ipc => true,
            BaseLogic::Lc => alg.holds_identity(&prelinear),
        };
        let qualifies = validates_base && rs.rules().all(|(_, rule)| rule_holds(alg, rule).holds);
        if qualifies && !rule_holds(alg, &d.context).holds {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// interchange format

/// A derivation file: context, rule set and steps in one JSON document.
///
/// ```json
/// {
///   "base": "LC",
///   "context": {"premises": ["p", "p -> q"], "bound": [], "goal": "q"},
///   "sigma": [{"name": "density", "rule": "forall r . ... => ..."}],
///   "steps": [
///     {"premise": {"index": 0}},
///     {"premise": {"index": 1}},
///     {"mp": {"antecedent": 0, "implication": 1}}
///   ]
/// }
/// ```
///
/// `base` defaults to `"LC"`; formulas and rules are written in the concrete
/// syntax of the parser.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationFile {
    #[serde(default = "default_base")]
    pub base: BaseLogic,
    pub context: ContextSpec,
    #[serde(default)]
    pub sigma: Vec<NamedRuleSpec>,
    pub steps: Vec<Step>,
}

fn default_base() -> BaseLogic {
    BaseLogic::Lc
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    #[serde(default)]
    pub premises: Vec<Formula>,
    #[serde(default)]
    pub bound: Vec<String>,
    pub goal: Formula,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedRuleSpec {
    pub name: String,
    pub rule: Pi2Rule,
}

#[derive(Debug, thiserror::Error)]
pub enum DerivationFileError {
    #[error("malformed derivation file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad context: {0}")]
    Context(#[from] crate::syntax::RuleShapeError),
    #[error("bad rule set: {0}")]
    RuleSet(#[from] RuleSetError),
}

/// Parse a derivation file into its rule set and derivation.
pub fn parse_derivation_file(text: &str) -> Result<(RuleSet, Derivation), DerivationFileError> {
    let file: DerivationFile = serde_json::from_str(text)?;
    let context = Pi2Rule::new(file.context.premises, file.context.goal, file.context.bound)?;
    let rs = RuleSet::new(
        file.base,
        file.sigma.into_iter().map(|r| (r.name, r.rule)).collect(),
    )?;
    Ok((
        rs,
        Derivation {
            context,
            steps: file.steps,
        },
    ))
}
