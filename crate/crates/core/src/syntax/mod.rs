//! Formulas, rules and substitutions.
//!
//! Formulas are propositional trees over `{and, or, imp, 0, 1}`. Negation
//! and the slash connective are surface syntax only: `~a` is read as
//! `a -> 0` and `a / b` as `(b -> a) -> b`, so every tree handed to the
//! rest of the crate uses the five primitive constructors.

mod parse;

pub use parse::{parse_formula, parse_rule, ParseError};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A propositional formula in the five-connective core language.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Var(String),
    Bot,
    Top,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// `~a`, desugared: `a -> 0`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Self {
        Formula::imp(a, Formula::Bot)
    }

    /// `a / b`, desugared: `(b -> a) -> b`.
    pub fn slash(a: Formula, b: Formula) -> Self {
        Formula::imp(Formula::imp(b.clone(), a), b)
    }

    /// Left-associated conjunction of a nonempty sequence.
    pub fn big_and(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Left-associated disjunction of a nonempty sequence.
    pub fn big_or(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    /// The set of variables occurring in the formula.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(name) => {
                out.insert(name.clone());
            }
            Formula::Bot | Formula::Top => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Append variables in order of first occurrence (left to right).
    pub fn variables_in_order(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(name) => {
                if !out.iter().any(|v| v == name) {
                    out.push(name.clone());
                }
            }
            Formula::Bot | Formula::Top => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.variables_in_order(out);
                b.variables_in_order(out);
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Formula::Var(v) => v == name,
            Formula::Bot | Formula::Top => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_var(name) || b.contains_var(name)
            }
        }
    }
}

/// The set of variables occurring in `f`.
pub fn variables(f: &Formula) -> BTreeSet<String> {
    f.variables()
}

// Precedence levels used by the printer; matches the parser.
const PREC_IMP: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_ATOM: u8 = 3;

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Imp(..) => PREC_IMP,
            Formula::Or(..) => PREC_OR,
            Formula::And(..) => PREC_AND,
            Formula::Var(_) | Formula::Bot | Formula::Top => PREC_ATOM,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.prec();
        let parens = me < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Var(name) => write!(f, "{name}")?,
            Formula::Bot => write!(f, "0")?,
            Formula::Top => write!(f, "1")?,
            // `->` is right-associative: the left child needs one level more.
            Formula::Imp(a, b) => {
                a.fmt_prec(f, PREC_IMP + 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, PREC_IMP)?;
            }
            // `|` and `&` are parsed left-associatively.
            Formula::Or(a, b) => {
                a.fmt_prec(f, PREC_OR)?;
                write!(f, " | ")?;
                b.fmt_prec(f, PREC_OR + 1)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, PREC_AND)?;
                write!(f, " & ")?;
                b.fmt_prec(f, PREC_AND + 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, PREC_IMP)
    }
}

// Formulas travel through JSON as their concrete syntax.
impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_formula(&text).map_err(D::Error::custom)
    }
}

/// A finite map from variables to formulas, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution {
    map: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution::default()
    }

    pub fn new(map: BTreeMap<String, Formula>) -> Self {
        Substitution { map }
    }

    pub fn bind(mut self, var: impl Into<String>, image: Formula) -> Self {
        self.map.insert(var.into(), image);
        self
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.map.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn images(&self) -> impl Iterator<Item = &Formula> {
        self.map.values()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Simultaneous application: unmapped variables are left unchanged.
    pub fn apply(&self, f: &Formula) -> Formula {
        match f {
            Formula::Var(name) => match self.map.get(name) {
                Some(image) => image.clone(),
                None => f.clone(),
            },
            Formula::Bot | Formula::Top => f.clone(),
            Formula::And(a, b) => Formula::and(self.apply(a), self.apply(b)),
            Formula::Or(a, b) => Formula::or(self.apply(a), self.apply(b)),
            Formula::Imp(a, b) => Formula::imp(self.apply(a), self.apply(b)),
        }
    }

    /// The composite substitution `self then later`: applying the result
    /// equals applying `self` first and `later` to the outcome.
    pub fn then(&self, later: &Substitution) -> Substitution {
        let mut map: BTreeMap<String, Formula> = self
            .map
            .iter()
            .map(|(var, image)| (var.clone(), later.apply(image)))
            .collect();
        for (var, image) in &later.map {
            map.entry(var.clone()).or_insert_with(|| image.clone());
        }
        Substitution { map }
    }
}

/// Simultaneous replacement of variables by their images.
pub fn apply_substitution(f: &Formula, s: &Substitution) -> Formula {
    s.apply(f)
}

impl FromIterator<(String, Formula)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (String, Formula)>>(iter: T) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Violations of the [`Pi2Rule`] shape invariants.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleShapeError {
    #[error("bound variable occurs in conclusion: {0}")]
    BoundInConclusion(String),
    #[error("duplicate bound variable: {0}")]
    DuplicateBound(String),
    #[error("invalid variable name: {0:?}")]
    BadVariableName(String),
}

/// A rule `forall q1..qk . f1, ..., fn => g`.
///
/// The bound variables are quantified inside the premises and may not occur
/// in the conclusion. An empty bound set makes this a plain premises/conclusion
/// rule; an empty premise list makes it an axiom.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pi2Rule {
    premises: Vec<Formula>,
    conclusion: Formula,
    bound: Vec<String>,
}

impl Pi2Rule {
    pub fn new(
        premises: Vec<Formula>,
        conclusion: Formula,
        bound: Vec<String>,
    ) -> Result<Self, RuleShapeError> {
        let mut seen = BTreeSet::new();
        for name in &bound {
            if !parse::is_identifier(name) {
                return Err(RuleShapeError::BadVariableName(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(RuleShapeError::DuplicateBound(name.clone()));
            }
            if conclusion.contains_var(name) {
                return Err(RuleShapeError::BoundInConclusion(name.clone()));
            }
        }
        Ok(Pi2Rule {
            premises,
            conclusion,
            bound,
        })
    }

    /// An axiom: no premises, no bound variables.
    pub fn axiom(conclusion: Formula) -> Self {
        Pi2Rule {
            premises: Vec::new(),
            conclusion,
            bound: Vec::new(),
        }
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    pub fn bound(&self) -> &[String] {
        &self.bound
    }

    pub fn is_bound(&self, name: &str) -> bool {
        self.bound.iter().any(|b| b == name)
    }

    pub fn is_axiom(&self) -> bool {
        self.premises.is_empty()
    }

    pub fn is_pi1(&self) -> bool {
        self.bound.is_empty()
    }

    /// Free variables in order of first occurrence: premises left to right,
    /// then the conclusion.
    pub fn free_variables(&self) -> Vec<String> {
        let mut all = Vec::new();
        for premise in &self.premises {
            premise.variables_in_order(&mut all);
        }
        self.conclusion.variables_in_order(&mut all);
        all.retain(|v| !self.is_bound(v));
        all
    }

    /// All variables (free and bound) occurring in the rule.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = self.conclusion.variables();
        for premise in &self.premises {
            premise.collect_variables(&mut out);
        }
        out
    }
}

impl fmt::Display for Pi2Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.bound.is_empty() {
            write!(f, "forall {} . ", self.bound.join(" "))?;
        }
        for (i, premise) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{premise}")?;
        }
        if !self.premises.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "=> {}", self.conclusion)
    }
}

impl Serialize for Pi2Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Pi2Rule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rule(&text).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Formula {
        Formula::var(name)
    }

    #[test]
    fn substitution_is_simultaneous() {
        let f = Formula::imp(v("p"), v("q"));
        let s = Substitution::identity().bind("p", v("q")).bind("q", v("p"));
        assert_eq!(s.apply(&f), Formula::imp(v("q"), v("p")));
    }

    #[test]
    fn substitution_fixes_constants() {
        let s = Substitution::identity().bind("p", v("x"));
        assert_eq!(s.apply(&Formula::Bot), Formula::Bot);
    }

    #[test]
    fn substitution_example_from_grammar() {
        let f = Formula::imp(v("p"), v("q"));
        let s = Substitution::identity().bind("p", Formula::and(v("q"), v("r")));
        assert_eq!(
            s.apply(&f),
            Formula::imp(Formula::and(v("q"), v("r")), v("q"))
        );
    }

    #[test]
    fn variables_of_formula() {
        let f = Formula::imp(v("p"), Formula::or(v("q"), v("p")));
        let vars: Vec<_> = f.variables().into_iter().collect();
        assert_eq!(vars, vec!["p".to_string(), "q".to_string()]);
        assert!(Formula::imp(Formula::Bot, Formula::Top)
            .variables()
            .is_empty());
    }

    #[test]
    fn rule_rejects_bound_in_conclusion() {
        let err = Pi2Rule::new(vec![v("x")], v("p"), vec!["p".into()]).unwrap_err();
        assert_eq!(err, RuleShapeError::BoundInConclusion("p".into()));
    }

    #[test]
    fn rule_rejects_duplicate_bound() {
        let err = Pi2Rule::new(vec![v("x")], v("y"), vec!["r".into(), "r".into()]).unwrap_err();
        assert_eq!(err, RuleShapeError::DuplicateBound("r".into()));
    }

    #[test]
    fn free_variables_in_first_occurrence_order() {
        let rule = parse_rule("forall r . g -> ((p->r)|(r->q)|c) => g -> ((p->q)|c)").unwrap();
        assert_eq!(rule.free_variables(), vec!["g", "p", "q", "c"]);
        assert_eq!(rule.bound(), ["r".to_string()]);
    }
}
