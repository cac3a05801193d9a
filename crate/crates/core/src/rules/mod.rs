//! The CONSTRUCT rule language: parsing, canonical printing, validation and
//! application to stored graphs.
//!
//! A rule has the form
//!
//! ```text
//! # rule: high_example
//! PREFIX fwi: <http://firewx.example.org/ontology/fwi#>
//! CONSTRUCT { ?e prov:atLocation ?node . ?e prov:atTime ?T . ?e a fwi:High . }
//! WHERE {
//!   ?ob ssn:ObservedProperty cf:air_temperature .
//!   ...
//!   FILTER(?v >= 32 && ?v <= 41)
//! }
//! ```
//!
//! Keywords are case-insensitive, `.` separators are optional, and the
//! prefixes `ssn cf dul unit prov rdf xsd fwi` resolve without declaration.

mod apply;
mod lexer;
mod parser;
mod printer;
mod ruleset;
mod template;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::FwiClass;
use crate::store::{vocab, Filter, Iri, PatternTerm, Term, TriplePattern};

pub use apply::{apply_rule, apply_rule_to_index, event_iri_for, fire_rules, RuleFiring};
pub use parser::{parse_rule, parse_rules};
pub use printer::serialize_rule;
pub use ruleset::{Manifest, ManifestEntry, RuleSet, RuleSetError};
pub use template::{observation_rule, ObservationBounds, HIGH_RULE, HIGH_RULE_LISTING};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("variable ?{0} is not bound by the WHERE block")]
    UnboundVariable(String),
    #[error("filter bounds on ?{0} admit no value")]
    EmptyInterval(String),
    #[error("unsupported CONSTRUCT block: {0}")]
    UnsupportedConstruct(String),
    #[error("invalid rule name {0:?}")]
    InvalidName(String),
}

/// The fire-event shape every rule constructs:
/// `?e prov:atLocation ?loc . ?e prov:atTime ?t . ?e rdf:type <class>`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventShape {
    pub event_var: String,
    pub location_var: String,
    pub time_var: String,
    pub class_iri: Iri,
    pub class: FwiClass,
}

/// A validated CONSTRUCT rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    name: String,
    prefixes: Vec<(String, String)>,
    construct: Vec<TriplePattern>,
    where_patterns: Vec<TriplePattern>,
    filter: Filter,
    shape: EventShape,
}

pub(crate) fn valid_rule_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl Rule {
    /// Checks scoping, filter satisfiability and the event shape.
    pub fn new(
        name: impl Into<String>,
        prefixes: Vec<(String, String)>,
        construct: Vec<TriplePattern>,
        where_patterns: Vec<TriplePattern>,
        filter: Filter,
    ) -> Result<Self, RuleError> {
        let name = name.into();
        if !valid_rule_name(&name) {
            return Err(RuleError::InvalidName(name));
        }
        let bound: BTreeSet<&str> = where_patterns.iter().flat_map(TriplePattern::vars).collect();
        if let Some(v) = filter.vars().find(|v| !bound.contains(v)) {
            return Err(RuleError::UnboundVariable(v.to_string()));
        }
        if let Some((v, _)) = filter.intervals().iter().find(|(_, iv)| iv.is_empty()) {
            return Err(RuleError::EmptyInterval(v.clone()));
        }
        let shape = match event_shape(&construct, &bound) {
            Ok(shape) => shape,
            Err(e) => {
                // A fresh subject with no atLocation/atTime template is tied to
                // nothing in WHERE: report it as unbound rather than misshapen.
                let has = |p: Iri| construct.iter().any(|t| t.predicate == PatternTerm::Const(Term::Iri(p.clone())));
                let anchored = has(vocab::at_location()) && has(vocab::at_time());
                let unbound = construct.iter().flat_map(TriplePattern::vars).find(|v| !bound.contains(v));
                return Err(match unbound {
                    Some(v) if !anchored => RuleError::UnboundVariable(v.to_string()),
                    _ => e,
                });
            }
        };
        Ok(Self { name, prefixes, construct, where_patterns, filter, shape })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Declared prefixes in declaration order.
    pub fn prefixes(&self) -> &[(String, String)] {
        &self.prefixes
    }

    pub fn construct(&self) -> &[TriplePattern] {
        &self.construct
    }

    pub fn where_patterns(&self) -> &[TriplePattern] {
        &self.where_patterns
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn shape(&self) -> &EventShape {
        &self.shape
    }

    pub fn class(&self) -> FwiClass {
        self.shape.class
    }

    /// Same rule under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self, RuleError> {
        let name = name.into();
        if !valid_rule_name(&name) {
            return Err(RuleError::InvalidName(name));
        }
        Ok(Self { name, ..self.clone() })
    }
}

fn event_shape(construct: &[TriplePattern], bound: &BTreeSet<&str>) -> Result<EventShape, RuleError> {
    let unsupported = |m: &str| RuleError::UnsupportedConstruct(m.to_string());
    if construct.len() != 3 {
        return Err(unsupported("expected exactly three templates: atLocation, atTime and rdf:type"));
    }
    let PatternTerm::Var(event_var) = &construct[0].subject else {
        return Err(unsupported("the event subject must be a variable"));
    };
    if construct.iter().any(|t| t.subject != construct[0].subject) {
        return Err(unsupported("all templates must share one event subject"));
    }
    if bound.contains(event_var.as_str()) {
        return Err(unsupported("the event variable must not occur in WHERE"));
    }
    let pred = |iri: Iri| construct.iter().find(|t| t.predicate == PatternTerm::Const(Term::Iri(iri.clone())));
    let bound_var = |t: Option<&TriplePattern>, what: &str| -> Result<String, RuleError> {
        match t.map(|t| &t.object) {
            Some(PatternTerm::Var(v)) if bound.contains(v.as_str()) => Ok(v.clone()),
            Some(PatternTerm::Var(v)) => Err(RuleError::UnboundVariable(v.clone())),
            _ => Err(unsupported(&format!("missing {what} template with a variable object"))),
        }
    };
    let location_var = bound_var(pred(vocab::at_location()), "prov:atLocation")?;
    let time_var = bound_var(pred(vocab::at_time()), "prov:atTime")?;
    let class_iri = match pred(vocab::rdf_type()).map(|t| &t.object) {
        Some(PatternTerm::Const(Term::Iri(i))) => i.clone(),
        _ => return Err(unsupported("missing rdf:type template with a class IRI")),
    };
    let class = vocab::class_of(&class_iri).ok_or_else(|| unsupported(&format!("{class_iri} is not a fire-weather class")))?;
    Ok(EventShape { event_var: event_var.clone(), location_var, time_var, class_iri, class })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbound_event_in_empty_where() {
        let e = parse_rule("CONSTRUCT { ?e a fwi:Low } WHERE { }").unwrap_err();
        assert_eq!(e, RuleError::UnboundVariable("e".into()));
    }

    #[test]
    fn contradictory_filter() {
        let e = parse_rule(
            "CONSTRUCT { ?e prov:atLocation ?n . ?e prov:atTime ?t . ?e a fwi:Low }
             WHERE { ?o ssn:deployedOnPlatform ?n . ?o ssn:ObservationSamplingTime ?t . ?o ssn:hasValue ?x
                     FILTER(?x>=10 && ?x<=5) }",
        )
        .unwrap_err();
        assert_eq!(e, RuleError::EmptyInterval("x".into()));
    }

    #[test]
    fn filter_variable_must_be_bound() {
        let e = parse_rule(
            "CONSTRUCT { ?e prov:atLocation ?n . ?e prov:atTime ?t . ?e a fwi:Low }
             WHERE { ?o ssn:deployedOnPlatform ?n . ?o ssn:ObservationSamplingTime ?t FILTER(?y > 1) }",
        )
        .unwrap_err();
        assert_eq!(e, RuleError::UnboundVariable("y".into()));
    }

    #[test]
    fn construct_shape_is_enforced() {
        let e = parse_rule(
            "CONSTRUCT { ?n prov:atTime ?t } WHERE { ?o ssn:deployedOnPlatform ?n . ?o ssn:ObservationSamplingTime ?t }",
        )
        .unwrap_err();
        assert!(matches!(e, RuleError::UnsupportedConstruct(_)), "{e:?}");
        let e = parse_rule(
            "CONSTRUCT { ?e prov:atLocation ?n . ?e prov:atTime ?t . ?e a fwi:Nope }
             WHERE { ?o ssn:deployedOnPlatform ?n . ?o ssn:ObservationSamplingTime ?t }",
        )
        .unwrap_err();
        assert!(matches!(e, RuleError::UnsupportedConstruct(_)), "{e:?}");
        let e = parse_rule(
            "CONSTRUCT { ?e prov:atLocation ?zz . ?e prov:atTime ?t . ?e a fwi:Low }
             WHERE { ?o ssn:deployedOnPlatform ?n . ?o ssn:ObservationSamplingTime ?t }",
        )
        .unwrap_err();
        assert_eq!(e, RuleError::UnboundVariable("zz".into()));
    }

    #[test]
    fn shape_of_listing() {
        let r = parse_rule(HIGH_RULE).unwrap();
        let s = r.shape();
        assert_eq!((s.event_var.as_str(), s.location_var.as_str(), s.time_var.as_str()), ("FireEvent_1", "node", "T"));
        assert_eq!(s.class.label(), "high");
    }
}
