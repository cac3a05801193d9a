use std::fmt::Write;

use crate::store::{vocab, Iri, Literal, PatternTerm, Term, TriplePattern};

use super::Rule;

/// Canonical text of a rule. Parsing the output yields an equal rule, and
/// equal rules print identically.
pub fn serialize_rule(rule: &Rule) -> String {
    let mut out = String::new();
    writeln!(out, "# rule: {}", rule.name()).unwrap();
    for (p, base) in rule.prefixes() {
        writeln!(out, "PREFIX {p}: <{base}>").unwrap();
    }
    out.push_str("CONSTRUCT {\n");
    for t in rule.construct() {
        writeln!(out, "  {} .", triple(rule, t)).unwrap();
    }
    out.push_str("}\nWHERE {\n");
    for t in rule.where_patterns() {
        writeln!(out, "  {} .", triple(rule, t)).unwrap();
    }
    let cmps = &rule.filter().comparisons;
    if !cmps.is_empty() {
        let body: Vec<String> = cmps.iter().map(|c| format!("?{} {} {}", c.var, c.op.symbol(), c.value)).collect();
        writeln!(out, "  FILTER({})", body.join(" && ")).unwrap();
    }
    out.push_str("}\n");
    out
}

fn triple(rule: &Rule, t: &TriplePattern) -> String {
    let predicate = match &t.predicate {
        PatternTerm::Const(Term::Iri(i)) if *i == vocab::rdf_type() => "a".to_string(),
        other => term(rule, other),
    };
    format!("{} {} {}", term(rule, &t.subject), predicate, term(rule, &t.object))
}

fn term(rule: &Rule, t: &PatternTerm) -> String {
    match t {
        PatternTerm::Var(v) => format!("?{v}"),
        PatternTerm::Const(Term::Iri(i)) => compact(rule, i),
        PatternTerm::Const(Term::Literal(Literal::Decimal(d))) => d.value().to_string(),
        PatternTerm::Const(Term::Literal(Literal::String(s))) => Term::Literal(Literal::String(s.clone())).encode(),
        PatternTerm::Const(Term::Literal(l @ Literal::DateTime(_))) => format!("\"{}\"^^<{}dateTime>", l.lexical(), vocab::XSD),
    }
}

fn local_is_printable(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            local.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')) && !local.ends_with('.')
        }
        _ => false,
    }
}

/// Prefixed name when a declared (latest first) or standard prefix covers
/// the IRI and still resolves to it on re-parse.
fn compact(rule: &Rule, iri: &Iri) -> String {
    let declared = rule.prefixes().iter().rev().map(|(p, b)| (p.as_str(), b.as_str()));
    let standard = vocab::STANDARD_PREFIXES
        .iter()
        .copied()
        .filter(|(p, _)| !rule.prefixes().iter().any(|(d, _)| d == p));
    for (prefix, base) in declared.chain(standard) {
        if let Some(local) = iri.as_str().strip_prefix(base) {
            if local_is_printable(local) {
                return format!("{prefix}:{local}");
            }
        }
    }
    iri.to_string()
}
