use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use chrono::SecondsFormat;

use super::vocab::XSD;
use super::StoreError;
use crate::domain::Timestamp;

/// Absolute IRI. Never empty; never contains whitespace or `<>"{}|\^` and backtick.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(s: impl Into<String>) -> Result<Self, StoreError> {
        let s = s.into();
        let bad = |c: char| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`');
        if s.is_empty() || s.chars().any(bad) {
            return Err(StoreError::InvalidIri(s));
        }
        Ok(Self(s.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Finite `f64` literal with bitwise equality (`-0.0` is normalised to `0.0`).
#[derive(Clone, Copy, Debug)]
pub struct Decimal(f64);

impl Decimal {
    pub fn new(v: f64) -> Result<Self, StoreError> {
        if v.is_finite() {
            Ok(Self(if v == 0.0 { 0.0 } else { v }))
        } else {
            Err(StoreError::NonFiniteLiteral)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}
impl Eq for Decimal {}
impl Hash for Decimal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}
impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    String(Arc<str>),
    Decimal(Decimal),
    DateTime(Timestamp),
}

impl Literal {
    pub fn decimal(v: f64) -> Result<Self, StoreError> {
        Decimal::new(v).map(Literal::Decimal)
    }

    pub fn datatype(&self) -> &'static str {
        match self {
            Literal::String(_) => "string",
            Literal::Decimal(_) => "decimal",
            Literal::DateTime(_) => "dateTime",
        }
    }

    pub fn lexical(&self) -> String {
        match self {
            Literal::String(s) => s.to_string(),
            Literal::Decimal(d) => d.0.to_string(),
            Literal::DateTime(t) => t.to_rfc3339_opts(SecondsFormat::AutoSi, true),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Literal::Decimal(d) => Some(d.0),
            _ => None,
        }
    }

    pub fn as_datetime(&self) -> Option<Timestamp> {
        match self {
            Literal::DateTime(t) => Some(*t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_literal().and_then(Literal::as_f64)
    }

    pub fn as_datetime(&self) -> Option<Timestamp> {
        self.as_literal().and_then(Literal::as_datetime)
    }

    /// N-Triples style encoding used in repository files.
    pub fn encode(&self) -> String {
        match self {
            Term::Iri(i) => i.to_string(),
            Term::Literal(Literal::String(s)) => format!("\"{}\"", escape(s)),
            Term::Literal(l) => format!("\"{}\"^^<{XSD}{}>", l.lexical(), l.datatype()),
        }
    }

    /// Inverse of [`Term::encode`].
    pub fn decode(s: &str) -> Result<Self, StoreError> {
        let bad = || StoreError::Decode(s.to_string());
        if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return Iri::new(inner).map(Term::Iri).map_err(|_| bad());
        }
        let body = s.strip_prefix('"').ok_or_else(bad)?;
        if let Some(lexical) = body.strip_suffix('"') {
            return Ok(Term::Literal(Literal::String(unescape(lexical).ok_or_else(bad)?.into())));
        }
        let (lexical, dt) = body.rsplit_once("\"^^<").ok_or_else(bad)?;
        let dt = dt.strip_suffix('>').and_then(|d| d.strip_prefix(XSD)).ok_or_else(bad)?;
        let lit = match dt {
            "decimal" => Literal::decimal(lexical.parse().map_err(|_| bad())?)?,
            "dateTime" => Literal::DateTime(lexical.parse().map_err(|_| bad())?),
            "string" => Literal::String(unescape(lexical).ok_or_else(bad)?.into()),
            _ => return Err(bad()),
        };
        Ok(Term::Literal(lit))
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            if c == '"' {
                return None;
            }
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            '"' => '"',
            'n' => '\n',
            'r' => '\r',
            't' => '\t',
            _ => return None,
        });
    }
    Some(out)
}
