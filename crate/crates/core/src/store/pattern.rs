use std::collections::BTreeMap;
use std::fmt;

use super::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

impl<T: Into<Term>> From<T> for PatternTerm {
    fn from(t: T) -> Self {
        PatternTerm::Const(t.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: impl Into<PatternTerm>, predicate: impl Into<PatternTerm>, object: impl Into<PatternTerm>) -> Self {
        Self { subject: subject.into(), predicate: predicate.into(), object: object.into() }
    }

    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(PatternTerm::as_var)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "=",
        }
    }

    /// The operator with its operands swapped: `c < x` is `x > c`.
    pub fn flipped(self) -> Self {
        match self {
            CompareOp::Lt => CompareOp::Gt,
            CompareOp::Le => CompareOp::Ge,
            CompareOp::Gt => CompareOp::Lt,
            CompareOp::Ge => CompareOp::Le,
            CompareOp::Eq => CompareOp::Eq,
        }
    }

    pub fn eval(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CompareOp::Lt => lhs < rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Ge => lhs >= rhs,
            CompareOp::Eq => lhs == rhs,
        }
    }
}

/// `?var <op> value`.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub var: String,
    pub op: CompareOp,
    pub value: f64,
}

impl Comparison {
    pub fn new(var: impl Into<String>, op: CompareOp, value: f64) -> Self {
        Self { var: var.into(), op, value }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{} {} {}", self.var, self.op.symbol(), self.value)
    }
}

/// Conjunction of numeric comparisons.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Filter {
    pub comparisons: Vec<Comparison>,
}

impl Filter {
    pub fn new(comparisons: Vec<Comparison>) -> Self {
        Self { comparisons }
    }

    pub fn is_empty(&self) -> bool {
        self.comparisons.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.comparisons.iter().map(|c| c.var.as_str())
    }

    /// Feasible interval per filtered variable.
    pub fn intervals(&self) -> BTreeMap<String, Interval> {
        let mut out: BTreeMap<String, Interval> = BTreeMap::new();
        for c in &self.comparisons {
            out.entry(c.var.clone()).or_insert_with(Interval::unbounded).restrict(c.op, c.value);
        }
        out
    }

    /// Evaluates the conjunction; a variable without a numeric value fails
    /// every comparison that mentions it.
    pub fn accepts(&self, value_of: impl Fn(&str) -> Option<f64>) -> bool {
        self.comparisons
            .iter()
            .all(|c| value_of(&c.var).is_some_and(|v| c.op.eval(v, c.value)))
    }
}

/// Real interval with independently open or closed ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn unbounded() -> Self {
        Self { lo: f64::NEG_INFINITY, lo_closed: false, hi: f64::INFINITY, hi_closed: false }
    }

    fn raise_lo(&mut self, v: f64, closed: bool) {
        if v > self.lo {
            self.lo = v;
            self.lo_closed = closed;
        } else if v == self.lo {
            self.lo_closed &= closed;
        }
    }

    fn lower_hi(&mut self, v: f64, closed: bool) {
        if v < self.hi {
            self.hi = v;
            self.hi_closed = closed;
        } else if v == self.hi {
            self.hi_closed &= closed;
        }
    }

    pub fn restrict(&mut self, op: CompareOp, v: f64) {
        match op {
            CompareOp::Gt => self.raise_lo(v, false),
            CompareOp::Ge => self.raise_lo(v, true),
            CompareOp::Lt => self.lower_hi(v, false),
            CompareOp::Le => self.lower_hi(v, true),
            CompareOp::Eq => {
                self.raise_lo(v, true);
                self.lower_hi(v, true);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let below = if self.hi_closed { v <= self.hi } else { v < self.hi };
        above && below
    }
}
