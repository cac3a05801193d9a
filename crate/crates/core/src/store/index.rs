use std::collections::BTreeMap;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use super::graph::{NamedGraph, Triple};
use super::pattern::{CompareOp, Filter, Interval, PatternTerm, TriplePattern};
use super::term::Term;

/// One solution: variable name (without `?`) to term.
pub type Binding = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("filter variable ?{0} is not bound by any pattern")]
    UnboundFilterVariable(String),
}

type Id = u32;
const UNBOUND: Id = Id::MAX;

#[derive(Default, Clone, Copy)]
struct PredicateStats {
    count: usize,
    subjects: usize,
    objects: usize,
}

/// Dictionary-encoded triple index.
///
/// Lookups by predicate, by (subject, predicate), by (predicate, object) and
/// by numeric object range within a predicate.
#[derive(Default)]
pub struct GraphIndex {
    dict: FxHashMap<Term, Id>,
    terms: Vec<Term>,
    numbers: Vec<Option<f64>>,
    all: Vec<[Id; 3]>,
    present: FxHashSet<[Id; 3]>,
    by_p: FxHashMap<Id, Vec<(Id, Id)>>,
    sp: FxHashMap<(Id, Id), Vec<Id>>,
    po: FxHashMap<(Id, Id), Vec<Id>>,
    numeric: FxHashMap<Id, Vec<(f64, Id, Id)>>,
    stats: FxHashMap<Id, PredicateStats>,
}

impl GraphIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graphs<'a>(graphs: impl IntoIterator<Item = &'a NamedGraph>) -> Self {
        let mut idx = Self::new();
        idx.extend(graphs.into_iter().flat_map(|g| g.triples().iter()));
        idx
    }

    pub fn from_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let mut idx = Self::new();
        idx.extend(triples);
        idx
    }

    pub fn extend<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) {
        let mut touched = FxHashSet::default();
        for t in triples {
            let s = self.intern(&Term::Iri(t.subject.clone()));
            let p = self.intern(&Term::Iri(t.predicate.clone()));
            let o = self.intern(&t.object);
            if !self.present.insert([s, p, o]) {
                continue;
            }
            self.all.push([s, p, o]);
            self.by_p.entry(p).or_default().push((s, o));
            self.sp.entry((s, p)).or_default().push(o);
            self.po.entry((p, o)).or_default().push(s);
            if let Some(v) = self.numbers[o as usize] {
                self.numeric.entry(p).or_default().push((v, s, o));
            }
            touched.insert(p);
        }
        for p in touched {
            if let Some(list) = self.numeric.get_mut(&p) {
                list.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            }
            let pairs = &self.by_p[&p];
            let subjects: FxHashSet<Id> = pairs.iter().map(|x| x.0).collect();
            let objects: FxHashSet<Id> = pairs.iter().map(|x| x.1).collect();
            self.stats.insert(p, PredicateStats { count: pairs.len(), subjects: subjects.len(), objects: objects.len() });
        }
    }

    fn intern(&mut self, term: &Term) -> Id {
        if let Some(&id) = self.dict.get(term) {
            return id;
        }
        let id = self.terms.len() as Id;
        self.dict.insert(term.clone(), id);
        self.terms.push(term.clone());
        self.numbers.push(term.as_f64());
        id
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        let lookup = |term: Term| self.dict.get(&term).copied();
        match (lookup(Term::Iri(t.subject.clone())), lookup(Term::Iri(t.predicate.clone())), lookup(t.object.clone())) {
            (Some(s), Some(p), Some(o)) => self.present.contains(&[s, p, o]),
            _ => false,
        }
    }

    /// Every assignment of the pattern variables that grounds all patterns to
    /// indexed triples and satisfies `filter`, sorted and without duplicates.
    pub fn match_bgp(&self, patterns: &[TriplePattern], filter: &Filter) -> Result<Vec<Binding>, MatchError> {
        let Some(plan) = Plan::compile(self, patterns, filter)? else {
            return Ok(Vec::new());
        };
        let mut state = vec![UNBOUND; plan.vars.len()];
        let mut found: Vec<Vec<Id>> = Vec::new();
        self.search(&plan, 0, &mut state, &mut found);
        let mut out: Vec<Binding> = found
            .into_iter()
            .map(|row| {
                plan.vars
                    .iter()
                    .zip(row)
                    .map(|(name, id)| (name.clone(), self.terms[id as usize].clone()))
                    .collect()
            })
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn search(&self, plan: &Plan, depth: usize, state: &mut Vec<Id>, out: &mut Vec<Vec<Id>>) {
        let Some(step) = plan.steps.get(depth) else {
            out.push(state.clone());
            return;
        };
        let resolve = |slot: Slot, state: &[Id]| match slot {
            Slot::Const(c) => c,
            Slot::Var(v) => state[v],
        };
        let [s, p, o] = step.slots.map(|x| resolve(x, state));
        let mut visit = |triple: [Id; 3], state: &mut Vec<Id>| {
            let mut newly = [usize::MAX; 3];
            let mut ok = true;
            for (i, slot) in step.slots.iter().enumerate() {
                if let Slot::Const(c) = *slot {
                    if c != triple[i] {
                        ok = false;
                        break;
                    }
                } else if let Slot::Var(v) = *slot {
                    if state[v] == UNBOUND {
                        state[v] = triple[i];
                        newly[i] = v;
                        if !plan.accepts(v, self.numbers[triple[i] as usize]) {
                            ok = false;
                            break;
                        }
                    } else if state[v] != triple[i] {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.search(plan, depth + 1, state, out);
            }
            for v in newly.into_iter().filter(|&v| v != usize::MAX) {
                state[v] = UNBOUND;
            }
        };
        match step.access {
            Access::Exact => {
                if self.present.contains(&[s, p, o]) {
                    visit([s, p, o], state);
                }
            }
            Access::BySubjectPredicate => {
                for &obj in self.sp.get(&(s, p)).map(Vec::as_slice).unwrap_or(&[]) {
                    visit([s, p, obj], state);
                }
            }
            Access::ByPredicateObject => {
                for &sub in self.po.get(&(p, o)).map(Vec::as_slice).unwrap_or(&[]) {
                    visit([sub, p, o], state);
                }
            }
            Access::Range(iv) => {
                for &(_, sub, obj) in self.range(p, &iv) {
                    visit([sub, p, obj], state);
                }
            }
            Access::ByPredicate => {
                for &(sub, obj) in self.by_p.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
                    visit([sub, p, obj], state);
                }
            }
            Access::Scan => {
                for &t in &self.all {
                    visit(t, state);
                }
            }
        }
    }

    fn range(&self, p: Id, iv: &Interval) -> &[(f64, Id, Id)] {
        let Some(list) = self.numeric.get(&p) else {
            return &[];
        };
        let lo = list.partition_point(|e| if iv.lo_closed { e.0 < iv.lo } else { e.0 <= iv.lo });
        let hi = list.partition_point(|e| if iv.hi_closed { e.0 <= iv.hi } else { e.0 < iv.hi });
        if lo >= hi {
            &[]
        } else {
            &list[lo..hi]
        }
    }
}

/// Convenience wrapper: index the union of `graphs` and match once.
pub fn match_bgp<'a>(
    graphs: impl IntoIterator<Item = &'a NamedGraph>,
    patterns: &[TriplePattern],
    filter: &Filter,
) -> Result<Vec<Binding>, MatchError> {
    GraphIndex::from_graphs(graphs).match_bgp(patterns, filter)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Slot {
    Const(Id),
    Var(usize),
}

#[derive(Clone, Copy, Debug)]
enum Access {
    Exact,
    BySubjectPredicate,
    ByPredicateObject,
    Range(Interval),
    ByPredicate,
    Scan,
}

struct Step {
    slots: [Slot; 3],
    access: Access,
}

struct Plan {
    vars: Vec<String>,
    /// Comparisons per variable index.
    checks: Vec<Vec<(CompareOp, f64)>>,
    steps: Vec<Step>,
}

impl Plan {
    fn accepts(&self, var: usize, value: Option<f64>) -> bool {
        let checks = &self.checks[var];
        if checks.is_empty() {
            return true;
        }
        value.is_some_and(|v| checks.iter().all(|&(op, c)| op.eval(v, c)))
    }

    /// Greedy left-deep ordering by estimated fan-out. `None` when a constant
    /// is absent from the index, so nothing can match.
    fn compile(idx: &GraphIndex, patterns: &[TriplePattern], filter: &Filter) -> Result<Option<Plan>, MatchError> {
        let mut vars: Vec<String> = Vec::new();
        for p in patterns {
            for v in p.vars() {
                if !vars.iter().any(|x| x == v) {
                    vars.push(v.to_string());
                }
            }
        }
        let var_index = |name: &str| vars.iter().position(|x| x == name);
        let mut checks = vec![Vec::new(); vars.len()];
        for c in &filter.comparisons {
            let v = var_index(&c.var).ok_or_else(|| MatchError::UnboundFilterVariable(c.var.clone()))?;
            checks[v].push((c.op, c.value));
        }
        let intervals = filter.intervals();
        if intervals.values().any(Interval::is_empty) {
            return Ok(None);
        }

        let mut encoded = Vec::with_capacity(patterns.len());
        for p in patterns {
            let mut slots = [Slot::Var(0); 3];
            for (i, t) in p.terms().into_iter().enumerate() {
                slots[i] = match t {
                    PatternTerm::Var(v) => Slot::Var(var_index(v).expect("collected above")),
                    PatternTerm::Const(c) => match idx.dict.get(c) {
                        Some(&id) => Slot::Const(id),
                        None => return Ok(None),
                    },
                };
            }
            encoded.push(slots);
        }

        let mut bound = vec![false; vars.len()];
        let mut remaining: Vec<[Slot; 3]> = encoded;
        let mut steps = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let (best, access, _) = remaining
                .iter()
                .enumerate()
                .map(|(i, slots)| {
                    let (access, cost) = estimate(idx, slots, &bound, &vars, &intervals);
                    (i, access, cost)
                })
                .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
                .expect("non-empty");
            let slots = remaining.remove(best);
            for s in slots {
                if let Slot::Var(v) = s {
                    bound[v] = true;
                }
            }
            steps.push(Step { slots, access });
        }
        Ok(Some(Plan { vars, checks, steps }))
    }
}

fn estimate(
    idx: &GraphIndex,
    slots: &[Slot; 3],
    bound: &[bool],
    vars: &[String],
    intervals: &BTreeMap<String, Interval>,
) -> (Access, f64) {
    let is_bound = |s: Slot| match s {
        Slot::Const(_) => true,
        Slot::Var(v) => bound[v],
    };
    let [s, p, o] = *slots;
    let (sb, pb, ob) = (is_bound(s), is_bound(p), is_bound(o));
    let total = idx.all.len().max(1) as f64;
    if sb && pb && ob {
        return (Access::Exact, 0.5);
    }
    let Slot::Const(pid) = p else {
        // Variable predicates are rare; bound only after another pattern
        // touched them, still scanned.
        let cost = if sb || ob { total / 4.0 } else { total };
        return (Access::Scan, cost);
    };
    if !pb {
        unreachable!("constant predicate is always bound");
    }
    let stats = idx.stats.get(&pid).copied().unwrap_or_default();
    let count = stats.count as f64;
    if sb {
        let cost = match s {
            Slot::Const(sid) => idx.sp.get(&(sid, pid)).map_or(0, Vec::len) as f64,
            Slot::Var(_) => count / stats.subjects.max(1) as f64,
        };
        return (Access::BySubjectPredicate, cost);
    }
    if ob {
        let cost = match o {
            Slot::Const(oid) => idx.po.get(&(pid, oid)).map_or(0, Vec::len) as f64,
            Slot::Var(_) => count / stats.objects.max(1) as f64,
        };
        return (Access::ByPredicateObject, cost);
    }
    if let Slot::Var(ov) = o {
        if let Some(iv) = intervals.get(&vars[ov]) {
            let n = idx.range(pid, iv).len() as f64;
            return (Access::Range(*iv), n);
        }
    }
    (Access::ByPredicate, count)
}
