use crate::domain::{FwiClass, PropertyKind, PropertyMap};
use crate::store::{vocab, CompareOp, Comparison, Filter, Interval, PatternTerm, Term, TriplePattern};

use super::{Rule, RuleError};

/// The High example rule as originally listed, where the humidity and
/// temperature values hang off the sensor rather than the observation.
pub const HIGH_RULE_LISTING: &str = include_str!("../../rules/high_listing.rq");

/// The High example rule with every value attached to its observation, the
/// form the stored graphs use.
pub const HIGH_RULE: &str = include_str!("../../rules/high.rq");

/// Per-property value interval of a generated rule.
pub type ObservationBounds = PropertyMap<Interval>;

fn prefix(kind: PropertyKind) -> &'static str {
    match kind {
        PropertyKind::RelativeHumidity => "RH",
        PropertyKind::WindSpeed => "WS",
        PropertyKind::AirTemperature => "AT",
    }
}

/// Builds a rule in the shape of [`HIGH_RULE`]: one observation per property
/// at a shared node and sampling time, with `bounds` as the filter.
/// Infinite bounds are omitted.
pub fn observation_rule(name: &str, class: FwiClass, bounds: &ObservationBounds) -> Result<Rule, RuleError> {
    let c = |iri| PatternTerm::Const(Term::Iri(iri));
    let v = |s: String| PatternTerm::Var(s);
    let mut where_patterns = Vec::with_capacity(18);
    let mut comparisons = Vec::new();
    for kind in [PropertyKind::RelativeHumidity, PropertyKind::WindSpeed, PropertyKind::AirTemperature] {
        let p = prefix(kind);
        let (ob, sensor, value) = (format!("{p}_OB1"), format!("{p}_Sensor1"), format!("{p}_OB1V"));
        where_patterns.extend([
            TriplePattern::new(v(ob.clone()), c(vocab::observed_property()), c(vocab::property_iri(kind))),
            TriplePattern::new(v(ob.clone()), c(vocab::sampling_time()), v("T".into())),
            TriplePattern::new(v(ob.clone()), c(vocab::unit_of_measure()), c(vocab::unit_iri(kind))),
            TriplePattern::new(v(ob.clone()), c(vocab::observed_by()), v(sensor.clone())),
            TriplePattern::new(v(sensor), c(vocab::deployed_on_platform()), v("node".into())),
            TriplePattern::new(v(ob), c(vocab::has_value()), v(value.clone())),
        ]);
        let iv = bounds.get(kind);
        if iv.lo.is_finite() {
            let op = if iv.lo_closed { CompareOp::Ge } else { CompareOp::Gt };
            comparisons.push(Comparison::new(value.clone(), op, iv.lo));
        }
        if iv.hi.is_finite() {
            let op = if iv.hi_closed { CompareOp::Le } else { CompareOp::Lt };
            comparisons.push(Comparison::new(value, op, iv.hi));
        }
    }
    let event = || v("FireEvent_1".into());
    let construct = vec![
        TriplePattern::new(event(), c(vocab::at_location()), v("node".into())),
        TriplePattern::new(event(), c(vocab::at_time()), v("T".into())),
        TriplePattern::new(event(), c(vocab::rdf_type()), c(vocab::class_iri(class))),
    ];
    Rule::new(name, Vec::new(), construct, where_patterns, Filter::new(comparisons))
}
