use firewx_core::ffdi::{generate_rule_table, GridBox, RuleGridSpec};
use firewx_core::rules::{parse_rule, parse_rules, serialize_rule, RuleSet, HIGH_RULE, HIGH_RULE_LISTING};
use firewx_core::store::Interval;
use firewx_core::{FwiClass, PropertyKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent score and class lookup with the conventional bands.
fn reference_class(t: f64, h: f64, w_mps: f64) -> u8 {
    let v = w_mps * 3.6;
    let score = 2.0 * (-0.45 + 0.987 * 5f64.ln() - 0.0345 * h + 0.0338 * t + 0.0234 * v).exp();
    let majors = [0.0, 6.0, 12.0, 25.0, 50.0];
    let m = majors.iter().rposition(|&e| score >= e).unwrap();
    let sub = if m == 4 {
        [50.0, 75.0, 100.0].iter().rposition(|&e| score >= e).unwrap()
    } else {
        let (lo, hi) = (majors[m], majors[m + 1]);
        let third = (hi - lo) / 3.0;
        if score >= lo + 2.0 * third { 2 } else if score >= lo + third { 1 } else { 0 }
    };
    (m * 3 + sub + 1) as u8
}

fn small_spec() -> RuleGridSpec {
    let e = |n: i32| (0..n).map(|i| f64::from(i) * 8.0).collect::<Vec<_>>();
    RuleGridSpec { temperature: e(7), humidity: (0..7).map(|i| f64::from(i) * 100.0 / 6.0).collect(), wind: e(6).into_iter().map(|x| x / 2.0).collect(), ..RuleGridSpec::default() }
}

fn overlap(a: &Interval, b: &Interval) -> bool {
    let (lo, lo_closed) = if a.lo > b.lo { (a.lo, a.lo_closed) } else if b.lo > a.lo { (b.lo, b.lo_closed) } else { (a.lo, a.lo_closed && b.lo_closed) };
    let (hi, hi_closed) = if a.hi < b.hi { (a.hi, a.hi_closed) } else if b.hi < a.hi { (b.hi, b.hi_closed) } else { (a.hi, a.hi_closed && b.hi_closed) };
    lo < hi || (lo == hi && lo_closed && hi_closed)
}

fn value_var(kind: PropertyKind) -> &'static str {
    match kind {
        PropertyKind::AirTemperature => "AT_OB1V",
        PropertyKind::RelativeHumidity => "RH_OB1V",
        PropertyKind::WindSpeed => "WS_OB1V",
    }
}

fn accepting(set: &RuleSet, t: f64, h: f64, w: f64) -> Vec<FwiClass> {
    set.iter()
        .filter(|r| {
            r.filter().accepts(|v| match v {
                "AT_OB1V" => Some(t),
                "RH_OB1V" => Some(h),
                "WS_OB1V" => Some(w),
                _ => None,
            })
        })
        .map(|r| r.class())
        .collect()
}

#[test]
fn small_grid_boxes_are_pairwise_disjoint() {
    let boxes: Vec<GridBox> = small_spec().boxes().unwrap();
    assert_eq!(boxes.len(), 180);
    for (i, a) in boxes.iter().enumerate() {
        for b in &boxes[i + 1..] {
            let all = PropertyKind::ALL.iter().all(|&k| overlap(a.bounds.get(k), b.bounds.get(k)));
            assert!(!all, "{} overlaps {}", a.name, b.name);
        }
    }
}

#[test]
fn every_in_range_point_matches_exactly_one_rule() {
    let spec = small_spec();
    let set = generate_rule_table(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pick = |rng: &mut ChaCha8Rng, edges: &[f64]| {
        // Edges themselves, including both ends, are the interesting cases.
        if rng.random_bool(0.4) { edges[rng.random_range(0..edges.len())] } else { rng.random_range(edges[0]..=*edges.last().unwrap()) }
    };
    for _ in 0..5_000 {
        let (t, h, w) = (pick(&mut rng, &spec.temperature), pick(&mut rng, &spec.humidity), pick(&mut rng, &spec.wind));
        let hits = accepting(&set, t, h, w);
        assert_eq!(hits.len(), 1, "({t}, {h}, {w}) matched {hits:?}");
        assert_eq!(Some(hits[0]), spec.class_of(t, h, w).unwrap());
    }
    // Out of range on any axis matches nothing.
    assert!(accepting(&set, -0.1, 50.0, 1.0).is_empty());
    assert!(accepting(&set, 10.0, 50.0, 20.1).is_empty());
}

#[test]
fn default_grid_tiles_and_agrees_with_its_lookup() {
    let spec = RuleGridSpec::default();
    let set = generate_rule_table(&spec).unwrap();
    assert_eq!(set.len(), 15_000);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..300 {
        let (t, h, w) = (rng.random_range(0.0..=45.0), rng.random_range(0.0..=100.0), rng.random_range(0.0..=25.0));
        let hits = accepting(&set, t, h, w);
        assert_eq!(hits.len(), 1);
        assert_eq!(Some(hits[0]), spec.class_of(t, h, w).unwrap());
    }
}

#[test]
fn box_classes_match_the_reference_score_at_midpoints() {
    for b in RuleGridSpec::default().boxes().unwrap() {
        let mid = |k| {
            let iv = b.bounds.get(k);
            (iv.lo + iv.hi) / 2.0
        };
        let want = reference_class(mid(PropertyKind::AirTemperature), mid(PropertyKind::RelativeHumidity), mid(PropertyKind::WindSpeed));
        assert_eq!(b.class.ordinal(), want, "{}", b.name);
    }
}

#[test]
fn worked_scores_classify_as_documented() {
    assert_eq!(FwiClass::from_ordinal(reference_class(40.0, 15.0, 30.0 / 3.6)).unwrap().label(), "very high-");
    assert_eq!(FwiClass::from_ordinal(reference_class(20.0, 60.0, 10.0 / 3.6)).unwrap().label(), "low-");
}

#[test]
fn generated_rules_round_trip_individually_and_as_a_document() {
    let set = generate_rule_table(&small_spec()).unwrap();
    for r in set.iter() {
        assert_eq!(&parse_rule(&serialize_rule(r)).unwrap(), r);
    }
    assert_eq!(parse_rules(&set.to_text()).unwrap(), set.rules());
    let dir = tempfile::tempdir().unwrap();
    set.write_dir(dir.path()).unwrap();
    let back = RuleSet::read_path(dir.path()).unwrap();
    assert_eq!(back.rules(), set.rules());
    assert_eq!(back.metadata(), set.metadata());
    let filters_on = |k| set.rules()[0].filter().vars().any(|v| v == value_var(k));
    assert!(PropertyKind::ALL.into_iter().all(filters_on));
}

/// Re-spaces a rule: the name comment keeps its own line, every other run of
/// whitespace becomes a random mix of spaces, tabs and newlines, and
/// keywords change case.
fn perturb(text: &str, rng: &mut ChaCha8Rng) -> String {
    let (head, body) = text.split_once('\n').unwrap();
    let mut out = format!("{head}\n");
    for tok in body.split_whitespace() {
        let tok = match tok {
            "CONSTRUCT" | "WHERE" | "PREFIX" if rng.random_bool(0.5) => tok.to_lowercase(),
            _ => tok.to_string(),
        };
        let tok = if tok.starts_with("FILTER(") && rng.random_bool(0.5) { tok.replacen("FILTER(", "filter (", 1) } else { tok };
        out.push_str(&tok);
        for _ in 0..rng.random_range(1..4) {
            out.push([' ', '\t', '\n'][rng.random_range(0..3)]);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn whitespace_and_keyword_case_do_not_change_the_rule(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = match which {
            0 => HIGH_RULE.to_string(),
            1 => HIGH_RULE_LISTING.to_string(),
            _ => serialize_rule(&generate_rule_table(&small_spec()).unwrap().rules()[(seed % 180) as usize]),
        };
        let rule = parse_rule(&text).unwrap();
        let canonical = serialize_rule(&rule);
        let perturbed = perturb(&canonical, &mut rng);
        prop_assert_eq!(parse_rule(&perturbed).unwrap(), rule);
    }
}
