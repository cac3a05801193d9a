mod support;

use std::sync::Arc;

use chrono::Duration;
use firewx_core::ingest::Observation;
use firewx_core::store::{
    vocab, CatalogProperty, FileBackend, MemoryBackend, RepositoryId, RepositorySet, StoreError, StoreLayout,
};
use firewx_core::{PropertyKind, TimeRange};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{sensor_for, ts};

fn random_batch(rng: &mut ChaCha8Rng, kind: PropertyKind) -> Vec<Observation> {
    let base = ts("2012-01-01T00:00:00Z") + Duration::minutes(10 * rng.random_range(0..5000));
    let n = rng.random_range(1..30);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..n {
        let node = format!("SN_{}", rng.random_range(1..6));
        let t = base + Duration::minutes(10 * rng.random_range(0..200));
        if seen.insert((node.clone(), t)) {
            out.push(Observation::new(t, kind, sensor_for(kind, &node), node, (rng.random_range(0..500) as f64) / 10.0));
        }
    }
    out
}

fn fill(repos: &RepositorySet, seed: u64, batches: usize) -> Vec<(PropertyKind, Vec<Observation>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stored = Vec::new();
    for _ in 0..batches {
        let kind = PropertyKind::ALL[rng.random_range(0..3)];
        let batch = random_batch(&mut rng, kind);
        repos.store_graph(&batch, kind).unwrap();
        stored.push((kind, batch));
    }
    stored
}

#[test]
fn catalog_extrema_and_partition_purity() {
    for layout in [StoreLayout::Partitioned, StoreLayout::Single] {
        let repos = RepositorySet::in_memory(layout);
        let stored = fill(&repos, 7, 60);
        let catalog = repos.catalog();
        assert_eq!(catalog.len(), stored.len());
        for (entry, (kind, batch)) in catalog.iter().zip(&stored) {
            let lo = batch.iter().map(|o| o.time).min().unwrap();
            let hi = batch.iter().map(|o| o.time).max().unwrap();
            assert_eq!((entry.min_time, entry.max_time), (lo, hi));
            assert_eq!(entry.property, CatalogProperty::Observation(*kind));
            let expected_repo = match layout {
                StoreLayout::Partitioned => RepositoryId::for_property(*kind),
                StoreLayout::Single => RepositoryId::Weather,
            };
            assert_eq!(entry.repository_id, expected_repo);
            // Every observation in the graph carries the entry's property.
            let g = repos.graph(&entry.context).unwrap();
            let prop = vocab::observed_property();
            for t in g.triples().iter().filter(|t| t.predicate == prop) {
                assert_eq!(t.object.as_iri(), Some(&vocab::property_iri(*kind)));
            }
            // Five triples per observation plus one platform triple per sensor.
            let sensors: std::collections::BTreeSet<_> = batch.iter().map(|o| &o.sensor_id).collect();
            assert_eq!(g.len(), 5 * batch.len() + sensors.len());
        }
    }
}

#[test]
fn lookup_matches_a_linear_scan() {
    let repos = RepositorySet::in_memory(StoreLayout::Partitioned);
    let stored = fill(&repos, 11, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let start = ts("2012-01-01T00:00:00Z") + Duration::minutes(10 * rng.random_range(0..5500));
        let range = TimeRange::new(start, start + Duration::minutes(10 * rng.random_range(1..400))).unwrap();
        for kind in PropertyKind::ALL {
            let got: Vec<_> = repos
                .catalog_lookup(CatalogProperty::Observation(kind), &range)
                .into_iter()
                .map(|e| e.context)
                .collect();
            let want: Vec<_> = repos
                .catalog()
                .into_iter()
                .zip(&stored)
                .filter(|(_, (k, b))| {
                    *k == kind && b.iter().map(|o| o.time).min().unwrap() < range.end()
                        && b.iter().map(|o| o.time).max().unwrap() >= range.start()
                })
                .map(|(e, _)| e.context)
                .collect();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn file_store_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (catalog, counts) = {
        let repos = RepositorySet::open_dir(dir.path(), StoreLayout::Partitioned).unwrap();
        fill(&repos, 3, 25);
        let r = TimeRange::new(ts("2012-01-01T00:00:00Z"), ts("2012-01-02T00:00:00Z")).unwrap();
        repos.set_coverage(vec![r]).unwrap();
        let counts: Vec<usize> = StoreLayout::Partitioned.repositories().iter().map(|&r| repos.triple_count(r)).collect();
        (repos.catalog(), counts)
    };
    assert_eq!(FileBackend::new(dir.path()).unwrap().stored_layout().unwrap(), Some(StoreLayout::Partitioned));
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(FileBackend::new(empty.path()).unwrap().stored_layout().unwrap(), None);
    let again = RepositorySet::open_dir(dir.path(), StoreLayout::Partitioned).unwrap();
    assert_eq!(again.catalog(), catalog);
    let counts2: Vec<usize> = StoreLayout::Partitioned.repositories().iter().map(|&r| again.triple_count(r)).collect();
    assert_eq!(counts2, counts);
    assert_eq!(again.coverage().len(), 1);
    for e in &catalog {
        assert!(again.graph(&e.context).is_some());
    }
    // New contexts never collide with reloaded ones.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ctx = again.store_graph(&random_batch(&mut rng, PropertyKind::WindSpeed), PropertyKind::WindSpeed).unwrap();
    assert!(catalog.iter().all(|e| e.context != ctx));
    assert!(matches!(
        RepositorySet::open_dir(dir.path(), StoreLayout::Single),
        Err(StoreError::LayoutMismatch { .. })
    ));
}

#[test]
fn failed_persist_leaves_catalog_untouched() {
    let backend = Arc::new(MemoryBackend::new());
    let repos = RepositorySet::open(backend.clone(), StoreLayout::Partitioned).unwrap();
    fill(&repos, 21, 5);
    let before = repos.catalog();
    let triples_before = repos.weather_triple_count();
    backend.set_fail_writes(true);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let batch = random_batch(&mut rng, PropertyKind::AirTemperature);
    assert!(matches!(repos.store_graph(&batch, PropertyKind::AirTemperature), Err(StoreError::Persist(_))));
    assert!(repos.set_coverage(vec![]).is_err());
    assert_eq!(repos.catalog(), before);
    assert_eq!(repos.weather_triple_count(), triples_before);
    backend.set_fail_writes(false);
    // The same data is stored normally once writes succeed again, and a
    // reopen over the same backend sees exactly the committed graphs.
    repos.store_graph(&batch, PropertyKind::AirTemperature).unwrap();
    let reopened = RepositorySet::open(backend, StoreLayout::Partitioned).unwrap();
    assert_eq!(reopened.catalog(), repos.catalog());
}

#[test]
fn mixed_or_mismatched_batches_are_rejected() {
    let repos = RepositorySet::in_memory(StoreLayout::Partitioned);
    let t = ts("2012-01-02T00:00:00Z");
    let at = Observation::new(t, PropertyKind::AirTemperature, "AT_SN_1", "SN_1", 20.0);
    let rh = Observation::new(t, PropertyKind::RelativeHumidity, "RH_SN_1", "SN_1", 50.0);
    assert!(repos.store_graph(&[at.clone(), rh], PropertyKind::AirTemperature).is_err());
    assert!(matches!(
        repos.store_graph(&[at], PropertyKind::WindSpeed),
        Err(StoreError::PropertyMismatch { .. })
    ));
    assert!(matches!(repos.store_graph(&[], PropertyKind::WindSpeed), Err(StoreError::EmptyBatch)));
    assert!(repos.catalog().is_empty());
}
