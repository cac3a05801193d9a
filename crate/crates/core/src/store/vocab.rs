//! Namespace bases and the fixed IRIs used for observations and events.

use crate::domain::{FwiClass, PropertyKind, Timestamp};

use super::term::Iri;

pub const SSN: &str = "http://purl.oclc.org/NET/ssnx/ssn#";
pub const CF: &str = "http://purl.oclc.org/NET/ssnx/cf/cf-property#";
pub const DUL: &str = "http://www.loa-cnr.it/ontologies/DUL.owl#";
pub const UNIT: &str = "http://purl.oclc.org/NET/ssnx/qu/unit#";
pub const PROV: &str = "http://www.w3.org/ns/prov#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const FWI: &str = "http://firewx.example.org/ontology/fwi#";
/// Base for instance data: nodes, sensors, observations, events, rules.
pub const DATA: &str = "http://firewx.example.org/data/";

/// Prefixes understood without a `PREFIX` declaration.
pub const STANDARD_PREFIXES: [(&str, &str); 8] = [
    ("ssn", SSN),
    ("cf", CF),
    ("dul", DUL),
    ("unit", UNIT),
    ("prov", PROV),
    ("rdf", RDF),
    ("xsd", XSD),
    ("fwi", FWI),
];

pub fn standard_prefix(prefix: &str) -> Option<&'static str> {
    STANDARD_PREFIXES.iter().find(|(p, _)| *p == prefix).map(|(_, ns)| *ns)
}

fn iri(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRIs are valid")
}

pub fn observed_property() -> Iri {
    iri(SSN, "ObservedProperty")
}
pub fn sampling_time() -> Iri {
    iri(SSN, "ObservationSamplingTime")
}
pub fn unit_of_measure() -> Iri {
    iri(DUL, "unitOfMeasure")
}
pub fn observed_by() -> Iri {
    iri(SSN, "ObservedBy")
}
pub fn deployed_on_platform() -> Iri {
    iri(SSN, "deployedOnPlatform")
}
pub fn has_value() -> Iri {
    iri(SSN, "hasValue")
}
pub fn at_location() -> Iri {
    iri(PROV, "atLocation")
}
pub fn at_time() -> Iri {
    iri(PROV, "atTime")
}
pub fn was_generated_by() -> Iri {
    iri(PROV, "wasGeneratedBy")
}
pub fn generated_at_time() -> Iri {
    iri(PROV, "generatedAtTime")
}
pub fn rdf_type() -> Iri {
    iri(RDF, "type")
}

pub fn property_iri(kind: PropertyKind) -> Iri {
    iri(CF, kind.name())
}
pub fn unit_iri(kind: PropertyKind) -> Iri {
    iri(UNIT, kind.unit_local())
}
pub fn class_iri(class: FwiClass) -> Iri {
    iri(FWI, &class.iri_local())
}

/// Class named by an IRI in the class namespace, if any.
pub fn class_of(iri: &Iri) -> Option<FwiClass> {
    iri.as_str().strip_prefix(FWI).and_then(FwiClass::from_iri_local)
}

pub fn node_iri(node_id: &str) -> Iri {
    iri(DATA, &format!("node/{node_id}"))
}
pub fn node_id_of(iri: &Iri) -> Option<&str> {
    iri.as_str().strip_prefix(DATA).and_then(|r| r.strip_prefix("node/"))
}
pub fn sensor_iri(sensor_id: &str) -> Iri {
    iri(DATA, &format!("sensor/{sensor_id}"))
}
pub fn observation_iri(sensor_id: &str, time: Timestamp) -> Iri {
    iri(DATA, &format!("obs/{sensor_id}/{}", time.format("%Y%m%dT%H%M%SZ")))
}
pub fn rule_iri(rule_name: &str) -> Iri {
    iri(DATA, &format!("rule/{rule_name}"))
}
pub fn rule_name_of(iri: &Iri) -> Option<&str> {
    iri.as_str().strip_prefix(DATA).and_then(|r| r.strip_prefix("rule/"))
}
pub fn event_iri(digest_hex: &str) -> Iri {
    iri(DATA, &format!("event/{digest_hex}"))
}
