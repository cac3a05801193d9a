//! Observation CSV parsing, node registry, outlier cleaning and the seeded
//! synthetic stream generator.

mod clean;
mod nodes;
mod observation;
mod synth;

pub use clean::{
    clean_stream, CleanConfig, CleanError, OutlierEntry, OutlierPolicy, OutlierReason,
    OutlierReport,
};
pub use nodes::{NodeRegistry, NodeRegistryError};
pub use observation::{
    format_observation_line, parse_observation_line, parse_observations, write_observations,
    Observation, ParseError, ParseErrorKind,
};
pub use synth::{generate_synthetic_stream, SynthError, SyntheticRecord, SyntheticWeather};
