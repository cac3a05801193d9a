use serde::{Deserialize, Serialize};

use super::FfdiError;
use crate::domain::{class_from_score, mps_to_kmh, ClassBands, FwiClass};
use crate::Scalar;

pub const DEFAULT_DROUGHT_FACTOR: f64 = 5.0;

/// Weather inputs to the index. Wind is in km/h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfdiInput<T> {
    pub temperature: T,
    pub humidity: T,
    pub wind_kmh: T,
    pub drought_factor: T,
}

impl<T: Scalar> FfdiInput<T> {
    /// Inputs with the default drought factor.
    pub fn new(temperature: T, humidity: T, wind_kmh: T) -> Self {
        Self { temperature, humidity, wind_kmh, drought_factor: T::lit(DEFAULT_DROUGHT_FACTOR) }
    }

    pub fn with_drought_factor(mut self, df: T) -> Self {
        self.drought_factor = df;
        self
    }

    pub fn validate(&self) -> Result<(), FfdiError> {
        let bad = |what, v: T| Err(FfdiError::OutOfRange { what, value: v.to_f64_lossy() });
        let (t, h, v, df) = (self.temperature, self.humidity, self.wind_kmh, self.drought_factor);
        if !t.is_finite() {
            return bad("temperature", t);
        }
        if !(h >= T::zero() && h <= T::lit(100.0)) {
            return bad("humidity", h);
        }
        if !(v >= T::zero() && v.is_finite()) {
            return bad("wind", v);
        }
        if !(df > T::zero() && df <= T::lit(10.0)) {
            return bad("drought factor", df);
        }
        Ok(())
    }
}

/// `2 exp(-0.45 + 0.987 ln DF - 0.0345 H + 0.0338 T + 0.0234 V)`.
pub fn ffdi_score<T: Scalar>(input: &FfdiInput<T>) -> Result<T, FfdiError> {
    input.validate()?;
    let exponent = T::lit(-0.45) + T::lit(0.987) * input.drought_factor.ln() - T::lit(0.0345) * input.humidity
        + T::lit(0.0338) * input.temperature
        + T::lit(0.0234) * input.wind_kmh;
    Ok(T::lit(2.0) * exponent.exp())
}

/// Class of one weather reading, with wind in m/s as the sensors report it.
pub fn weather_class<T: Scalar>(
    temperature: T,
    humidity: T,
    wind_mps: T,
    drought_factor: T,
    bands: &ClassBands<T>,
) -> Result<FwiClass, FfdiError> {
    let input = FfdiInput::new(temperature, humidity, mps_to_kmh(wind_mps)?).with_drought_factor(drought_factor);
    Ok(class_from_score(ffdi_score(&input)?, bands)?)
}
