use super::DomainError;
use crate::Scalar;

/// Metres per second to kilometres per hour.
pub fn mps_to_kmh<T: Scalar>(v: T) -> Result<T, DomainError> {
    if !v.is_finite() {
        return Err(DomainError::NonFinite { what: "speed" });
    }
    if v < T::zero() {
        return Err(DomainError::NegativeSpeed(v.to_f64_lossy()));
    }
    Ok(v * T::lit(3.6))
}
