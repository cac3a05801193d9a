use crate::domain::GeoPoint;
use crate::Scalar;

/// Earth radius used by default, in kilometres.
pub const DEFAULT_EARTH_RADIUS_KM: f64 = 6373.8;

/// Spherical-law-of-cosines distance between two points on a sphere of
/// radius `radius_km`.
///
/// The `acos` argument is clamped to `[-1, 1]`; rounding can push it just past
/// 1 for nearly coincident points. Identical points are exactly zero apart;
/// the formula alone can leave a residue of about 1e-4 km there.
pub fn great_circle_km<T: Scalar>(a: GeoPoint<T>, b: GeoPoint<T>, radius_km: T) -> T {
    if a == b {
        return T::zero();
    }
    let (lat_a, lat_b) = (a.lat_deg.to_radians(), b.lat_deg.to_radians());
    let dlon = (a.lon_deg - b.lon_deg).to_radians();
    let cos_angle = lat_a.sin() * lat_b.sin() + lat_a.cos() * lat_b.cos() * dlon.cos();
    let cos_angle = cos_angle.max(-T::one()).min(T::one());
    radius_km * cos_angle.acos()
}
