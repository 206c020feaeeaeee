//! Spherical geometry on S²: points, minor geodesic arcs, convex spherical
//! polygons, caps and stratified regions.
//!
//! All sign predicates use the tolerance [`EPS_GEOM`]; sets are treated as
//! closed (boundaries included) unless a type says otherwise.

mod arc;
pub mod area;
mod cap;
pub mod hausdorff;
mod polar;
mod polygon;
mod region;
mod vec3;

pub use arc::GeodesicArc;
pub use cap::{sample_sphere, Cap};
pub use hausdorff::hausdorff_distance;
pub use polar::{polar_of_points, polar_set};
pub use polygon::{spherical_hull, triangle_area, SphericalPolygon};
pub use region::{disjoint_pieces, SphericalRegion};
pub use vec3::{angle_between, UnitVec, Vec3};

use thiserror::Error;

/// Tolerance for unit-length checks and degenerate edges.
pub const EPS_NORM: f64 = 1e-12;
/// Tolerance used by every geometric sign predicate.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SphereError {
    #[error("zero or non-finite vector cannot be projected to the sphere")]
    ZeroVector,
    #[error("antipodal input: the geodesic between the points is not unique")]
    AntipodalInput,
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(&'static str),
    #[error("polygon is not contained in an open hemisphere")]
    NotInHemisphere,
    #[error("polygon is not spherically convex")]
    NotConvex,
    #[error("invalid cap radius {0}")]
    InvalidRadius(f64),
    #[error("empty region")]
    EmptyRegion,
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
}

/// Great-circle distance `arccos(u·v)`.
pub fn arc_distance(u: UnitVec, v: UnitVec) -> f64 {
    u.distance(v)
}

/// Radial projection of `(1-t)u + tv` back to the sphere.
pub fn geodesic_mean(u: UnitVec, v: UnitVec, t: f64) -> Result<UnitVec, SphereError> {
    project(u.vec() * (1.0 - t) + v.vec() * t)
}

/// Radial projection `P: R³ \ {0} → S²`.
pub fn project(x: Vec3) -> Result<UnitVec, SphereError> {
    x.try_normalize(1e-9).map(UnitVec::new_unchecked).ok_or(SphereError::AntipodalInput)
}

/// Girard area of a convex spherical polygon: angle sum minus `(k-2)π`.
pub fn polygon_area(p: &SphericalPolygon) -> f64 {
    p.area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    #[test]
    fn arc_distance_examples() {
        assert_eq!(arc_distance(UnitVec::E1, UnitVec::E1), 0.0);
        assert_abs_diff_eq!(arc_distance(UnitVec::E1, UnitVec::E2), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(arc_distance(UnitVec::E1, u(1.0, 1.0, 0.0)), FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(arc_distance(UnitVec::E1, -UnitVec::E1), PI, epsilon = 1e-15);
    }

    #[test]
    fn geodesic_mean_examples() {
        let m0 = geodesic_mean(UnitVec::E1, UnitVec::E2, 0.0).unwrap();
        assert_abs_diff_eq!(m0.distance(UnitVec::E1), 0.0, epsilon = 1e-15);
        let m1 = geodesic_mean(UnitVec::E1, UnitVec::E2, 1.0).unwrap();
        assert_abs_diff_eq!(m1.distance(UnitVec::E2), 0.0, epsilon = 1e-15);
        let half = geodesic_mean(UnitVec::E1, UnitVec::E2, 0.5).unwrap();
        assert_abs_diff_eq!(half.distance(u(1.0, 1.0, 0.0)), 0.0, epsilon = 1e-15);
        let q = geodesic_mean(UnitVec::E1, UnitVec::E2, 0.25).unwrap();
        let expect = Vec3::new(3.0, 1.0, 0.0) / 10f64.sqrt();
        assert_abs_diff_eq!((q.vec() - expect).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn geodesic_mean_rejects_antipodes() {
        assert_eq!(geodesic_mean(UnitVec::E1, -UnitVec::E1, 0.5), Err(SphereError::AntipodalInput));
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(UnitVec::new(0.0, 0.0, 0.0), Err(SphereError::ZeroVector));
    }
}
