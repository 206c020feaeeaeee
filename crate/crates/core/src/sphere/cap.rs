use std::f64::consts::PI;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use super::{GeodesicArc, SphereError, SphericalPolygon, UnitVec, Vec3};

/// Spherical cap `{v : center·v > cos(radius)}` with `radius ∈ (0, π)`.
///
/// Membership predicates take a flag for the closure, since both the open
/// cap and its closure show up as query sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CapRepr", into = "CapRepr")]
pub struct Cap {
    center: UnitVec,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct CapRepr {
    center: UnitVec,
    radius: f64,
}

impl TryFrom<CapRepr> for Cap {
    type Error = SphereError;
    fn try_from(r: CapRepr) -> Result<Self, SphereError> {
        Cap::new(r.center, r.radius)
    }
}

impl From<Cap> for CapRepr {
    fn from(c: Cap) -> Self {
        CapRepr { center: c.center, radius: c.radius }
    }
}

impl Cap {
    pub fn new(center: UnitVec, radius: f64) -> Result<Self, SphereError> {
        if !(radius > 0.0 && radius < PI) {
            return Err(SphereError::InvalidRadius(radius));
        }
        Ok(Cap { center, radius })
    }

    pub fn center(&self) -> UnitVec {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        2.0 * PI * (1.0 - self.radius.cos())
    }

    pub fn contains(&self, p: UnitVec, tol: f64) -> bool {
        self.center.distance(p) <= self.radius + tol
    }

    pub fn contains_open(&self, p: UnitVec) -> bool {
        self.center.distance(p) < self.radius
    }

    pub fn meets_polygon(&self, p: &SphericalPolygon, tol: f64) -> bool {
        p.distance_to(self.center) <= self.radius + tol
    }

    pub fn meets_arc(&self, a: &GeodesicArc, tol: f64) -> bool {
        a.distance_to(self.center) <= self.radius + tol
    }

    pub fn meets_cap(&self, other: &Cap, tol: f64) -> bool {
        self.center.distance(other.center) <= self.radius + other.radius + tol
    }

    /// Orthonormal frame `(e1, e2)` with `e1 × e2 = center`.
    pub(crate) fn frame(&self) -> (Vec3, Vec3) {
        let c = self.center.vec();
        let e1 = c.any_orthonormal();
        (e1, c.cross(e1))
    }

    /// Point on the boundary circle at azimuth `phi`.
    pub fn boundary_point(&self, phi: f64) -> UnitVec {
        let (e1, e2) = self.frame();
        let (s, c) = self.radius.sin_cos();
        let v = self.center.vec() * c + (e1 * phi.cos() + e2 * phi.sin()) * s;
        UnitVec::from_vec3(v).expect("boundary point is nonzero")
    }

    /// Inscribed polygon whose boundary stays within `res` of the circle.
    /// Requires `radius < π/2`.
    pub fn inscribed_polygon(&self, res: f64) -> Result<SphericalPolygon, SphereError> {
        if self.radius >= PI / 2.0 {
            return Err(SphereError::NotInHemisphere);
        }
        // Sagitta of a chord spanning azimuth 2π/k is about r(1 - cos(π/k)).
        let mut k = 8usize;
        while self.radius * (1.0 - (PI / k as f64).cos()) > res {
            k *= 2;
        }
        let verts = (0..k).map(|i| self.boundary_point(2.0 * PI * i as f64 / k as f64)).collect();
        SphericalPolygon::new(verts)
    }

    /// Uniform sample from the cap.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitVec {
        let (e1, e2) = self.frame();
        let z = 1.0 - rng.random::<f64>() * (1.0 - self.radius.cos());
        let phi = rng.random::<f64>() * 2.0 * PI;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let v = self.center.vec() * z + (e1 * phi.cos() + e2 * phi.sin()) * s;
        UnitVec::from_vec3(v).expect("sample is nonzero")
    }
}

/// Uniform sample from the whole sphere.
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R) -> UnitVec {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = rng.random::<f64>() * 2.0 * PI;
    let s = (1.0 - z * z).max(0.0).sqrt();
    UnitVec::new_unchecked(Vec3::new(s * phi.cos(), s * phi.sin(), z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radius_bounds() {
        assert!(Cap::new(UnitVec::E3, 0.0).is_err());
        assert!(Cap::new(UnitVec::E3, PI).is_err());
        assert!(Cap::new(UnitVec::E3, 1.0).is_ok());
    }

    #[test]
    fn inscribed_polygon_approximates_area() {
        let cap = Cap::new(UnitVec::E3, 0.3).unwrap();
        let p = cap.inscribed_polygon(1e-6).unwrap();
        assert!(p.area() < cap.area());
        assert_abs_diff_eq!(p.area(), cap.area(), epsilon = 1e-5);
    }

    #[test]
    fn samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cap = Cap::new(UnitVec::new(1.0, 2.0, 3.0).unwrap(), 0.2).unwrap();
        for _ in 0..1000 {
            assert!(cap.contains(cap.sample(&mut rng), 1e-12));
        }
    }
}
