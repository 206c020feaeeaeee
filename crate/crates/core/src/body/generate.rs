//! Canonical instances and seeded random polytopes.

use rand::RngExt;

use super::{BodyError, Polytope};
use crate::rng::{substream, Rotation};
use crate::sphere::{sample_sphere, Vec3};

/// `[−s, s]³`.
pub fn cube(s: f64) -> Polytope {
    let mut pts = Vec::with_capacity(8);
    for x in [-s, s] {
        for y in [-s, s] {
            for z in [-s, s] {
                pts.push(Vec3::new(x, y, z));
            }
        }
    }
    Polytope::from_points(&pts).expect("cube is a valid body")
}

/// `conv{±c eᵢ}`.
pub fn cross_polytope(c: f64) -> Polytope {
    let pts = [Vec3::X, -Vec3::X, Vec3::Y, -Vec3::Y, Vec3::Z, -Vec3::Z].map(|v| v * c);
    Polytope::from_points(&pts).expect("cross-polytope is a valid body")
}

/// `conv{(±1,±1,1), (±2,±2,−2)}`.
pub fn frustum() -> Polytope {
    let mut pts = Vec::with_capacity(8);
    for (s, z) in [(1.0, 1.0), (2.0, -2.0)] {
        for x in [-s, s] {
            for y in [-s, s] {
                pts.push(Vec3::new(x, y, z));
            }
        }
    }
    Polytope::from_points(&pts).expect("frustum is a valid body")
}

/// Geodesic icosphere of the given subdivision level, inscribed in the
/// unit sphere.
pub fn icosphere(level: u32) -> Polytope {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<Vec3> = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-g, g] {
            pts.push(Vec3::new(0.0, a, b));
            pts.push(Vec3::new(a, b, 0.0));
            pts.push(Vec3::new(b, 0.0, a));
        }
    }
    let mut ico = Polytope::from_points(&pts).expect("icosahedron is a valid body");
    let mut verts: Vec<Vec3> = ico.vertices().iter().map(|v| *v / v.norm()).collect();
    for _ in 0..level {
        let mut next = verts.clone();
        for e in ico.edges() {
            let m = verts[e.a] + verts[e.b];
            next.push(m / m.norm());
        }
        verts = next;
        ico = Polytope::from_points(&verts).expect("icosphere is a valid body");
        verts = ico.vertices().to_vec();
    }
    ico
}

/// Hull of `m` points on a random ellipsoid shell (axes in `[0.5, 2]`,
/// random orientation), translated so that the point centroid is the
/// origin. Draws are repeated until the origin is interior.
pub fn random_polytope(m: usize, seed: u64) -> Result<Polytope, BodyError> {
    if m < 4 {
        return Err(BodyError::TooFewPoints);
    }
    for attempt in 0..100 {
        let mut rng = substream(seed, "random-polytope", attempt);
        let axes = Vec3::new(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let rot = Rotation::random(&mut rng);
        let pts: Vec<Vec3> = (0..m)
            .map(|_| {
                let d = sample_sphere(&mut rng).vec();
                rot.apply(Vec3::new(d.x * axes.x, d.y * axes.y, d.z * axes.z))
            })
            .collect();
        let c = pts.iter().fold(Vec3::ZERO, |s, p| s + *p) / m as f64;
        let pts: Vec<Vec3> = pts.iter().map(|p| *p - c).collect();
        if let Ok(p) = Polytope::from_points(&pts) {
            if p.radii().r > 1e-3 {
                return Ok(p);
            }
        }
    }
    Err(BodyError::GenerationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn canonical_vertex_counts() {
        assert_eq!(cube(1.0).vertices().len(), 8);
        assert_eq!(cross_polytope(1.0).vertices().len(), 6);
        assert_eq!(frustum().vertices().len(), 8);
        assert_eq!(frustum().facets().len(), 6);
    }

    #[test]
    fn icosphere_is_ball_like() {
        let b = icosphere(2);
        let r = b.radii();
        assert_abs_diff_eq!(r.big_r, 1.0, epsilon = 1e-12);
        assert!(r.r > 0.98, "inradius {}", r.r);
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_polytope(30, 1).unwrap();
        let b = random_polytope(30, 1).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_ne!(a.vertices(), random_polytope(30, 2).unwrap().vertices());
    }
}
