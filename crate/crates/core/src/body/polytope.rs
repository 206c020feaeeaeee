use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::hull::{convex_hull, HullError};
use super::BodyError;
use crate::sphere::{SphericalPolygon, UnitVec, Vec3, EPS_GEOM};

/// Facet plane `x·normal = offset` and its vertex ring, counterclockwise
/// seen from outside.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: UnitVec,
    pub offset: f64,
    pub ring: Vec<usize>,
}

/// Edge between vertices `a < b`, shared by two facets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub facets: [usize; 2],
}

/// Origin-centred inradius and circumradius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiPair {
    pub r: f64,
    pub big_r: f64,
}

/// The face of a polytope in a given normal direction.
#[derive(Clone, Debug, PartialEq)]
pub enum FaceRegion {
    Facet { index: usize, vertices: Vec<Vec3> },
    Edge { a: Vec3, b: Vec3 },
    Vertex(Vec3),
}

/// Convex polytope in R³ with the origin strictly inside.
#[derive(Clone, Debug)]
pub struct Polytope {
    vertices: Vec<Vec3>,
    dirs: Vec<UnitVec>,
    facets: Vec<Facet>,
    edges: Vec<Edge>,
    /// Incident facets of each vertex, in cyclic order.
    vertex_facets: Vec<Vec<usize>>,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    vertices: Vec<Vec3>,
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolytopeRepr { vertices: self.vertices.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolytopeRepr::deserialize(d)?;
        Polytope::from_points(&r.vertices).map_err(serde::de::Error::custom)
    }
}

fn newell(vertices: &[Vec3], ring: &[usize]) -> Vec3 {
    let k = ring.len();
    let mut n = Vec3::ZERO;
    for i in 0..k {
        let p = vertices[ring[i]];
        let q = vertices[ring[(i + 1) % k]];
        n += Vec3::new((p.y - q.y) * (p.z + q.z), (p.z - q.z) * (p.x + q.x), (p.x - q.x) * (p.y + q.y));
    }
    n
}

impl Polytope {
    /// Convex hull of `points`, validated.
    pub fn from_points(points: &[Vec3]) -> Result<Self, BodyError> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(BodyError::NonFinite);
        }
        let pts: Vec<[f64; 3]> = points.iter().map(|p| p.to_array()).collect();
        let hull = convex_hull(&pts).map_err(|e| match e {
            HullError::TooFewPoints => BodyError::TooFewPoints,
            HullError::Flat => BodyError::NotFullDimensional,
        })?;
        let vertices: Vec<Vec3> = hull.vertices.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
        let planes = hull
            .facets
            .iter()
            .map(|ring| {
                let n = newell(&vertices, ring).try_normalize(0.0).ok_or(BodyError::NotFullDimensional)?;
                let h = ring.iter().map(|&i| n.dot(vertices[i])).sum::<f64>() / ring.len() as f64;
                Ok((n, h))
            })
            .collect::<Result<Vec<_>, BodyError>>()?;
        Self::assemble(vertices, hull.facets, planes)
    }

    /// Builds a polytope from known combinatorics and planes.
    pub(crate) fn assemble(
        vertices: Vec<Vec3>,
        rings: Vec<Vec<usize>>,
        planes: Vec<(Vec3, f64)>,
    ) -> Result<Self, BodyError> {
        let scale = vertices.iter().map(|v| v.max_abs()).fold(0.0, f64::max);
        let tol = EPS_GEOM * scale.max(1.0);
        let mut facets = Vec::with_capacity(rings.len());
        for (ring, (n, h)) in rings.into_iter().zip(planes) {
            if h <= EPS_GEOM {
                return Err(BodyError::OriginNotInterior);
            }
            let normal = UnitVec::from_vec3(n).map_err(|_| BodyError::NotFullDimensional)?;
            facets.push(Facet { normal, offset: h, ring });
        }
        let mut vertex_facets: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in facets.iter().enumerate() {
            let k = f.ring.len();
            for i in 0..k {
                let (a, b) = (f.ring[i], f.ring[(i + 1) % k]);
                vertex_facets[a].push(fi);
                directed.insert((a, b), fi);
            }
        }
        let mut edges = Vec::new();
        for (&(a, b), &f) in &directed {
            if a < b {
                let g = *directed.get(&(b, a)).ok_or(BodyError::Inconsistent("unpaired edge"))?;
                edges.push(Edge { a, b, facets: [f, g] });
            }
        }
        edges.sort_by_key(|e| (e.a, e.b));

        for (vi, v) in vertices.iter().enumerate() {
            for (fi, f) in facets.iter().enumerate() {
                let s = f.normal.vec().dot(*v) - f.offset;
                let incident = vertex_facets[vi].contains(&fi);
                if s > tol || (incident && s < -tol) {
                    return Err(BodyError::Inconsistent("vertex off its facet planes"));
                }
            }
        }
        let dirs = vertices
            .iter()
            .map(|v| UnitVec::from_vec3(*v).map_err(|_| BodyError::OriginNotInterior))
            .collect::<Result<Vec<_>, _>>()?;
        for (vi, fs) in vertex_facets.iter_mut().enumerate() {
            if fs.len() < 3 {
                return Err(BodyError::Inconsistent("vertex with fewer than three facets"));
            }
            sort_around(fs, &facets, dirs[vi]);
        }
        Ok(Polytope { vertices, dirs, facets, edges, vertex_facets, scale })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Unit directions of the vertices.
    pub fn vertex_dirs(&self) -> &[UnitVec] {
        &self.dirs
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Incident facets of vertex `i`, in cyclic order.
    pub fn vertex_facets(&self, i: usize) -> &[usize] {
        &self.vertex_facets[i]
    }

    /// Largest absolute coordinate.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Normal cone of vertex `i` as a spherical polygon of facet normals.
    pub fn vertex_cone(&self, i: usize) -> SphericalPolygon {
        let vs = self.vertex_facets[i].iter().map(|&f| self.facets[f].normal).collect();
        SphericalPolygon::new(vs).expect("normal cone of a vertex is a convex polygon")
    }

    /// `max_{v} x·v`.
    pub fn support(&self, x: Vec3) -> f64 {
        self.vertices.iter().map(|v| v.dot(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max{a : a u ∈ K}`.
    pub fn radial(&self, u: UnitVec) -> f64 {
        self.radial_with_facet(u).0
    }

    /// Radial function and the facet whose plane the ray exits through.
    pub fn radial_with_facet(&self, u: UnitVec) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (i, f) in self.facets.iter().enumerate() {
            let c = u.vec().dot(f.normal.vec());
            if c > 0.0 {
                let r = f.offset / c;
                if r < best.0 {
                    best = (r, i);
                }
            }
        }
        best
    }

    /// Polar body, through the hull of the points `n/h`.
    pub fn polar(&self) -> Result<Polytope, BodyError> {
        let pts: Vec<Vec3> = self.facets.iter().map(|f| f.normal.vec() / f.offset).collect();
        Polytope::from_points(&pts)
    }

    pub fn radii(&self) -> RadiiPair {
        let r = self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
        let big_r = self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        RadiiPair { r, big_r }
    }

    /// `F(K, v) = H_K(v) ∩ K`.
    pub fn facet_region(&self, v: UnitVec) -> FaceRegion {
        let h = self.support(v.vec());
        let tol = EPS_GEOM * self.scale.max(1.0);
        let hit: Vec<usize> = (0..self.vertices.len()).filter(|&i| self.vertices[i].dot(v.vec()) >= h - tol).collect();
        match hit.len() {
            1 => FaceRegion::Vertex(self.vertices[hit[0]]),
            2 => FaceRegion::Edge { a: self.vertices[hit[0]], b: self.vertices[hit[1]] },
            _ => {
                let index = (0..self.facets.len())
                    .max_by(|&i, &j| {
                        let a = self.facets[i].normal.dot(v);
                        let b = self.facets[j].normal.dot(v);
                        a.total_cmp(&b)
                    })
                    .expect("a polytope has facets");
                let vertices = self.facets[index].ring.iter().map(|&i| self.vertices[i]).collect();
                FaceRegion::Facet { index, vertices }
            }
        }
    }

    /// `cK` for `c > 0`, keeping the combinatorics.
    pub fn scaled(&self, c: f64) -> Polytope {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = *v * c;
        }
        for f in &mut out.facets {
            f.offset *= c;
        }
        out.scale *= c;
        out
    }

    /// Hausdorff distance between the vertex sets.
    pub fn vertex_set_distance(&self, other: &Polytope) -> f64 {
        let directed = |a: &[Vec3], b: &[Vec3]| {
            a.iter().map(|p| b.iter().map(|q| (*p - *q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
        };
        directed(&self.vertices, &other.vertices).max(directed(&other.vertices, &self.vertices))
    }
}

fn sort_around(fs: &mut [usize], facets: &[Facet], fallback: UnitVec) {
    let sum = fs.iter().fold(Vec3::ZERO, |s, &f| s + facets[f].normal.vec());
    let w = sum.try_normalize(1e-12).unwrap_or(fallback.vec());
    let e1 = w.any_orthonormal();
    let e2 = w.cross(e1);
    let angle = |f: usize| {
        let n = facets[f].normal.vec();
        n.dot(e2).atan2(n.dot(e1))
    };
    fs.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
}

/// `(1−t)A + tB`: hull of `(1−t)a + tb` over vertex pairs whose normal
/// cones meet (the only pairs that can give vertices of the sum).
pub fn convex_combination(a: &Polytope, b: &Polytope, t: f64) -> Result<Polytope, BodyError> {
    let cones_a: Vec<SphericalPolygon> = (0..a.vertices.len()).map(|i| a.vertex_cone(i)).collect();
    let cones_b: Vec<SphericalPolygon> = (0..b.vertices.len()).map(|i| b.vertex_cone(i)).collect();
    let mut pts = Vec::new();
    for (i, ca) in cones_a.iter().enumerate() {
        for (j, cb) in cones_b.iter().enumerate() {
            if ca.intersects(cb, 1e-7) {
                pts.push(a.vertices[i] * (1.0 - t) + b.vertices[j] * t);
            }
        }
    }
    Polytope::from_points(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::generate::{cross_polytope, cube, frustum};
    use approx::assert_abs_diff_eq;

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(cube(1.0).support(Vec3::new(1.0, 2.0, 3.0)), 6.0);
        assert_eq!(cube(1.0).support(Vec3::Z), 1.0);
        assert_eq!(frustum().support(-Vec3::Z), 2.0);
    }

    #[test]
    fn radial_examples() {
        let c = cube(1.0);
        assert_abs_diff_eq!(c.radial(UnitVec::E3), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.radial(u(1.0, 1.0, 1.0)), 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.radial(u(1.0, 1.0, 0.0)), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn polar_examples() {
        let c = cube(1.0);
        let x = cross_polytope(1.0);
        assert!(c.polar().unwrap().vertex_set_distance(&x) < 1e-14);
        assert!(x.polar().unwrap().vertex_set_distance(&c) < 1e-14);
        assert!(cube(2.0).polar().unwrap().vertex_set_distance(&cross_polytope(0.5)) < 1e-14);
    }

    #[test]
    fn radii_examples() {
        let r = cube(1.0).radii();
        assert_abs_diff_eq!(r.r, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.big_r, 3f64.sqrt(), epsilon = 1e-15);
        let r = cross_polytope(2.0).radii();
        assert_abs_diff_eq!(r.r, 2.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.big_r, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn facet_region_examples() {
        let c = cube(1.0);
        match c.facet_region(UnitVec::E3) {
            FaceRegion::Facet { vertices, .. } => {
                assert_eq!(vertices.len(), 4);
                assert!(vertices.iter().all(|v| v.z == 1.0));
            }
            other => panic!("expected a facet, got {other:?}"),
        }
        assert_eq!(c.facet_region(u(1.0, 1.0, 1.0)), FaceRegion::Vertex(Vec3::new(1.0, 1.0, 1.0)));
        match c.facet_region(u(1.0, 1.0, 0.0)) {
            FaceRegion::Edge { a, b } => {
                assert!(a.x == 1.0 && a.y == 1.0 && b.x == 1.0 && b.y == 1.0);
                assert_eq!(a.z.abs(), 1.0);
                assert_eq!(a.z, -b.z);
            }
            other => panic!("expected an edge, got {other:?}"),
        }
    }

    #[test]
    fn convex_combination_examples() {
        let c = cube(1.0);
        assert!(convex_combination(&c, &c, 0.3).unwrap().vertex_set_distance(&c) < 1e-14);
        let m = convex_combination(&c, &cube(3.0), 0.5).unwrap();
        assert!(m.vertex_set_distance(&cube(2.0)) < 1e-14);
        let x = cross_polytope(1.0);
        let m = convex_combination(&c, &x, 0.5).unwrap();
        assert_abs_diff_eq!(m.support(Vec3::X), 1.0, epsilon = 1e-14);
        let d = u(1.0, 1.0, 1.0);
        let expect = (3f64.sqrt() + 1.0 / 3f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(m.support(d.vec()), expect, epsilon = 1e-14);
    }

    #[test]
    fn origin_outside_rejected() {
        let pts: Vec<Vec3> = cube(1.0).vertices().iter().map(|v| *v + Vec3::new(3.0, 0.0, 0.0)).collect();
        assert_eq!(Polytope::from_points(&pts).unwrap_err(), BodyError::OriginNotInterior);
    }

    #[test]
    fn vertex_cones_tile_sphere() {
        let f = frustum();
        let total: f64 = (0..f.vertices().len()).map(|i| f.vertex_cone(i).area()).sum();
        assert_abs_diff_eq!(total, 4.0 * std::f64::consts::PI, epsilon = 1e-12);
    }
}
