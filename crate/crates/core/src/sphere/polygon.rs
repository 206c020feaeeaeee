use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::arc::crossing;
use super::{GeodesicArc, SphereError, UnitVec, Vec3, EPS_GEOM, EPS_NORM};

/// Slivers below this area are dropped by clipping and boolean operations.
pub(crate) const SLIVER_AREA: f64 = 1e-16;

/// Convex spherical polygon inside an open hemisphere, stored
/// counterclockwise as seen from outside the sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct SphericalPolygon {
    vertices: Vec<UnitVec>,
    /// Inward unit normal of each edge `vertices[i] → vertices[i+1]`.
    normals: Vec<Vec3>,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    vertices: Vec<UnitVec>,
}

impl TryFrom<PolygonRepr> for SphericalPolygon {
    type Error = SphereError;
    fn try_from(r: PolygonRepr) -> Result<Self, SphereError> {
        SphericalPolygon::new(r.vertices)
    }
}

impl From<SphericalPolygon> for PolygonRepr {
    fn from(p: SphericalPolygon) -> Self {
        PolygonRepr { vertices: p.vertices }
    }
}

impl SphericalPolygon {
    /// Validates and orients a vertex ring. Either orientation is accepted.
    pub fn new(mut vertices: Vec<UnitVec>) -> Result<Self, SphereError> {
        let k = vertices.len();
        if k < 3 {
            return Err(SphereError::DegeneratePolygon("fewer than three vertices"));
        }
        for i in 0..k {
            let (a, b) = (vertices[i], vertices[(i + 1) % k]);
            if a.distance(b) < EPS_NORM {
                return Err(SphereError::DegeneratePolygon("edge shorter than tolerance"));
            }
        }
        // The vertex centroid is the natural center, but a wide ring can
        // leave it behind; the ring's area normal catches those.
        let sum = vertices.iter().fold(Vec3::ZERO, |s, v| s + v.vec());
        let area = (0..k).fold(Vec3::ZERO, |s, i| s + vertices[i].vec().cross(vertices[(i + 1) % k].vec()));
        let w = [sum, area, -area]
            .into_iter()
            .filter_map(|c| c.try_normalize(1e-12))
            .find(|w| vertices.iter().all(|v| v.vec().dot(*w) > EPS_NORM))
            .ok_or(SphereError::NotInHemisphere)?;
        let turn: f64 = (0..k).map(|i| vertices[i].vec().cross(vertices[(i + 1) % k].vec()).dot(w)).sum();
        if turn < 0.0 {
            vertices.reverse();
        }
        let normals = edge_normals(&vertices).ok_or(SphereError::DegeneratePolygon("zero-length edge"))?;
        for n in &normals {
            if vertices.iter().any(|v| n.dot(v.vec()) < -EPS_GEOM) {
                return Err(SphereError::NotConvex);
            }
        }
        if turn.abs() < 1e-300 {
            return Err(SphereError::DegeneratePolygon("zero area"));
        }
        Ok(SphericalPolygon { vertices, normals })
    }

    /// Builds a polygon from a counterclockwise ring produced by clipping.
    /// Near-duplicate vertices are merged; slivers yield `None`.
    pub(crate) fn from_ring(ring: &[Vec3]) -> Option<Self> {
        let mut pts: Vec<Vec3> = Vec::with_capacity(ring.len());
        for &p in ring {
            if pts.last().is_none_or(|q: &Vec3| (p - *q).norm() > 1e-13) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= 1e-13 {
            pts.pop();
        }
        if pts.len() < 3 {
            return None;
        }
        let vertices: Vec<UnitVec> = pts.iter().map(|p| UnitVec::new_unchecked(*p)).collect();
        let normals = edge_normals(&vertices)?;
        let poly = SphericalPolygon { vertices, normals };
        (poly.fan_area() > SLIVER_AREA).then_some(poly)
    }

    pub fn vertices(&self) -> &[UnitVec] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub(crate) fn edge_normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn edges(&self) -> impl Iterator<Item = GeodesicArc> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| {
            GeodesicArc::new(self.vertices[i], self.vertices[(i + 1) % k]).expect("polygon edges are never antipodal")
        })
    }

    /// Interior angle at vertex `i`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let k = self.vertices.len();
        let v = self.vertices[i].vec();
        let next = self.vertices[(i + 1) % k].vec();
        let prev = self.vertices[(i + k - 1) % k].vec();
        let t_next = next - v * v.dot(next);
        let t_prev = prev - v * v.dot(prev);
        let a = t_next.cross(t_prev).dot(v).atan2(t_next.dot(t_prev));
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// Girard's theorem: angle sum minus `(k-2)π`. Clipping can leave
    /// near-duplicate vertices whose angles are meaningless and throw the sum
    /// off by a multiple of π; the fan sum is continuous there and is used
    /// when the two disagree.
    pub fn area(&self) -> f64 {
        let k = self.vertices.len();
        let sum: f64 = (0..k).map(|i| self.interior_angle(i)).sum();
        let girard = (sum - (k as f64 - 2.0) * PI).max(0.0);
        let fan = self.fan_area().max(0.0);
        if (girard - fan).abs() <= 1e-9 {
            girard
        } else {
            fan
        }
    }

    /// Area as a sum over the fan triangulation from vertex 0, each triangle
    /// evaluated with the Oosterom–Strackee formula.
    pub fn fan_area(&self) -> f64 {
        let a = self.vertices[0].vec();
        (1..self.vertices.len() - 1).map(|i| triangle_area(a, self.vertices[i].vec(), self.vertices[i + 1].vec())).sum()
    }

    /// Closed membership with tolerance `tol` (radians, approximately).
    pub fn contains(&self, p: UnitVec, tol: f64) -> bool {
        let pv = p.vec();
        self.normals.iter().all(|n| n.dot(pv) >= -tol)
    }

    /// Strict interior membership: at least `margin` inside every edge.
    pub fn contains_strictly(&self, p: UnitVec, margin: f64) -> bool {
        let pv = p.vec();
        self.normals.iter().all(|n| n.dot(pv) > margin)
    }

    /// Exact distance from `p` to the closed polygon.
    pub fn distance_to(&self, p: UnitVec) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        self.edges().map(|e| e.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn centroid_dir(&self) -> UnitVec {
        let s = self.vertices.iter().fold(Vec3::ZERO, |s, v| s + v.vec());
        UnitVec::from_vec3(s).unwrap_or(self.vertices[0])
    }

    /// Smallest cap around the vertex centroid containing the polygon.
    pub fn bounding_cap(&self) -> (UnitVec, f64) {
        let c = self.centroid_dir();
        let r = self.vertices.iter().map(|v| v.distance(c)).fold(0.0, f64::max);
        (c, r)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.distance(*b));
            }
        }
        d
    }

    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Self, SphereError> {
        let vs = self.vertices.iter().map(|v| UnitVec::from_vec3(f(v.vec()))).collect::<Result<Vec<_>, _>>()?;
        SphericalPolygon::new(vs)
    }

    /// Ring of `self ∩ {v : n·v ≥ -tol}`; may be empty or degenerate.
    pub(crate) fn clip_ring(ring: &[Vec3], n: Vec3, tol: f64) -> Vec<Vec3> {
        let k = ring.len();
        if k == 0 {
            return Vec::new();
        }
        let side: Vec<f64> = ring.iter().map(|p| n.dot(*p)).collect();
        if side.iter().all(|&s| s >= -tol) {
            return ring.to_vec();
        }
        if side.iter().all(|&s| s < -tol) {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(k + 1);
        for i in 0..k {
            let j = (i + 1) % k;
            let (p, q) = (ring[i], ring[j]);
            let (sp, sq) = (side[i], side[j]);
            let pin = sp >= -tol;
            let qin = sq >= -tol;
            if pin {
                out.push(p);
            }
            if pin != qin && k > 1 && (sp > 0.0) != (sq > 0.0) {
                out.push(crossing(p, q, sp, sq));
            }
        }
        out
    }

    pub(crate) fn ring(&self) -> Vec<Vec3> {
        self.vertices.iter().map(|v| v.vec()).collect()
    }

    /// Ring of the closed intersection with another polygon, possibly
    /// degenerate (a shared point or edge).
    pub(crate) fn intersection_ring(&self, other: &SphericalPolygon, tol: f64) -> Vec<Vec3> {
        let mut ring = self.ring();
        for n in &other.normals {
            ring = Self::clip_ring(&ring, *n, tol);
            if ring.is_empty() {
                break;
            }
        }
        ring
    }

    /// Positive-area intersection, if any.
    pub fn intersection(&self, other: &SphericalPolygon) -> Option<SphericalPolygon> {
        if !self.caps_overlap(other, 0.0) {
            return None;
        }
        let ring = self.intersection_ring(other, 0.0);
        SphericalPolygon::from_ring(&ring)
    }

    /// Closed intersection test, touching included.
    pub fn intersects(&self, other: &SphericalPolygon, tol: f64) -> bool {
        if !self.caps_overlap(other, tol) {
            return false;
        }
        !self.intersection_ring(other, tol).is_empty()
    }

    fn caps_overlap(&self, other: &SphericalPolygon, tol: f64) -> bool {
        let (c1, r1) = self.bounding_cap();
        let (c2, r2) = other.bounding_cap();
        c1.distance(c2) <= r1 + r2 + tol + 1e-12
    }

    /// Part of a closed arc inside the closed polygon.
    pub fn clip_arc(&self, arc: &GeodesicArc, tol: f64) -> Option<GeodesicArc> {
        let (mut p, mut q) = (arc.start().vec(), arc.end().vec());
        for n in &self.normals {
            let (np, nq) = GeodesicArc::clip_to_hemisphere(p, q, *n, tol)?;
            p = np;
            q = nq;
        }
        GeodesicArc::new(UnitVec::from_vec3(p).ok()?, UnitVec::from_vec3(q).ok()?).ok()
    }

    pub fn intersects_arc(&self, arc: &GeodesicArc, tol: f64) -> bool {
        self.clip_arc(arc, tol).is_some()
    }

    /// `self \ other` as a list of interior-disjoint convex pieces.
    pub fn difference(&self, other: &SphericalPolygon) -> Vec<SphericalPolygon> {
        if !self.caps_overlap(other, 0.0) || self.intersection(other).is_none() {
            return vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut rest = self.ring();
        for n in &other.normals {
            let outside = Self::clip_ring(&rest, -*n, 0.0);
            if let Some(p) = SphericalPolygon::from_ring(&outside) {
                pieces.push(p);
            }
            rest = Self::clip_ring(&rest, *n, 0.0);
            if rest.len() < 3 {
                break;
            }
        }
        pieces
    }

    /// Fan triangles `(v0, vi, vi+1)`.
    pub(crate) fn fan_triangles(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        let a = self.vertices[0].vec();
        (1..self.vertices.len() - 1).map(move |i| [a, self.vertices[i].vec(), self.vertices[i + 1].vec()])
    }

    /// Same ring up to cyclic shift, vertices within `tol`.
    pub fn approx_eq(&self, other: &SphericalPolygon, tol: f64) -> bool {
        let k = self.vertices.len();
        if k != other.vertices.len() {
            return false;
        }
        (0..k).any(|shift| (0..k).all(|i| self.vertices[i].distance(other.vertices[(i + shift) % k]) <= tol))
    }
}

fn edge_normals(vertices: &[UnitVec]) -> Option<Vec<Vec3>> {
    let k = vertices.len();
    (0..k).map(|i| vertices[i].vec().cross(vertices[(i + 1) % k].vec()).try_normalize(1e-300)).collect()
}

/// Signed area of the spherical triangle `(a, b, c)` (positive when
/// counterclockwise seen from outside).
pub fn triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let det = a.dot(b.cross(c));
    let denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * det.atan2(denom)
}

/// Spherical convex hull of points lying in a common open hemisphere.
pub fn spherical_hull(points: &[UnitVec]) -> Result<SphericalPolygon, SphereError> {
    let sum = points.iter().fold(Vec3::ZERO, |s, v| s + v.vec());
    let w = sum.try_normalize(1e-12).ok_or(SphereError::NotInHemisphere)?;
    if points.iter().any(|p| p.vec().dot(w) <= 1e-9) {
        return Err(SphereError::NotInHemisphere);
    }
    // Gnomonic projection onto the tangent plane at w preserves great circles
    // as straight lines, so the planar hull lifts back to the spherical one.
    let e1 = w.any_orthonormal();
    let e2 = w.cross(e1);
    let mut pts: Vec<(f64, f64, Vec3)> = points
        .iter()
        .map(|p| {
            let v = p.vec() / p.vec().dot(w);
            (v.dot(e1), v.dot(e2), p.vec())
        })
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
    if pts.len() < 3 {
        return Err(SphereError::DegeneratePolygon("hull has fewer than three points"));
    }
    let cross = |o: &(f64, f64, Vec3), a: &(f64, f64, Vec3), b: &(f64, f64, Vec3)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64, Vec3)> = Vec::new();
    for p in &pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 1e-15 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 1e-15 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    let verts: Vec<UnitVec> = hull.iter().map(|p| UnitVec::new_unchecked(p.2)).collect();
    SphericalPolygon::new(verts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    #[test]
    fn wide_ring_with_off_center_centroid() {
        // Projection of a polar facet whose vertex centroid misses a corner.
        let ring = [
            (-0.936689727896016, -1.0579380329697785, -0.4018163677744897),
            (-0.03472308195741213, -0.011830901766020745, 0.9348197963438165),
            (0.09071574640295131, 0.24655087762433633, 1.1189550331617193),
            (-0.3631514893711748, 0.6671103944610557, 0.431649329433489),
        ];
        let p = SphericalPolygon::new(ring.iter().map(|&(x, y, z)| UnitVec::new(x, y, z).unwrap()).collect());
        assert!(p.unwrap().area() > 0.0);
    }

    #[test]
    fn arc_touching_the_antipodal_circle_misses() {
        // The arc's start lies on the great circle of an edge, opposite
        // the polygon; rounding puts it a hair outside.
        let sq =
            SphericalPolygon::new(vec![u(1.0, 1.0, 1.0), u(-1.0, 1.0, 1.0), u(-1.0, -1.0, 1.0), u(1.0, -1.0, 1.0)])
                .unwrap();
        let a = UnitVec::new(0.0, -0.7071067811865475, -0.7071067811865477).unwrap();
        let arc = GeodesicArc::new(a, -UnitVec::E3).unwrap();
        assert!(!sq.intersects_arc(&arc, 1e-9));
    }

    fn octant() -> SphericalPolygon {
        SphericalPolygon::new(vec![UnitVec::E1, UnitVec::E2, UnitVec::E3]).unwrap()
    }

    fn cube_face(sign: f64, axis: usize) -> SphericalPolygon {
        let mut vs = Vec::new();
        for (a, b) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            let mut c = [0.0; 3];
            c[axis] = sign;
            c[(axis + 1) % 3] = a;
            c[(axis + 2) % 3] = b;
            vs.push(UnitVec::from_vec3(c.into()).unwrap());
        }
        SphericalPolygon::new(vs).unwrap()
    }

    #[test]
    fn octant_area_is_quarter_pi_times_two() {
        assert_abs_diff_eq!(octant().area(), FRAC_PI_2, epsilon = 1e-14);
        assert_abs_diff_eq!(octant().fan_area(), FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn cube_faces_tile_the_sphere() {
        let mut total = 0.0;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let f = cube_face(sign, axis);
                assert_abs_diff_eq!(f.area(), 2.0 * PI / 3.0, epsilon = 1e-13);
                total += f.area();
            }
        }
        assert_abs_diff_eq!(total, 4.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn hemisphere_square_is_rejected() {
        let r = SphericalPolygon::new(vec![u(1.0, 0.0, 0.0), u(0.0, 1.0, 0.0), u(-1.0, 0.0, 0.0), u(0.0, -1.0, 0.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn orientation_is_normalized() {
        let p = SphericalPolygon::new(vec![UnitVec::E3, UnitVec::E2, UnitVec::E1]).unwrap();
        assert!(p.area() > 0.0);
        assert!(p.contains(u(1.0, 1.0, 1.0), 0.0));
        assert!(!p.contains(u(-1.0, 1.0, 1.0), 1e-9));
    }

    #[test]
    fn non_convex_rejected() {
        let r = SphericalPolygon::new(vec![
            u(1.0, 0.0, 1.0),
            u(0.0, 1.0, 1.0),
            u(0.0, 0.0, 1.0),
            u(-1.0, 0.2, 5.0),
            u(0.0, -1.0, 1.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn short_edge_rejected() {
        let r = SphericalPolygon::new(vec![UnitVec::E1, UnitVec::E1, UnitVec::E3]);
        assert!(matches!(r, Err(SphereError::DegeneratePolygon(_))));
    }

    #[test]
    fn difference_and_intersection_partition_area() {
        let a = cube_face(1.0, 2);
        let b = octant();
        let inter = a.intersection(&b).unwrap();
        let diff: f64 = a.difference(&b).iter().map(|p| p.area()).sum();
        assert_abs_diff_eq!(inter.area() + diff, a.area(), epsilon = 1e-12);
        assert_abs_diff_eq!(inter.area(), a.area() / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn touching_polygons_intersect_but_have_no_area() {
        let a = octant();
        let b = SphericalPolygon::new(vec![UnitVec::E2, u(-1.0, 0.0, 0.0), UnitVec::E3]).unwrap();
        assert!(a.intersects(&b, EPS_GEOM));
        assert!(a.intersection(&b).is_none());
    }

    #[test]
    fn difference_with_a_touching_polygon_is_unchanged() {
        let a = octant();
        let b = SphericalPolygon::new(vec![UnitVec::E2, u(-1.0, 0.0, 0.0), UnitVec::E3]).unwrap();
        let d = a.difference(&b);
        assert_eq!(d.len(), 1);
        assert!(d[0].approx_eq(&a, 0.0));
    }

    #[test]
    fn hull_of_octant_corners_and_center() {
        let h = spherical_hull(&[UnitVec::E1, UnitVec::E2, UnitVec::E3, u(1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(h.len(), 3);
        assert_abs_diff_eq!(h.area(), FRAC_PI_2, epsilon = 1e-13);
    }

    #[test]
    fn clip_arc_inside_polygon() {
        let a = octant();
        let arc = GeodesicArc::new(u(-1.0, 1.0, 1.0), u(1.0, 1.0, 1.0)).unwrap();
        let c = a.clip_arc(&arc, 0.0).unwrap();
        assert_abs_diff_eq!(c.start().distance(u(0.0, 1.0, 1.0)), 0.0, epsilon = 1e-12);
    }
}
