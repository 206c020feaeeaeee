use serde::{Deserialize, Serialize};

use super::arc::lex_le;
use super::polygon::SLIVER_AREA;
use super::{GeodesicArc, SphericalPolygon, UnitVec, Vec3};

/// Closed subset of S² stored as three strata: isolated points, geodesic
/// arcs and convex spherical polygons.
///
/// Strata may overlap; only the polygon stratum carries area.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SphericalRegion {
    #[serde(default)]
    pub points: Vec<UnitVec>,
    #[serde(default)]
    pub arcs: Vec<GeodesicArc>,
    #[serde(default)]
    pub polygons: Vec<SphericalPolygon>,
}

impl SphericalRegion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_point(p: UnitVec) -> Self {
        SphericalRegion { points: vec![p], ..Default::default() }
    }

    pub fn from_arc(a: GeodesicArc) -> Self {
        SphericalRegion { arcs: vec![a], ..Default::default() }
    }

    pub fn from_polygon(p: SphericalPolygon) -> Self {
        SphericalRegion { polygons: vec![p], ..Default::default() }
    }

    pub fn from_polygons(polygons: Vec<SphericalPolygon>) -> Self {
        SphericalRegion { polygons, ..Default::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.arcs.is_empty() && self.polygons.is_empty()
    }

    pub fn stratum_count(&self) -> usize {
        self.points.len() + self.arcs.len() + self.polygons.len()
    }

    pub fn extend(&mut self, other: SphericalRegion) {
        self.points.extend(other.points);
        self.arcs.extend(other.arcs);
        self.polygons.extend(other.polygons);
    }

    pub fn union(mut self, other: SphericalRegion) -> Self {
        self.extend(other);
        self
    }

    pub fn contains(&self, p: UnitVec, tol: f64) -> bool {
        self.polygons.iter().any(|q| q.contains(p, tol))
            || self.arcs.iter().any(|a| a.contains(p, tol))
            || self.points.iter().any(|q| q.distance(p) <= tol)
    }

    /// Exact distance from `p` to the region (`+∞` when empty).
    pub fn distance_to(&self, p: UnitVec) -> f64 {
        let mut d = f64::INFINITY;
        for q in &self.polygons {
            d = d.min(q.distance_to(p));
            if d == 0.0 {
                return 0.0;
            }
        }
        for a in &self.arcs {
            d = d.min(a.distance_to(p));
        }
        for q in &self.points {
            d = d.min(q.distance(p));
        }
        d
    }

    /// Drops strata that duplicate an earlier stratum of the same kind.
    pub fn dedup(mut self, tol: f64) -> Self {
        let mut pts: Vec<UnitVec> = Vec::new();
        for p in self.points {
            if !pts.iter().any(|q| q.distance(p) <= tol) {
                pts.push(p);
            }
        }
        let mut arcs: Vec<GeodesicArc> = Vec::new();
        for a in self.arcs {
            if !arcs.iter().any(|b| arcs_match(&a, b, tol)) {
                arcs.push(a);
            }
        }
        let mut polys: Vec<SphericalPolygon> = Vec::new();
        for p in self.polygons {
            if !polys.iter().any(|q| q.approx_eq(&p, tol)) {
                polys.push(p);
            }
        }
        self.points = pts;
        self.arcs = arcs;
        self.polygons = polys;
        self
    }

    /// Stratum-by-stratum equality: the deduplicated point, arc and polygon
    /// sets match one-to-one within `tol`.
    pub fn approx_eq(&self, other: &SphericalRegion, tol: f64) -> bool {
        let a = self.clone().dedup(tol);
        let b = other.clone().dedup(tol);
        a.points.len() == b.points.len()
            && a.arcs.len() == b.arcs.len()
            && a.polygons.len() == b.polygons.len()
            && a.points.iter().all(|p| b.points.iter().any(|q| q.distance(*p) <= tol))
            && b.points.iter().all(|p| a.points.iter().any(|q| q.distance(*p) <= tol))
            && a.arcs.iter().all(|x| b.arcs.iter().any(|y| arcs_match(x, y, tol)))
            && b.arcs.iter().all(|x| a.arcs.iter().any(|y| arcs_match(x, y, tol)))
            && a.polygons.iter().all(|x| b.polygons.iter().any(|y| x.approx_eq(y, tol)))
            && b.polygons.iter().all(|x| a.polygons.iter().any(|y| x.approx_eq(y, tol)))
    }

    /// Closed intersection, stratified. Touching polygons contribute the
    /// shared arc or point.
    pub fn intersection(&self, other: &SphericalRegion, tol: f64) -> SphericalRegion {
        let mut out = SphericalRegion::empty();
        for p in &self.polygons {
            for q in &other.polygons {
                let ring = p.intersection_ring(q, tol);
                push_ring(&mut out, &ring);
            }
            for a in &other.arcs {
                if let Some(c) = p.clip_arc(a, tol) {
                    push_arc(&mut out, c);
                }
            }
            for x in &other.points {
                if p.contains(*x, tol) {
                    out.points.push(*x);
                }
            }
        }
        for a in &self.arcs {
            for q in &other.polygons {
                if let Some(c) = q.clip_arc(a, tol) {
                    push_arc(&mut out, c);
                }
            }
            for b in &other.arcs {
                if let Some(c) = a.intersection_with_arc(b, tol) {
                    push_arc(&mut out, c);
                }
            }
            for x in &other.points {
                if a.contains(*x, tol) {
                    out.points.push(*x);
                }
            }
        }
        for x in &self.points {
            if other.polygons.iter().any(|q| q.contains(*x, tol))
                || other.arcs.iter().any(|a| a.contains(*x, tol))
                || other.points.iter().any(|q| q.distance(*x) <= tol)
            {
                out.points.push(*x);
            }
        }
        out
    }

    /// Interior-disjoint convex pieces covering the polygon stratum.
    pub fn disjoint_pieces(&self) -> Vec<SphericalPolygon> {
        disjoint_pieces(&self.polygons)
    }

    /// Lebesgue area of the region (polygon stratum only, overlaps once).
    pub fn area(&self) -> f64 {
        self.disjoint_pieces().iter().map(|p| p.area()).sum()
    }

    /// Applies a linear map (expected orthogonal) to every stratum.
    pub fn transform(&self, f: impl Fn(Vec3) -> Vec3 + Copy) -> SphericalRegion {
        let map = |p: UnitVec| UnitVec::from_vec3(f(p.vec())).expect("rotation keeps unit vectors");
        SphericalRegion {
            points: self.points.iter().map(|p| map(*p)).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| GeodesicArc::new(map(a.start()), map(a.end())).expect("rotation keeps arcs"))
                .collect(),
            polygons: self.polygons.iter().map(|p| p.map_vertices(f).expect("rotation keeps polygons")).collect(),
        }
    }
}

/// Splits a list of possibly overlapping convex polygons into
/// interior-disjoint convex pieces with the same union.
pub fn disjoint_pieces(polygons: &[SphericalPolygon]) -> Vec<SphericalPolygon> {
    let mut pieces: Vec<SphericalPolygon> = Vec::new();
    for p in polygons {
        let mut frags = vec![p.clone()];
        for q in &pieces {
            if frags.is_empty() {
                break;
            }
            frags = frags.iter().flat_map(|f| f.difference(q)).collect();
        }
        pieces.extend(frags.into_iter().filter(|f| f.fan_area() > SLIVER_AREA));
    }
    pieces
}

fn arcs_match(a: &GeodesicArc, b: &GeodesicArc, tol: f64) -> bool {
    let (a0, a1) = a.sorted_endpoints();
    let (b0, b1) = b.sorted_endpoints();
    (a0.distance(b0) <= tol && a1.distance(b1) <= tol) || (a0.distance(b1) <= tol && a1.distance(b0) <= tol)
}

fn push_arc(out: &mut SphericalRegion, a: GeodesicArc) {
    if a.is_degenerate() {
        out.points.push(a.start());
    } else {
        out.arcs.push(a);
    }
}

fn push_ring(out: &mut SphericalRegion, ring: &[Vec3]) {
    if ring.is_empty() {
        return;
    }
    if let Some(p) = SphericalPolygon::from_ring(ring) {
        out.polygons.push(p);
        return;
    }
    // Degenerate ring: keep its extreme points as an arc (or a point).
    let pts: Vec<UnitVec> = ring.iter().filter_map(|v| UnitVec::from_vec3(*v).ok()).collect();
    let mut best = (pts[0], pts[0], -1.0);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i..] {
            let d = a.distance(*b);
            if d > best.2 {
                best = if lex_le(*a, *b) { (*a, *b, d) } else { (*b, *a, d) };
            }
        }
    }
    match GeodesicArc::new(best.0, best.1) {
        Ok(a) => push_arc(out, a),
        Err(_) => out.points.push(best.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::EPS_GEOM;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    fn octant(sx: f64, sy: f64, sz: f64) -> SphericalPolygon {
        SphericalPolygon::new(vec![u(sx, 0.0, 0.0), u(0.0, sy, 0.0), u(0.0, 0.0, sz)]).unwrap()
    }

    #[test]
    fn union_area_counts_overlap_once() {
        let a = octant(1.0, 1.0, 1.0);
        let r = SphericalRegion::from_polygons(vec![a.clone(), a.clone(), octant(-1.0, 1.0, 1.0)]);
        assert_abs_diff_eq!(r.area(), PI, epsilon = 1e-12);
    }

    #[test]
    fn adjacent_octants_intersect_in_shared_edge() {
        let a = SphericalRegion::from_polygon(octant(1.0, 1.0, 1.0));
        let b = SphericalRegion::from_polygon(octant(-1.0, 1.0, 1.0));
        let x = a.intersection(&b, EPS_GEOM);
        assert!(x.polygons.is_empty());
        assert_eq!(x.arcs.len(), 1);
        assert_abs_diff_eq!(x.arcs[0].length(), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn approx_eq_ignores_order_and_duplicates() {
        let a = SphericalRegion {
            points: vec![UnitVec::E1, UnitVec::E2],
            arcs: vec![GeodesicArc::new(UnitVec::E1, UnitVec::E3).unwrap()],
            polygons: vec![octant(1.0, 1.0, 1.0)],
        };
        let b = SphericalRegion {
            points: vec![UnitVec::E2, UnitVec::E1, UnitVec::E1],
            arcs: vec![GeodesicArc::new(UnitVec::E3, UnitVec::E1).unwrap()],
            polygons: vec![SphericalPolygon::new(vec![UnitVec::E2, UnitVec::E3, UnitVec::E1]).unwrap()],
        };
        assert!(a.approx_eq(&b, 1e-12));
        let mut c = b.clone();
        c.points.push(UnitVec::E3);
        assert!(!a.approx_eq(&c, 1e-12));
    }

    #[test]
    fn distance_to_mixed_region() {
        let r = SphericalRegion { points: vec![-UnitVec::E3], arcs: vec![], polygons: vec![octant(1.0, 1.0, 1.0)] };
        assert_eq!(r.distance_to(u(1.0, 1.0, 1.0)), 0.0);
        assert_abs_diff_eq!(r.distance_to(u(0.0, 0.1, -1.0)), (0.1f64).atan(), epsilon = 1e-14);
    }
}
