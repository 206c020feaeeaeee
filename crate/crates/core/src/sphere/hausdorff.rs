//! Hausdorff distance between stratified regions.
//!
//! The directed distance `sup_{a∈A} d(a, B)` is found by branch and bound
//! over pieces of `A` (points, arc segments, polygon triangles). For a
//! piece with corners `v_i` every point lies within the piece diameter of
//! each corner, and `d(·, B)` is 1-Lipschitz, so
//! `min_i (d(v_i, B) + max_j d(v_i, v_j))` bounds the piece from above.
//! So does `max_i d(v_i, S)`, up to a curvature term quadratic in the
//! piece diameter, for each convex stratum `S` of `B`.
//! Pieces are split until the best upper bound is within `res` of the best
//! value seen, which gives the additive error bound. Polygons of `A` are
//! first cut down to what the polygons of `B` leave uncovered.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use super::{SphereError, SphericalRegion, UnitVec, Vec3};

struct Piece {
    upper: f64,
    corners: Vec<Vec3>,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

fn unit(v: Vec3) -> UnitVec {
    UnitVec::from_vec3(v).expect("piece corners are unit vectors")
}

fn mid(a: Vec3, b: Vec3) -> Vec3 {
    (a + b).try_normalize(1e-300).unwrap_or(a)
}

/// Bound on the distance to a convex stratum over a piece of diameter
/// `diam` whose corners are at most `worst` away. Along a unit-speed
/// geodesic the distance `g` to a hemisphere satisfies
/// `g'' = (g'² − 1) tan g ≥ −tan g`, and the distance to a convex set is the
/// largest distance to its supporting hemispheres, so where it stays below
/// `F < π/2` it overshoots its endpoint values by at most `tan F · ℓ²/8`.
/// Two such steps cover a triangle.
fn corner_bound(worst: f64, diam: f64) -> f64 {
    let f = worst + diam;
    if f < FRAC_PI_2 {
        worst + f.tan() * diam * diam / 4.0
    } else {
        f64::INFINITY
    }
}

/// Evaluates a piece: returns (best corner value, upper bound).
fn evaluate(corners: &[Vec3], b: &SphericalRegion) -> (f64, f64) {
    // A piece inside a single convex polygon of B is at distance zero.
    let us: Vec<UnitVec> = corners.iter().map(|c| unit(*c)).collect();
    if b.polygons.iter().any(|p| us.iter().all(|u| p.contains(*u, 1e-12))) {
        return (0.0, 0.0);
    }
    let diam = us.iter().flat_map(|a| us.iter().map(move |b| a.distance(*b))).fold(0.0, f64::max);
    let mut ds = vec![f64::INFINITY; us.len()];
    let mut convex_upper = f64::INFINITY;
    let mut stratum = |dist: &dyn Fn(UnitVec) -> f64| {
        let mut worst: f64 = 0.0;
        for (i, u) in us.iter().enumerate() {
            let d = dist(*u);
            ds[i] = ds[i].min(d);
            worst = worst.max(d);
        }
        convex_upper = convex_upper.min(corner_bound(worst, diam));
    };
    for q in &b.polygons {
        stratum(&|u| q.distance_to(u));
    }
    for a in &b.arcs {
        stratum(&|u| a.distance_to(u));
    }
    for q in &b.points {
        stratum(&|u| q.distance(u));
    }
    let best = ds.iter().copied().fold(0.0, f64::max);
    let mut upper = convex_upper;
    for (i, ui) in us.iter().enumerate() {
        let reach = us.iter().map(|uj| ui.distance(*uj)).fold(0.0, f64::max);
        upper = upper.min(ds[i] + reach);
    }
    (best, upper)
}

fn split(corners: &[Vec3]) -> Vec<Vec<Vec3>> {
    match corners.len() {
        2 => {
            let m = mid(corners[0], corners[1]);
            vec![vec![corners[0], m], vec![m, corners[1]]]
        }
        // Longest-edge bisection, so thin slivers shrink along their length.
        3 => {
            let len = |i: usize| (corners[i] - corners[(i + 1) % 3]).norm_sq();
            let i = (0..3).max_by(|&x, &y| len(x).total_cmp(&len(y))).expect("three edges");
            let (a, b, c) = (corners[i], corners[(i + 1) % 3], corners[(i + 2) % 3]);
            let m = mid(a, b);
            vec![vec![a, m, c], vec![m, b, c]]
        }
        _ => Vec::new(),
    }
}

/// `sup_{a∈A} d(a, B)` within additive error `res`.
pub fn directed_hausdorff(a: &SphericalRegion, b: &SphericalRegion, res: f64) -> Result<f64, SphereError> {
    if res.is_nan() || res <= 0.0 {
        return Err(SphereError::InvalidResolution(res));
    }
    if a.is_empty() || b.is_empty() {
        return Err(SphereError::EmptyRegion);
    }
    let mut best: f64 = 0.0;
    for p in &a.points {
        best = best.max(b.distance_to(*p));
    }
    let mut heap = BinaryHeap::new();
    let push = |corners: Vec<Vec3>, best: &mut f64, heap: &mut BinaryHeap<Piece>| {
        let (v, upper) = evaluate(&corners, b);
        *best = best.max(v);
        if upper > *best + res {
            heap.push(Piece { upper, corners });
        }
    };
    for arc in &a.arcs {
        push(vec![arc.start().vec(), arc.end().vec()], &mut best, &mut heap);
    }
    // The part of A covered by polygons of B is at distance zero; only
    // the uncovered fragments need refining.
    for poly in &a.polygons {
        let mut frags = vec![poly.clone()];
        for q in &b.polygons {
            frags = frags.iter().flat_map(|f| f.difference(q)).collect();
        }
        for f in &frags {
            for t in f.fan_triangles() {
                push(t.to_vec(), &mut best, &mut heap);
            }
        }
    }
    while let Some(piece) = heap.pop() {
        if piece.upper <= best + res {
            break;
        }
        for c in split(&piece.corners) {
            push(c, &mut best, &mut heap);
        }
    }
    Ok(best)
}

/// Symmetric Hausdorff distance with additive error at most `res`.
pub fn hausdorff_distance(a: &SphericalRegion, b: &SphericalRegion, res: f64) -> Result<f64, SphereError> {
    Ok(directed_hausdorff(a, b, res)?.max(directed_hausdorff(b, a, res)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{Cap, GeodesicArc, SphericalPolygon};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn cap_region(r: f64, res: f64) -> SphericalRegion {
        SphericalRegion::from_polygon(Cap::new(UnitVec::E3, r).unwrap().inscribed_polygon(res).unwrap())
    }

    #[test]
    fn identical_caps() {
        let a = cap_region(0.2, 1e-4);
        assert_eq!(hausdorff_distance(&a, &a, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn concentric_caps() {
        let res = 1e-3;
        let d = hausdorff_distance(&cap_region(0.1, res), &cap_region(0.3, res), res).unwrap();
        assert_abs_diff_eq!(d, 0.2, epsilon = 2.0 * res);
    }

    #[test]
    fn point_regions() {
        let a = SphericalRegion::from_point(UnitVec::E1);
        let b = SphericalRegion::from_point(UnitVec::E2);
        assert_abs_diff_eq!(hausdorff_distance(&a, &b, 1e-3).unwrap(), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn empty_and_bad_resolution_rejected() {
        let a = SphericalRegion::from_point(UnitVec::E1);
        assert_eq!(hausdorff_distance(&a, &SphericalRegion::empty(), 0.1), Err(SphereError::EmptyRegion));
        assert_eq!(hausdorff_distance(&a, &a, 0.0), Err(SphereError::InvalidResolution(0.0)));
    }

    #[test]
    fn arc_against_its_endpoint() {
        let arc = SphericalRegion::from_arc(GeodesicArc::new(UnitVec::E1, UnitVec::E2).unwrap());
        let p = SphericalRegion::from_point(UnitVec::E1);
        let d = hausdorff_distance(&arc, &p, 1e-6).unwrap();
        assert_abs_diff_eq!(d, FRAC_PI_2, epsilon = 1e-6);
    }

    #[test]
    fn octant_against_corner_point() {
        let oct =
            SphericalRegion::from_polygon(SphericalPolygon::new(vec![UnitVec::E1, UnitVec::E2, UnitVec::E3]).unwrap());
        let p = SphericalRegion::from_point(UnitVec::E3);
        assert_abs_diff_eq!(directed_hausdorff(&oct, &p, 1e-6).unwrap(), FRAC_PI_2, epsilon = 1e-6);
        assert_eq!(directed_hausdorff(&p, &oct, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn corner_bound_covers_triangle_interiors() {
        use crate::rng::substream;
        use crate::sphere::{sample_sphere, spherical_hull};
        use rand::RngExt;
        let mut rng = substream(3, "test", 0);
        for _ in 0..300 {
            let c = Cap::new(sample_sphere(&mut rng), 0.8).unwrap();
            let s = spherical_hull(&(0..5).map(|_| c.sample(&mut rng)).collect::<Vec<_>>()).unwrap();
            let t = Cap::new(sample_sphere(&mut rng), 0.6).unwrap();
            let tri: Vec<UnitVec> = (0..3).map(|_| t.sample(&mut rng)).collect();
            let corner = tri.iter().map(|v| s.distance_to(*v)).fold(0.0, f64::max);
            let diam = (0..3).map(|i| tri[i].distance(tri[(i + 1) % 3])).fold(0.0, f64::max);
            let bound = corner_bound(corner, diam);
            for _ in 0..50 {
                let w: [f64; 3] = [rng.random(), rng.random(), rng.random()];
                let x = unit(tri[0].vec() * w[0] + tri[1].vec() * w[1] + tri[2].vec() * w[2]);
                assert!(s.distance_to(x) <= bound + 1e-12);
            }
        }
    }
}
