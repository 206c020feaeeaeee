use super::{spherical_hull, SphereError, SphericalPolygon, SphericalRegion, UnitVec, Vec3};

/// Polar set `{v : u·v ≤ 0 for all u ∈ p}` of a convex polygon.
///
/// The result is the polygon whose vertices are the outward edge normals
/// of `p`.
pub fn polar_set(p: &SphericalPolygon) -> SphericalRegion {
    let verts: Vec<UnitVec> =
        p.edge_normals().iter().map(|n| UnitVec::from_vec3(-*n).expect("edge normals are unit")).collect();
    let poly = SphericalPolygon::new(verts).expect("polar of a convex polygon is a convex polygon");
    SphericalRegion::from_polygon(poly)
}

/// Polar set of the spherical convex hull of `points`, which must lie in
/// an open hemisphere. One point gives a closed hemisphere, two points a
/// lune; both are returned split into triangles.
pub fn polar_of_points(points: &[UnitVec]) -> Result<SphericalRegion, SphereError> {
    match points {
        [] => Err(SphereError::EmptyRegion),
        [u] => Ok(hemisphere(-*u)),
        [a, b] if a.distance(*b) < 1e-12 => Ok(hemisphere(-*a)),
        [a, b] => lune(*a, *b),
        _ => match spherical_hull(points) {
            Ok(hull) => Ok(polar_set(&hull)),
            Err(SphereError::DegeneratePolygon(_)) => {
                // All points on one great circle: polar of the extreme arc.
                let (mut best, mut pair) = (-1.0, (points[0], points[0]));
                for (i, a) in points.iter().enumerate() {
                    for b in &points[i + 1..] {
                        if a.distance(*b) > best {
                            best = a.distance(*b);
                            pair = (*a, *b);
                        }
                    }
                }
                polar_of_points(&[pair.0, pair.1])
            }
            Err(e) => Err(e),
        },
    }
}

/// Closed hemisphere centered at `c`, as four triangles.
fn hemisphere(c: UnitVec) -> SphericalRegion {
    let e = c.vec().any_orthonormal();
    let f = c.vec().cross(e);
    let ring = [e, f, -e, -f];
    let polys = (0..4)
        .map(|i| {
            SphericalPolygon::new(vec![c, UnitVec::new_unchecked(ring[i]), UnitVec::new_unchecked(ring[(i + 1) % 4])])
                .expect("quarter hemisphere is a valid triangle")
        })
        .collect();
    SphericalRegion::from_polygons(polys)
}

/// `{v : v·a ≤ 0, v·b ≤ 0}` for non-antipodal distinct `a`, `b`.
fn lune(a: UnitVec, b: UnitVec) -> Result<SphericalRegion, SphereError> {
    let (av, bv) = (a.vec(), b.vec());
    let p = av.cross(bv).try_normalize(1e-12).ok_or(SphereError::AntipodalInput)?;
    let m = (-(av + bv)).try_normalize(1e-12).ok_or(SphereError::AntipodalInput)?;
    let side = |plane: Vec3, other: Vec3| {
        let q = plane.cross(p);
        if q.dot(other) <= 0.0 {
            q
        } else {
            -q
        }
    };
    let qa = side(av, bv);
    let qb = side(bv, av);
    let tri = |x: Vec3, y: Vec3, z: Vec3| {
        SphericalPolygon::new(vec![UnitVec::new_unchecked(x), UnitVec::new_unchecked(y), UnitVec::new_unchecked(z)])
    };
    let polys = vec![tri(p, qa, m)?, tri(m, qa, -p)?, tri(p, m, qb)?, tri(m, -p, qb)?];
    Ok(SphericalRegion::from_polygons(polys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::EPS_GEOM;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    /// Fibonacci lattice of `n` points.
    fn lattice(n: usize) -> Vec<UnitVec> {
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                UnitVec::new_unchecked(Vec3::new(r * phi.cos(), r * phi.sin(), z))
            })
            .collect()
    }

    fn agrees_with_definition(gens: &[UnitVec], region: &SphericalRegion) {
        for v in lattice(10_000) {
            let inside = gens.iter().all(|u| u.dot(v) <= 0.0);
            let margin = gens.iter().map(|u| u.dot(v)).fold(f64::NEG_INFINITY, f64::max).abs();
            if margin < 1e-9 {
                continue;
            }
            assert_eq!(region.contains(v, EPS_GEOM), inside, "disagreement at {v:?}");
        }
    }

    #[test]
    fn point_gives_hemisphere() {
        let r = polar_of_points(&[UnitVec::E3]).unwrap();
        assert_abs_diff_eq!(r.area(), 2.0 * PI, epsilon = 1e-12);
        agrees_with_definition(&[UnitVec::E3], &r);
    }

    #[test]
    fn octant_is_self_dual_up_to_reflection() {
        let oct = SphericalPolygon::new(vec![UnitVec::E1, UnitVec::E2, UnitVec::E3]).unwrap();
        let r = polar_set(&oct);
        let expect = SphericalPolygon::new(vec![-UnitVec::E1, -UnitVec::E2, -UnitVec::E3]).unwrap();
        assert!(r.polygons[0].approx_eq(&expect, 1e-15));
        agrees_with_definition(oct.vertices(), &r);
    }

    #[test]
    fn arc_gives_lune() {
        let r = polar_of_points(&[UnitVec::E1, UnitVec::E2]).unwrap();
        assert_abs_diff_eq!(r.area(), PI, epsilon = 1e-12);
        agrees_with_definition(&[UnitVec::E1, UnitVec::E2], &r);
    }

    #[test]
    fn random_polygon_by_sampling() {
        let gens = [
            UnitVec::new(1.0, 0.2, 0.5).unwrap(),
            UnitVec::new(0.1, 1.0, 0.4).unwrap(),
            UnitVec::new(-0.2, 0.1, 1.0).unwrap(),
            UnitVec::new(0.5, 0.5, 0.6).unwrap(),
        ];
        let r = polar_of_points(&gens).unwrap();
        agrees_with_definition(&gens, &r);
    }
}
