//! Property tests for the invariants of each module.

use std::f64::consts::PI;

use gil_core::body::generate::{cube, random_polytope};
use gil_core::body::{convex_combination, ExactPolytope, Polytope};
use gil_core::gauss_image::{GaussMap, QuerySet};
use gil_core::measure::{
    gauss_image_measure, grid_partition, random_polygon, region_measure, SphericalMeasure, EPS_MEAS,
};
use gil_core::rng::substream;
use gil_core::sphere::{
    arc_distance, geodesic_mean, hausdorff_distance, sample_sphere, Cap, GeodesicArc, SphericalPolygon,
    SphericalRegion, UnitVec, Vec3, EPS_GEOM,
};
use gil_core::uniqueness::{ae_equal_check, dilation_component_check, ratio_partition, SupportComponents};
use gil_core::variation::{
    endpoint_identities_hold, geodesic_lipschitz_grid, harmonic_mean, random_geodesic_triple, HarmonicPath,
};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::RngExt;

fn unit() -> impl Strategy<Value = UnitVec> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("away from the origin", |(x, y, z)| x * x + y * y + z * z > 0.01)
        .prop_map(|(x, y, z)| UnitVec::new(x, y, z).unwrap())
}

/// A generated body that prints as the call reproducing it.
#[derive(Clone)]
struct Body(Polytope, usize, u64);

impl std::ops::Deref for Body {
    type Target = Polytope;
    fn deref(&self) -> &Polytope {
        &self.0
    }
}

impl std::fmt::Debug for Body {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "random_polytope({}, {})", self.1, self.2)
    }
}

fn body() -> impl Strategy<Value = Body> {
    (5usize..=40, any::<u64>()).prop_map(|(m, seed)| Body(random_polytope(m, seed).unwrap(), m, seed))
}

fn polygon(max_radius: f64) -> impl Strategy<Value = SphericalPolygon> {
    any::<u64>().prop_map(move |seed| random_polygon(&mut substream(seed, "prop-polygon", 0), max_radius))
}

fn measure() -> impl Strategy<Value = SphericalMeasure> {
    (0usize..3, any::<u64>()).prop_map(|(kind, seed)| {
        let mut rng = substream(seed, "prop-measure", 0);
        match kind {
            0 => SphericalMeasure::unit_atoms(&(0..30).map(|_| sample_sphere(&mut rng)).collect::<Vec<_>>()).unwrap(),
            1 => SphericalMeasure::Uniform,
            _ => SphericalMeasure::cap_lebesgue(
                (0..3).map(|_| Cap::new(sample_sphere(&mut rng), rng.random_range(0.2..0.8)).unwrap()).collect(),
                rng.random_range(0.5..2.0),
            )
            .unwrap(),
        }
    })
}

/// Points of a region to test inclusion with: corners, arc midpoints and
/// a few interior points of each polygon.
fn probe_points(r: &SphericalRegion, seed: u64) -> Vec<UnitVec> {
    let mut out: Vec<UnitVec> = r.points.clone();
    for a in &r.arcs {
        out.extend([a.start(), a.end()]);
        out.extend(geodesic_mean(a.start(), a.end(), 0.5));
    }
    let mut rng = substream(seed, "probe", 0);
    for p in &r.polygons {
        let vs = p.vertices();
        out.extend_from_slice(vs);
        for _ in 0..5 {
            let v = vs.iter().fold(Vec3::ZERO, |s, v| s + v.vec() * rng.random::<f64>());
            out.extend(UnitVec::from_vec3(v));
        }
    }
    out
}

/// The polygon pulled halfway toward its vertex centroid.
fn shrunk(p: &SphericalPolygon) -> SphericalPolygon {
    let c = p.vertices().iter().fold(Vec3::ZERO, |s, v| s + v.vec());
    let c = UnitVec::from_vec3(c).unwrap();
    SphericalPolygon::new(p.vertices().iter().map(|v| geodesic_mean(c, *v, 0.5).unwrap()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn unit_vectors_are_normalized(u in unit()) {
        prop_assert!((u.vec().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn arc_distance_triangle_inequality(u in unit(), v in unit(), w in unit()) {
        prop_assert!(arc_distance(u, w) <= arc_distance(u, v) + arc_distance(v, w) + 1e-9);
    }

    #[test]
    fn geodesic_mean_lies_on_the_arc(u in unit(), v in unit(), t in 0.0..=1.0f64) {
        prop_assume!(u.dot(v) > -1.0 + 1e-6);
        let m = geodesic_mean(u, v, t).unwrap();
        prop_assert!((arc_distance(u, m) + arc_distance(m, v) - arc_distance(u, v)).abs() <= 1e-9);
    }

    #[test]
    fn antipodal_arcs_are_rejected(u in unit()) {
        prop_assert!(GeodesicArc::new(u, -u).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hausdorff_is_symmetric_and_vanishes_on_equal_sets(a in polygon(0.8), b in polygon(0.8)) {
        let res = 1e-3;
        let (ra, rb) = (SphericalRegion::from_polygon(a), SphericalRegion::from_polygon(b));
        let ab = hausdorff_distance(&ra, &rb, res).unwrap();
        let ba = hausdorff_distance(&rb, &ra, res).unwrap();
        prop_assert!((ab - ba).abs() <= res);
        prop_assert_eq!(hausdorff_distance(&ra, &ra, res).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn polar_involution(k in body()) {
        let kk = k.polar().unwrap().polar().unwrap();
        prop_assert!(k.vertex_set_distance(&kk) <= 1e-7);
    }

    #[test]
    fn exact_polar_involution(k in body()) {
        let e = ExactPolytope::from_float(&k).unwrap();
        prop_assert!(e.polar().unwrap().polar().unwrap().same_vertex_set(&e));
    }

    #[test]
    fn exact_hull_drops_points_on_edges_and_facets(k in body()) {
        let e = ExactPolytope::from_float(&k).unwrap();
        let v = e.vertices();
        let two = BigRational::from_integer(2.into());
        let mut pts = v.to_vec();
        for f in e.facets() {
            let (a, b) = (&v[f.ring[0]], &v[f.ring[1]]);
            pts.push([0, 1, 2].map(|i| (&a[i] + &b[i]) / &two));
            let c = &v[f.ring[2]];
            // A point strictly inside the facet.
            let three = BigRational::from_integer(3.into());
            pts.push([0, 1, 2].map(|i| (&a[i] + &b[i] + &c[i]) / &three));
        }
        prop_assert!(ExactPolytope::from_points(&pts).unwrap().same_vertex_set(&e));
    }

    #[test]
    fn polar_support_times_radial_is_one(k in body(), u in unit()) {
        let kp = k.polar().unwrap();
        prop_assert!((kp.support(u.vec()) * k.radial(u) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn support_is_linear_along_minkowski_combinations(a in body(), b in body(), t in 0.0..=1.0f64, u in unit()) {
        let c = convex_combination(&a, &b, t).unwrap();
        let want = (1.0 - t) * a.support(u.vec()) + t * b.support(u.vec());
        prop_assert!((c.support(u.vec()) - want).abs() <= 1e-9 * want.max(1.0));
    }

    #[test]
    fn radial_scales_with_dilation(k in body(), u in unit(), i in 0usize..3) {
        let c = [0.5, 2.0, 10.0][i];
        let want = c * k.radial(u);
        prop_assert!((k.scaled(c).radial(u) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn radii_are_ordered(k in body()) {
        let r = k.radii();
        prop_assert!(r.r > 0.0 && r.r <= r.big_r);
    }

    #[test]
    fn reverse_image_is_image_of_polar(k in body(), w in polygon(1.0)) {
        let q = QuerySet::Polygon(w);
        let rev = GaussMap::new(&k).reverse_image(&q).region;
        let dual = GaussMap::new(&k.polar().unwrap()).image(&q).region;
        prop_assert!(rev.approx_eq(&dual, EPS_GEOM));
    }

    #[test]
    fn normals_lean_toward_the_direction(k in body(), u in unit()) {
        let radii = k.radii();
        let image = GaussMap::new(&k).image_of_point(u);
        for n in probe_points(&image, 0) {
            prop_assert!(u.dot(n) >= radii.r / radii.big_r - EPS_GEOM);
            // Supporting plane at the radial boundary point.
            let x = u.vec() * k.radial(u);
            prop_assert!((k.support(n.vec()) - x.dot(n.vec())).abs() <= 1e-9);
        }
    }

    #[test]
    fn image_is_monotone(k in body(), w in polygon(1.0), seed in any::<u64>()) {
        let map = GaussMap::new(&k);
        let small = map.image(&QuerySet::Polygon(shrunk(&w))).region;
        let big = map.image(&QuerySet::Polygon(w)).region;
        for p in probe_points(&small, seed) {
            prop_assert!(big.contains(p, 1e-9));
        }
    }

    #[test]
    fn image_is_dilation_invariant(k in body(), w in polygon(1.0), i in 0usize..2) {
        let c = [0.5, 3.0][i];
        let q = QuerySet::Polygon(w);
        let a = GaussMap::new(&k).image(&q).region;
        let b = GaussMap::new(&k.scaled(c)).image(&q).region;
        prop_assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn image_of_the_sphere_is_the_sphere(k in body()) {
        let r = GaussMap::new(&k).image(&QuerySet::Sphere).region;
        prop_assert!((r.area() - 4.0 * PI).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_axioms(lambda in measure(), a in polygon(1.2), b in polygon(1.2)) {
        let (ra, rb) = (SphericalRegion::from_polygon(a), SphericalRegion::from_polygon(b));
        let both = ra.clone().union(rb.clone());
        let (la, lb, lab) = (region_measure(&lambda, &ra), region_measure(&lambda, &rb), region_measure(&lambda, &both));
        prop_assert_eq!(region_measure(&lambda, &SphericalRegion::empty()), 0.0);
        prop_assert!(la <= lab + 1e-9 && lb <= lab + 1e-9);
        prop_assert!(lab <= la + lb + 1e-9);
    }

    #[test]
    fn pullback_is_subadditive(lambda in measure(), k in body(), a in polygon(1.0), b in polygon(1.0)) {
        let (qa, qb) = (QuerySet::Polygon(a), QuerySet::Polygon(b));
        let both = gauss_image_measure(&lambda, &k, &QuerySet::union(vec![qa.clone(), qb.clone()]));
        prop_assert!(both <= gauss_image_measure(&lambda, &k, &qa) + gauss_image_measure(&lambda, &k, &qb) + 1e-9);
    }

    #[test]
    fn harmonic_endpoints_are_exact(k in body(), l in body(), w in polygon(1.0)) {
        prop_assert!(endpoint_identities_hold(&k, &l, &QuerySet::Polygon(w)).unwrap());
    }

    #[test]
    fn geodesic_lipschitz_bound_holds(seed in any::<u64>()) {
        let (u1, u2, alpha) = random_geodesic_triple(&mut substream(seed, "prop-triple", 0));
        prop_assert!(geodesic_lipschitz_grid(u1, u2, alpha, 200).unwrap().holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn harmonic_path_of_dilates_stays_dilated(k in body(), c in 0.2..5.0f64, t in 0.0..=1.0f64) {
        let m = harmonic_mean(&k, &k.scaled(c), t).unwrap();
        let dirs: Vec<UnitVec> = k.vertex_dirs().to_vec();
        prop_assert_eq!(m.vertex_dirs().len(), dirs.len());
        for d in m.vertex_dirs() {
            prop_assert!(dirs.iter().any(|e| e.distance(*d) <= 1e-9));
        }
    }

    #[test]
    fn harmonic_path_bodies_are_valid(k in body(), l in body()) {
        let path = HarmonicPath::uniform(&k, &l, 6).unwrap();
        let bodies: Vec<&Polytope> = path.bodies().collect();
        prop_assert!(bodies[0].vertex_set_distance(&k) <= 1e-9);
        prop_assert!(bodies[bodies.len() - 1].vertex_set_distance(&l) <= 1e-9);
        prop_assert!(bodies.iter().all(|m| m.radii().r > 0.0));
    }

    #[test]
    fn test_families_tile_the_sphere(d in 0.4..1.4f64, seed in any::<u64>()) {
        let f = grid_partition(d, seed, &[], &[]).unwrap();
        let total: f64 = f.cells.iter().map(|c| c.area()).sum();
        prop_assert!((total - 4.0 * PI).abs() <= 1e-6);
        prop_assert!(f.cells.iter().all(|c| c.diameter() < d));
        for (i, a) in f.cells.iter().enumerate() {
            for b in &f.cells[..i] {
                prop_assert!(a.intersection(b).map_or(0.0, |p| p.area()) <= 1e-9);
            }
        }
    }

    #[test]
    fn support_components_are_disjoint(lambda in measure()) {
        let comps = SupportComponents::from_measure(&lambda);
        let mut rng = substream(0, "prop-components", 0);
        for (i, c) in comps.components.iter().enumerate() {
            for _ in 0..50 {
                let p = c.sample(&mut rng);
                prop_assert_eq!(comps.component_of(p), Some(i));
            }
        }
    }

    #[test]
    fn dilation_ratio_of_dilates(k in body(), lambda in measure(), i in 0usize..4) {
        let c = [0.25, 0.5, 2.0, 8.0][i];
        let l = k.scaled(c);
        let fam = grid_partition(1.2, 1, std::slice::from_ref(&lambda), &[]).unwrap();
        let ae = ae_equal_check(&k, &l, &lambda, &fam, 1);
        prop_assert!(ae.passed());
        let comps = SupportComponents::from_measure(&lambda);
        let r = dilation_component_check(&k, &l, &comps, 50, 3, &ae).unwrap();
        prop_assert!(r.passed());
        for row in &r.table {
            prop_assert_eq!(row.values["spread"], 0.0);
            prop_assert_eq!(row.values["ratio"], 1.0 / c);
        }
    }

    #[test]
    fn ae_directions_agree_on_random_pairs(k in body(), l in body(), seed in any::<u64>()) {
        let lambda = SphericalMeasure::Uniform;
        let fam = grid_partition(1.2, seed, &[], &[]).unwrap();
        let r = ae_equal_check(&k, &l, &lambda, &fam, 1);
        let (max_s, max_m) = (r.margins["max_s"], r.margins["max_m"]);
        // All mass differences vanishing forces all symmetric differences to vanish.
        if max_m <= EPS_MEAS {
            prop_assert!(max_s <= EPS_MEAS);
        }
        if max_s > 0.1 {
            prop_assert!(r.config.contains_key("reverse_witness") && r.margins["reverse_m"] > EPS_MEAS);
        }
        prop_assert!(r.passed() || !r.witnesses.is_empty());
    }

    #[test]
    fn ratio_labels_ignore_common_dilation(k in body(), l in body(), i in 0usize..4) {
        let c = [0.5, 2.0, 3.0, 10.0][i];
        let fam = grid_partition(1.0, 5, &[], &[]).unwrap();
        let a = ratio_partition(&k, &l, &fam, 2);
        let b = ratio_partition(&k.scaled(c), &l.scaled(c), &fam, 2);
        prop_assert_eq!(
            a.iter().map(|x| x.label).collect::<Vec<_>>(),
            b.iter().map(|x| x.label).collect::<Vec<_>>()
        );
    }
}

#[test]
fn dilates_of_the_cube_share_the_simultaneous_map() {
    let (c, c2) = (cube(1.0), cube(2.0));
    let m = gil_core::uniqueness::simultaneous_map(&c, &c2, UnitVec::E3);
    let own = GaussMap::new(&c).reverse_image(&QuerySet::point(UnitVec::E3)).region;
    assert!(m.approx_eq(&own, EPS_GEOM));
}
