//! The harmonic mean path `K +̂ₜ L = ((1−t)K* + tL*)*` and the checks built
//! on it: endpoint and union identities of its Gauss images, Lipschitz
//! bounds in `t`, and the sweep inclusion used in the uniqueness proof.

use rand::{Rng, RngExt};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::{convex_combination, BodyError, Polytope};
use crate::gauss_image::{GaussImageValue, GaussMap, QuerySet};
use crate::report::{CheckReport, Witness};
use crate::rng::substream;
use crate::sphere::{
    hausdorff::directed_hausdorff, hausdorff_distance, project, spherical_hull, Cap, SphereError, SphericalPolygon,
    SphericalRegion, UnitVec, Vec3, EPS_GEOM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VariationError {
    #[error("inputs are {half_gap:.6} rad from their midpoint, more than the allowed {limit:.6}")]
    HemisphereViolation { half_gap: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

fn check_t(t: f64) -> Result<(), VariationError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(VariationError::InvalidParameter(format!("t = {t} is outside [0, 1]")))
    }
}

/// `K +̂ₜ L`. The endpoints return the inputs themselves.
pub fn harmonic_mean(k: &Polytope, l: &Polytope, t: f64) -> Result<Polytope, VariationError> {
    check_t(t)?;
    harmonic_from_polars(k, l, &k.polar()?, &l.polar()?, t)
}

fn harmonic_from_polars(
    k: &Polytope,
    l: &Polytope,
    kp: &Polytope,
    lp: &Polytope,
    t: f64,
) -> Result<Polytope, VariationError> {
    if t == 0.0 {
        return Ok(k.clone());
    }
    if t == 1.0 {
        return Ok(l.clone());
    }
    Ok(convex_combination(kp, lp, t)?.polar()?)
}

/// Bodies and Gauss maps of the harmonic path on a fixed `t` grid.
#[derive(Clone, Debug)]
pub struct HarmonicPath {
    k: Polytope,
    l: Polytope,
    t_grid: Vec<f64>,
    maps: Vec<GaussMap>,
}

impl HarmonicPath {
    pub fn new(k: &Polytope, l: &Polytope, t_grid: Vec<f64>) -> Result<Self, VariationError> {
        for t in &t_grid {
            check_t(*t)?;
        }
        if t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VariationError::InvalidParameter("t grid must be increasing".into()));
        }
        let kp = k.polar()?;
        let lp = l.polar()?;
        let maps = t_grid
            .par_iter()
            .map(|&t| harmonic_from_polars(k, l, &kp, &lp, t).map(|m| GaussMap::new(&m)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HarmonicPath { k: k.clone(), l: l.clone(), t_grid, maps })
    }

    /// Grid `i/(n−1)`, `i = 0..n`.
    pub fn uniform(k: &Polytope, l: &Polytope, n: usize) -> Result<Self, VariationError> {
        if n < 2 {
            return Err(VariationError::InvalidParameter(format!("need at least 2 grid points, got {n}")));
        }
        Self::new(k, l, (0..n).map(|i| i as f64 / (n - 1) as f64).collect())
    }

    pub fn k(&self) -> &Polytope {
        &self.k
    }

    pub fn l(&self) -> &Polytope {
        &self.l
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn bodies(&self) -> impl Iterator<Item = &Polytope> {
        self.maps.iter().map(|m| m.body())
    }

    pub fn maps(&self) -> &[GaussMap] {
        &self.maps
    }

    /// `α_{K+̂ₜL}(ω)` at every grid point.
    pub fn images(&self, omega: &QuerySet) -> Vec<SphericalRegion> {
        self.maps.par_iter().map(|m| m.image(omega).region).collect()
    }
}

/// `α_{K+̂ₜL}(ω)`.
pub fn variation_image(
    k: &Polytope,
    l: &Polytope,
    t: f64,
    omega: &QuerySet,
) -> Result<GaussImageValue, VariationError> {
    Ok(GaussMap::new(&harmonic_mean(k, l, t)?).image(omega))
}

/// `(2/sin α)·max(‖u₁‖/‖u₂‖, ‖u₂‖/‖u₁‖)`, the Lipschitz constant of
/// `t ↦ P((1−t)u₁ + tu₂)` when both directions lie in a cap of radius
/// `π/2 − α`.
pub fn geodesic_lipschitz_bound(u1: Vec3, u2: Vec3, alpha: f64) -> Result<f64, VariationError> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_2) {
        return Err(VariationError::InvalidParameter(format!("alpha = {alpha} is outside (0, π/2]")));
    }
    let d1 = project(u1)?;
    let d2 = project(u2)?;
    // Two points fit in a cap of radius ρ iff half their distance is ≤ ρ.
    let half_gap = d1.distance(d2) / 2.0;
    let limit = std::f64::consts::FRAC_PI_2 - alpha;
    if half_gap > limit + 1e-12 {
        return Err(VariationError::HemisphereViolation { half_gap, limit });
    }
    let (a, b) = (u1.norm(), u2.norm());
    Ok(2.0 / alpha.sin() * (a / b).max(b / a))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCheck {
    pub bound: f64,
    pub max_ratio: f64,
}

impl GridCheck {
    pub fn holds(&self) -> bool {
        self.max_ratio <= self.bound
    }
}

/// Largest `d(g(t₁), g(t₂))/|t₁−t₂|` over a `points`-point grid, next to
/// the bound. Consecutive pairs suffice: the triangle inequality caps the
/// ratio of any wider pair by the largest consecutive one.
pub fn geodesic_lipschitz_grid(u1: Vec3, u2: Vec3, alpha: f64, points: usize) -> Result<GridCheck, VariationError> {
    let bound = geodesic_lipschitz_bound(u1, u2, alpha)?;
    if points < 2 {
        return Err(VariationError::InvalidParameter(format!("need at least 2 grid points, got {points}")));
    }
    let g = |t: f64| project(u1 * (1.0 - t) + u2 * t);
    let step = 1.0 / (points - 1) as f64;
    let mut prev = g(0.0)?;
    let mut max_ratio: f64 = 0.0;
    for i in 1..points {
        let cur = g(i as f64 * step)?;
        max_ratio = max_ratio.max(prev.distance(cur) / step);
        prev = cur;
    }
    Ok(GridCheck { bound, max_ratio })
}

/// A random admissible input for the geodesic bound: `α`, a center `v`,
/// and two vectors of random length whose directions lie within
/// `π/2 − α` of `v`.
pub fn random_geodesic_triple<R: Rng + ?Sized>(rng: &mut R) -> (Vec3, Vec3, f64) {
    let alpha = rng.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05);
    let v = crate::sphere::sample_sphere(rng);
    let cap = Cap::new(v, std::f64::consts::FRAC_PI_2 - alpha).expect("radius in range");
    let u1 = cap.sample(rng).vec() * rng.random_range(0.1..10.0);
    let u2 = cap.sample(rng).vec() * rng.random_range(0.1..10.0);
    (u1, u2, alpha)
}

/// `2·max(R_K/r_K, R_L/r_L)·max(R_K/r_L, R_L/r_K)`: the Lipschitz constant
/// of `t ↦ α_{K+̂ₜL}(ω)` in the Hausdorff distance.
pub fn radii_bound(k: &Polytope, l: &Polytope) -> f64 {
    let a = k.radii();
    let b = l.radii();
    2.0 * (a.big_r / a.r).max(b.big_r / b.r) * (a.big_r / b.r).max(b.big_r / a.r)
}

/// One consecutive pair of a Lipschitz scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub d_h: f64,
    pub ratio: f64,
    pub bound: f64,
}

fn region_distance(a: &SphericalRegion, b: &SphericalRegion, res: f64) -> Result<f64, VariationError> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ok(0.0),
        (false, false) => Ok(hausdorff_distance(a, b, res)?),
        _ => Ok(std::f64::consts::PI),
    }
}

/// Hausdorff distances between Gauss images at consecutive points of a
/// uniform `t` grid, against the radii bound. Passes iff every ratio is at
/// most `bound + res/Δt`.
pub fn lipschitz_scan(
    k: &Polytope,
    l: &Polytope,
    omega: &QuerySet,
    t_count: usize,
    res: f64,
) -> Result<(CheckReport, Vec<ScanRow>), VariationError> {
    if t_count < 2 {
        return Err(VariationError::InvalidParameter(format!("t_count must be at least 2, got {t_count}")));
    }
    let path = HarmonicPath::uniform(k, l, t_count)?;
    let images = path.images(omega);
    let dt = 1.0 / (t_count - 1) as f64;
    let bound = radii_bound(k, l);
    let distances = (0..t_count - 1)
        .into_par_iter()
        .map(|i| region_distance(&images[i], &images[i + 1], res))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<ScanRow> = distances
        .iter()
        .enumerate()
        .map(|(i, &d_h)| ScanRow { t: path.t_grid()[i], d_h, ratio: d_h / dt, bound })
        .collect();

    let slack = res / dt;
    let mut report = CheckReport::new("prop-3.7-lipschitz");
    report.config("t_count", t_count);
    report.config("resolution", res);
    let mut max_ratio: f64 = 0.0;
    for r in &rows {
        max_ratio = max_ratio.max(r.ratio);
        if r.ratio > bound + slack {
            report.witnesses.push(
                Witness::new(format!("t-{:.6}", r.t)).with("d_h", r.d_h).with("ratio", r.ratio).with("bound", bound),
            );
        }
    }
    report.margin("max_ratio", max_ratio);
    report.margin("bound", bound);
    report.margin("slack", slack);
    report.margin("headroom", bound + slack - max_ratio);
    let pass = report.witnesses.is_empty();
    Ok((report.conclude(pass), rows))
}

/// Draws a point uniformly from a union of disjoint polygons.
fn sample_pieces<R: Rng + ?Sized>(rng: &mut R, pieces: &[SphericalPolygon], areas: &[f64], total: f64) -> UnitVec {
    let mut x = rng.random::<f64>() * total;
    let mut idx = pieces.len() - 1;
    for (i, a) in areas.iter().enumerate() {
        if x < *a {
            idx = i;
            break;
        }
        x -= a;
    }
    let (c, r) = pieces[idx].bounding_cap();
    let cap = Cap::new(c, r.clamp(1e-9, std::f64::consts::PI - 1e-9)).expect("radius in range");
    loop {
        let p = cap.sample(rng);
        if pieces[idx].contains(p, 0.0) {
            return p;
        }
    }
}

fn polygon_minus(a: &[SphericalPolygon], b: &[SphericalPolygon]) -> Vec<SphericalPolygon> {
    let mut frags = a.to_vec();
    for q in b {
        frags = frags.iter().flat_map(|f| f.difference(q)).collect();
    }
    frags
}

/// Points of `α_K(γ) △ α_L(γ) \ (α_K(∂γ) ∪ α_L(∂γ))`: area-weighted
/// samples of the two-dimensional part, plus the isolated point strata.
pub fn sweep_left_samples(
    k: &Polytope,
    l: &Polytope,
    gamma: &SphericalPolygon,
    samples: usize,
    seed: u64,
) -> Vec<UnitVec> {
    let (mk, ml) = (GaussMap::new(k), GaussMap::new(l));
    let omega = QuerySet::Polygon(gamma.clone());
    let bd = omega.boundary().expect("polygons have a boundary");
    let a = mk.image(&omega).region;
    let b = ml.image(&omega).region;
    let rim = mk.image(&bd).region.union(ml.image(&bd).region);
    let keep = |p: UnitVec| a.contains(p, EPS_GEOM) != b.contains(p, EPS_GEOM) && !rim.contains(p, EPS_GEOM);

    let pa = a.disjoint_pieces();
    let pb = b.disjoint_pieces();
    let mut pieces = polygon_minus(&pa, &pb);
    pieces.extend(polygon_minus(&pb, &pa));
    let areas: Vec<f64> = pieces.iter().map(|p| p.area()).collect();
    let total: f64 = areas.iter().sum();

    let mut out: Vec<UnitVec> = a.points.iter().chain(&b.points).copied().filter(|p| keep(*p)).collect();
    if total > crate::sphere::EPS_GEOM {
        let mut rng = substream(seed, "sweep-samples", 0);
        let mut tries = 0;
        while out.len() < samples && tries < 100 * samples {
            tries += 1;
            let p = sample_pieces(&mut rng, &pieces, &areas, total);
            if keep(p) {
                out.push(p);
            }
        }
    }
    out
}

/// Checks `α_K(γ) △ α_L(γ) \ (α_K(∂γ) ∪ α_L(∂γ)) ⊂ ⋃_{0<t<1} α_{K+̂ₜL}(∂γ)`
/// on sampled points, with `t = i/t_count` for `0 < i < t_count`. A point
/// counts as covered when it lies within the grid error
/// `radii_bound/t_count + res` of some sampled image.
pub fn sweep_inclusion_check(
    k: &Polytope,
    l: &Polytope,
    gamma: &SphericalPolygon,
    t_count: usize,
    samples: usize,
    seed: u64,
    res: f64,
) -> Result<CheckReport, VariationError> {
    if t_count < 2 {
        return Err(VariationError::InvalidParameter(format!("t_count must be at least 2, got {t_count}")));
    }
    let left = sweep_left_samples(k, l, gamma, samples, seed);
    let bound = radii_bound(k, l);
    let threshold = bound / t_count as f64 + res;

    let mut report = CheckReport::new("lemma-5.5-sweep");
    report.config("t_count", t_count);
    report.config("samples", samples);
    report.config("seed", seed);
    report.config("resolution", res);
    report.margin("left_points", left.len() as f64);
    report.margin("threshold", threshold);
    if left.is_empty() {
        report.margin("worst_miss", 0.0);
        return Ok(report.conclude(true));
    }

    let grid: Vec<f64> = (1..t_count).map(|i| i as f64 / t_count as f64).collect();
    let path = HarmonicPath::new(k, l, grid)?;
    let bd = QuerySet::Polygon(gamma.clone()).boundary().expect("polygons have a boundary");
    let sweep = path.images(&bd);
    let misses: Vec<f64> = left
        .par_iter()
        .map(|p| {
            let mut best = f64::INFINITY;
            for img in &sweep {
                best = best.min(img.distance_to(*p));
                if best <= EPS_GEOM {
                    break;
                }
            }
            best
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, (p, m)) in left.iter().zip(&misses).enumerate() {
        worst = worst.max(*m);
        if *m >= threshold {
            let v = p.vec();
            report.witnesses.push(
                Witness::new(format!("sample-{i}")).with("miss", *m).with("x", v.x).with("y", v.y).with("z", v.z),
            );
        }
    }
    report.margin("worst_miss", worst);
    let pass = report.witnesses.is_empty();
    Ok(report.conclude(pass))
}

/// Path union identity at a single direction `u`: the union over sampled `t` of
/// `α_{K+̂ₜL}(u)` against the union of geodesic means of `α_K(u)` and
/// `α_L(u)`. For convex sets in an open hemisphere the latter is the
/// spherical hull of both, closed up. The sampled union must lie within
/// `res` of the hull, and the hull within `res` plus half the Lipschitz
/// step `radii_bound·Δt` of the sampled union.
pub fn path_union_check(
    k: &Polytope,
    l: &Polytope,
    u: UnitVec,
    t_samples: usize,
    res: f64,
) -> Result<CheckReport, VariationError> {
    let path = HarmonicPath::uniform(k, l, t_samples)?;
    let omega = QuerySet::point(u);
    let mut lhs = SphericalRegion::empty();
    for img in path.images(&omega) {
        lhs.extend(img);
    }
    let lhs = lhs.dedup(1e-12);

    let mut corners: Vec<UnitVec> = Vec::new();
    for r in [path.maps()[0].image_of_point(u), path.maps()[t_samples - 1].image_of_point(u)] {
        corners.extend(&r.points);
        corners.extend(r.arcs.iter().flat_map(|a| [a.start(), a.end()]));
        corners.extend(r.polygons.iter().flat_map(|p| p.vertices().iter().copied()));
    }
    let rhs = geodesic_join(&corners)?;
    let inner = directed_hausdorff(&lhs, &rhs, res)?;
    let outer = directed_hausdorff(&rhs, &lhs, res)?;
    let gap = radii_bound(k, l) / (t_samples - 1) as f64 / 2.0;
    let mut report = CheckReport::new("prop-3.5-path-union");
    report.config("t_samples", t_samples);
    report.config("resolution", res);
    report.margin("sampled_to_hull", inner);
    report.margin("hull_to_sampled", outer);
    report.margin("sampling_gap", gap);
    Ok(report.conclude(inner <= res && outer <= res + gap))
}

/// Union of the geodesic segments between the given points: their
/// spherical hull, or the longest arc or a point when they are collinear.
fn geodesic_join(corners: &[UnitVec]) -> Result<SphericalRegion, VariationError> {
    if let Ok(p) = spherical_hull(corners) {
        return Ok(SphericalRegion::from_polygon(p));
    }
    let mut far = (corners[0], corners[0], 0.0);
    for a in corners {
        for b in corners {
            let d = a.distance(*b);
            if d > far.2 {
                far = (*a, *b, d);
            }
        }
    }
    if far.2 <= EPS_GEOM {
        return Ok(SphericalRegion::from_point(far.0));
    }
    let arc = crate::sphere::GeodesicArc::new(far.0, far.1)?;
    if corners.iter().all(|c| arc.contains(*c, EPS_GEOM)) {
        Ok(SphericalRegion::from_arc(arc))
    } else {
        Err(SphereError::NotInHemisphere.into())
    }
}

/// Endpoint identities: `α_{K+̂₀L}(ω) = α_K(ω)` and `α_{K+̂₁L}(ω) = α_L(ω)`
/// as exact stratified regions.
pub fn endpoint_identities_hold(k: &Polytope, l: &Polytope, omega: &QuerySet) -> Result<bool, VariationError> {
    let at0 = variation_image(k, l, 0.0, omega)?.region;
    let at1 = variation_image(k, l, 1.0, omega)?.region;
    Ok(at0 == GaussMap::new(k).image(omega).region && at1 == GaussMap::new(l).image(omega).region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::generate::{cross_polytope, cube, random_polytope};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    #[test]
    fn dilate_path_with_near_duplicate_polar_vertices() {
        // The polar of this body has two vertices about 5e-7 apart, and the
        // Minkowski sum puts many points within rounding of its edges.
        let k = random_polytope(10, 10993451854196517420).unwrap();
        let m = harmonic_mean(&k, &k.scaled(0.2), 0.2).unwrap();
        assert_eq!(m.vertices().len(), k.vertices().len());
        assert!(m.vertex_set_distance(&k.scaled(1.0 / 1.8)) < 1e-9);
    }

    #[test]
    fn idempotent_and_scaling() {
        let c = cube(1.0);
        for t in [0.0, 0.3, 0.5, 1.0] {
            assert!(harmonic_mean(&c, &c, t).unwrap().vertex_set_distance(&c) < 1e-9);
        }
        let m = harmonic_mean(&c, &cube(3.0), 0.5).unwrap();
        assert!(m.vertex_set_distance(&cube(1.5)) < 1e-9);
    }

    #[test]
    fn dual_support_is_averaged() {
        let c = cube(1.0);
        let x = cross_polytope(1.0);
        let m = harmonic_mean(&c, &x, 0.5).unwrap().polar().unwrap();
        let (cp, xp) = (c.polar().unwrap(), x.polar().unwrap());
        let mut rng = substream(5, "test", 0);
        for _ in 0..1000 {
            let v = crate::sphere::sample_sphere(&mut rng).vec();
            let want = 0.5 * cp.support(v) + 0.5 * xp.support(v);
            assert_abs_diff_eq!(m.support(v), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn endpoints_are_exact() {
        let c = cube(1.0);
        let x = cross_polytope(2.0);
        let omega = QuerySet::Cap(Cap::new(u(1.0, 0.2, 0.4), 0.6).unwrap());
        assert!(endpoint_identities_hold(&c, &x, &omega).unwrap());
        assert!(harmonic_mean(&c, &x, 1.5).is_err());
    }

    #[test]
    fn geodesic_bound_examples() {
        let e1 = Vec3::X;
        let e2 = Vec3::Y;
        let g = geodesic_lipschitz_grid(Vec3::Z, Vec3::Z, 0.3, 1000).unwrap();
        assert_eq!(g.max_ratio, 0.0);
        let g = geodesic_lipschitz_grid(e1, e2, FRAC_PI_4, 1000).unwrap();
        assert_abs_diff_eq!(g.bound, 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        // The speed of t ↦ P((1−t)e₁ + te₂) is 1/((1−t)² + t²), largest at t = 1/2.
        assert_abs_diff_eq!(g.max_ratio, 2.0, epsilon = 1e-5);
        let g = geodesic_lipschitz_grid(e1, e2 * 3.0, FRAC_PI_4, 1000).unwrap();
        assert_abs_diff_eq!(g.bound, 6.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert!(g.holds());
        assert!(matches!(geodesic_lipschitz_bound(e1, e2, PI / 3.0), Err(VariationError::HemisphereViolation { .. })));
    }

    #[test]
    fn radii_bound_cube_cross() {
        assert_abs_diff_eq!(radii_bound(&cube(1.0), &cross_polytope(2.0)), 4.0 * 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn scan_of_dilates_is_flat() {
        let omega = QuerySet::Cap(Cap::new(u(0.3, 0.1, 1.0), 0.5).unwrap());
        let (r, rows) = lipschitz_scan(&cube(1.0), &cube(3.0), &omega, 20, 1e-3).unwrap();
        assert!(r.passed());
        assert!(rows.iter().all(|r| r.d_h <= 1e-3));
    }

    #[test]
    fn sweep_is_vacuous_for_dilates() {
        let gamma =
            SphericalPolygon::new(vec![u(1.0, 1.0, 1.0), u(-1.0, 1.0, 1.0), u(-1.0, -1.0, 1.0), u(1.0, -1.0, 1.0)])
                .unwrap();
        let r = sweep_inclusion_check(&cube(1.0), &cube(2.0), &gamma, 50, 100, 1, 1e-3).unwrap();
        assert!(r.passed());
        assert_eq!(r.margins["left_points"], 0.0);
    }
}
