//! The radial Gauss image map `α_K` of a polytope and its reverse `α*_K`.
//!
//! A boundary point hit by the ray through `u` lies in the relative
//! interior of exactly one face, so `α_K(ω)` is the union of the normal
//! cones of the faces whose radial projections meet `ω`: facet normals,
//! arcs between the two facet normals of an edge, and vertex cones.

mod query;

pub use query::QuerySet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::Polytope;
use crate::report::{CheckReport, Witness};
use crate::sphere::{
    hausdorff_distance, spherical_hull, Cap, GeodesicArc, SphereError, SphericalPolygon, SphericalRegion, UnitVec,
    Vec3, EPS_GEOM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussError {
    #[error("point is not on the boundary of the body (residual {0:e})")]
    NotOnBoundary(f64),
    #[error("query set has no exact boundary representation")]
    UnsupportedBoundary,
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

/// Which face of the body each stratum comes from, aligned with the
/// point, arc and polygon lists of the region.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub facets: Vec<usize>,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GaussImageValue {
    pub region: SphericalRegion,
    pub provenance: Provenance,
}

/// A polytope with its radial projection complex and normal-fan strata
/// precomputed.
#[derive(Clone, Debug)]
pub struct GaussMap {
    body: Polytope,
    facet_proj: Vec<SphericalPolygon>,
    edge_proj: Vec<GeodesicArc>,
    edge_normals: Vec<GeodesicArc>,
    vertex_cones: Vec<SphericalPolygon>,
}

impl GaussMap {
    pub fn new(body: &Polytope) -> Self {
        let dirs = body.vertex_dirs();
        let facet_proj = body
            .facets()
            .iter()
            .map(|f| {
                SphericalPolygon::new(f.ring.iter().map(|&i| dirs[i]).collect())
                    .expect("facet projections are convex polygons")
            })
            .collect();
        let edge_proj = body
            .edges()
            .iter()
            .map(|e| GeodesicArc::new(dirs[e.a], dirs[e.b]).expect("edge directions are not antipodal"))
            .collect();
        let edge_normals = body
            .edges()
            .iter()
            .map(|e| {
                let [f, g] = e.facets;
                GeodesicArc::new(body.facets()[f].normal, body.facets()[g].normal)
                    .expect("adjacent facet normals are not antipodal")
            })
            .collect();
        let vertex_cones = (0..body.vertices().len()).map(|i| body.vertex_cone(i)).collect();
        GaussMap { body: body.clone(), facet_proj, edge_proj, edge_normals, vertex_cones }
    }

    pub fn body(&self) -> &Polytope {
        &self.body
    }

    pub fn facet_projections(&self) -> &[SphericalPolygon] {
        &self.facet_proj
    }

    pub fn vertex_cones(&self) -> &[SphericalPolygon] {
        &self.vertex_cones
    }

    /// `α_K(ω)`.
    pub fn image(&self, omega: &QuerySet) -> GaussImageValue {
        let mut out = GaussImageValue::default();
        for (i, p) in self.facet_proj.iter().enumerate() {
            if omega.meets_polygon(p, EPS_GEOM) {
                out.region.points.push(self.body.facets()[i].normal);
                out.provenance.facets.push(i);
            }
        }
        for (i, a) in self.edge_proj.iter().enumerate() {
            if omega.meets_arc(a, EPS_GEOM) {
                out.region.arcs.push(self.edge_normals[i]);
                out.provenance.edges.push(i);
            }
        }
        for (i, d) in self.body.vertex_dirs().iter().enumerate() {
            if omega.contains(*d, EPS_GEOM) {
                out.region.polygons.push(self.vertex_cones[i].clone());
                out.provenance.vertices.push(i);
            }
        }
        out
    }

    /// `α*_K(ω)`: directions of boundary points having an outer normal in
    /// `ω`.
    pub fn reverse_image(&self, omega: &QuerySet) -> GaussImageValue {
        let mut out = GaussImageValue::default();
        for (i, f) in self.body.facets().iter().enumerate() {
            if omega.contains(f.normal, EPS_GEOM) {
                out.region.polygons.push(self.facet_proj[i].clone());
                out.provenance.facets.push(i);
            }
        }
        for (i, a) in self.edge_normals.iter().enumerate() {
            if omega.meets_arc(a, EPS_GEOM) {
                out.region.arcs.push(self.edge_proj[i]);
                out.provenance.edges.push(i);
            }
        }
        for (i, c) in self.vertex_cones.iter().enumerate() {
            if omega.meets_polygon(c, EPS_GEOM) {
                out.region.points.push(self.body.vertex_dirs()[i]);
                out.provenance.vertices.push(i);
            }
        }
        out
    }

    /// `α_K(u)` for a single direction.
    pub fn image_of_point(&self, u: UnitVec) -> SphericalRegion {
        self.image(&QuerySet::point(u)).region
    }
}

/// `N(K, x)` for a boundary point `x`.
pub fn normal_cone(k: &Polytope, x: Vec3) -> Result<SphericalRegion, GaussError> {
    let tol = EPS_GEOM * k.scale().max(1.0);
    let residuals: Vec<f64> = k.facets().iter().map(|f| f.normal.vec().dot(x) - f.offset).collect();
    let worst = residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if worst.abs() > tol {
        return Err(GaussError::NotOnBoundary(worst));
    }
    let active: Vec<UnitVec> =
        k.facets().iter().zip(&residuals).filter(|(_, r)| r.abs() <= tol).map(|(f, _)| f.normal).collect();
    Ok(match active.as_slice() {
        [n] => SphericalRegion::from_point(*n),
        [a, b] => SphericalRegion::from_arc(GeodesicArc::new(*a, *b)?),
        _ => SphericalRegion::from_polygon(spherical_hull(&active)?),
    })
}

/// `α_K(ω)`.
pub fn gauss_image(k: &Polytope, omega: &QuerySet) -> GaussImageValue {
    GaussMap::new(k).image(omega)
}

/// `α*_K(ω)`, computed from its definition.
pub fn reverse_gauss_image(k: &Polytope, omega: &QuerySet) -> GaussImageValue {
    GaussMap::new(k).reverse_image(omega)
}

/// Offsets used to decide whether a point of a region is interior.
fn is_interior(region: &SphericalRegion, p: UnitVec, delta: f64) -> bool {
    let e1 = p.vec().any_orthonormal();
    let e2 = p.vec().cross(e1);
    (0..8).all(|k| {
        let phi = k as f64 * std::f64::consts::FRAC_PI_4;
        let q = p.vec() + (e1 * phi.cos() + e2 * phi.sin()) * delta;
        UnitVec::from_vec3(q).is_ok_and(|q| region.contains(q, 0.0))
    })
}

/// Points of the topological boundary of `region`, about `samples` of
/// them spread along the candidate curves.
pub fn boundary_samples(region: &SphericalRegion, samples: usize) -> Vec<UnitVec> {
    let mut curves: Vec<GeodesicArc> = region.arcs.clone();
    for p in &region.polygons {
        curves.extend(p.edges());
    }
    let total: f64 = curves.iter().map(|c| c.length()).sum();
    let spacing = if total > 0.0 { total / samples.max(1) as f64 } else { 1.0 };
    let delta = 1e-7;
    let mut out: Vec<UnitVec> = region.points.iter().copied().filter(|p| !is_interior(region, *p, delta)).collect();
    for c in &curves {
        for p in c.sample(spacing) {
            if !is_interior(region, p, delta) {
                out.push(p);
            }
        }
    }
    out
}

/// Checks `∂α_K(ω) ⊂ α_K(∂ω)` on sampled boundary points.
pub fn boundary_inclusion_check(k: &Polytope, omega: &QuerySet, samples: usize) -> Result<CheckReport, GaussError> {
    let map = GaussMap::new(k);
    let image = map.image(omega).region;
    let bd = omega.boundary().ok_or(GaussError::UnsupportedBoundary)?;
    let bd_image = map.image(&bd).region;
    let pts = boundary_samples(&image, samples);
    let mut report = CheckReport::new("prop-3.2-boundary-inclusion");
    let mut worst: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        let d = bd_image.distance_to(*p);
        if d > EPS_GEOM {
            report.witnesses.push(
                Witness::new(format!("boundary-sample-{i}"))
                    .with("distance", d)
                    .with("x", p.vec().x)
                    .with("y", p.vec().y)
                    .with("z", p.vec().z),
            );
        }
        worst = worst.max(if d.is_finite() { d } else { std::f64::consts::PI });
    }
    report.margin("max_violation", worst);
    report.margin("samples", pts.len() as f64);
    report.margin("tolerance", EPS_GEOM);
    Ok(report.conclude(worst <= EPS_GEOM))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub delta: f64,
    pub distance: f64,
}

/// `d_H(α_K(ū_δ), α_K(u))` for each `δ`, at Hausdorff resolution `res`.
pub fn continuity_probe(k: &Polytope, u: UnitVec, deltas: &[f64], res: f64) -> Result<Vec<ProbeRow>, GaussError> {
    let map = GaussMap::new(k);
    let base = map.image_of_point(u);
    deltas
        .iter()
        .map(|&delta| {
            let cap = Cap::new(u, delta)?;
            let img = map.image(&QuerySet::Cap(cap)).region;
            let distance = hausdorff_distance(&img, &base, res)?;
            Ok(ProbeRow { delta, distance })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::generate::{cross_polytope, cube};
    use std::f64::consts::PI;

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    fn octant() -> SphericalPolygon {
        SphericalPolygon::new(vec![UnitVec::E1, UnitVec::E2, UnitVec::E3]).unwrap()
    }

    #[test]
    fn normal_cone_examples() {
        let c = cube(1.0);
        let r = normal_cone(&c, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(r.approx_eq(&SphericalRegion::from_point(UnitVec::E3), 1e-15));
        let r = normal_cone(&c, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        assert!(r.approx_eq(&SphericalRegion::from_polygon(octant()), 1e-15));
        let r = normal_cone(&c, Vec3::new(1.0, 1.0, 0.0)).unwrap();
        let arc = GeodesicArc::new(UnitVec::E1, UnitVec::E2).unwrap();
        assert!(r.approx_eq(&SphericalRegion::from_arc(arc), 1e-15));
        assert!(matches!(normal_cone(&c, Vec3::new(0.0, 0.0, 0.5)), Err(GaussError::NotOnBoundary(_))));
    }

    #[test]
    fn gauss_image_examples() {
        let c = cube(1.0);
        let img = gauss_image(&c, &QuerySet::point(UnitVec::E3)).region;
        assert!(img.approx_eq(&SphericalRegion::from_point(UnitVec::E3), 0.0));
        let img = gauss_image(&c, &QuerySet::point(u(1.0, 1.0, 1.0))).region.dedup(1e-12);
        // The octant itself, plus its three edges and three corners.
        assert_eq!(img.polygons.len(), 1);
        assert!(img.polygons[0].approx_eq(&octant(), 1e-15));
        assert!((img.area() - PI / 2.0).abs() < 1e-12);
        let cap = QuerySet::Cap(Cap::new(UnitVec::E3, PI / 8.0).unwrap());
        let img = gauss_image(&c, &cap).region;
        assert!(img.approx_eq(&SphericalRegion::from_point(UnitVec::E3), 0.0));
    }

    #[test]
    fn reverse_examples() {
        let c = cube(1.0);
        let r = reverse_gauss_image(&c, &QuerySet::point(UnitVec::E3)).region;
        let square =
            SphericalPolygon::new(vec![u(1.0, 1.0, 1.0), u(-1.0, 1.0, 1.0), u(-1.0, -1.0, 1.0), u(1.0, -1.0, 1.0)])
                .unwrap();
        assert_eq!(r.polygons.len(), 1);
        assert!(r.polygons[0].approx_eq(&square, 1e-15));
        let dual = gauss_image(&cross_polytope(1.0), &QuerySet::point(UnitVec::E3)).region;
        assert!(r.approx_eq(&dual, EPS_GEOM));
        let r2 = reverse_gauss_image(&cube(2.0), &QuerySet::point(UnitVec::E3)).region;
        assert!(r2.approx_eq(&r, 0.0));
        let all = reverse_gauss_image(&c, &QuerySet::Sphere).region;
        assert!((all.area() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn boundary_inclusion_examples() {
        let c = cube(1.0);
        let sq =
            SphericalPolygon::new(vec![u(0.5, 0.5, 1.0), u(-0.5, 0.5, 1.0), u(-0.5, -0.5, 1.0), u(0.5, -0.5, 1.0)])
                .unwrap();
        assert!(boundary_inclusion_check(&c, &QuerySet::Polygon(sq), 200).unwrap().passed());
        let vertex = QuerySet::point(u(1.0, 1.0, 1.0));
        assert!(boundary_inclusion_check(&c, &vertex, 200).unwrap().passed());
    }

    #[test]
    fn continuity_at_vertex_direction() {
        let rows = continuity_probe(&cube(1.0), u(1.0, 1.0, 1.0), &[0.3, 0.1, 0.01], 1e-3).unwrap();
        assert!(rows.iter().all(|r| r.distance <= 1e-3));
    }
}
