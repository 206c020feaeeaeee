use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::hull::{convex_hull, cross, HullError, P3};
use super::{BodyError, Polytope};
use crate::sphere::Vec3;

pub type Rational = BigRational;

/// Facet with an unnormalized rational normal: plane `x·normal = offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFacet {
    pub normal: P3<Rational>,
    pub offset: Rational,
    pub ring: Vec<usize>,
}

/// Polytope with rational vertices; every predicate is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPolytope {
    vertices: Vec<P3<Rational>>,
    facets: Vec<ExactFacet>,
}

fn sub(a: &P3<Rational>, b: &P3<Rational>) -> P3<Rational> {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn dot(a: &P3<Rational>, b: &P3<Rational>) -> Rational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rational_from_int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

impl ExactPolytope {
    pub fn from_points(points: &[P3<Rational>]) -> Result<Self, BodyError> {
        let hull = convex_hull(points).map_err(|e| match e {
            HullError::TooFewPoints => BodyError::TooFewPoints,
            HullError::Flat => BodyError::NotFullDimensional,
        })?;
        let mut facets = Vec::with_capacity(hull.facets.len());
        for ring in hull.facets {
            let v = &hull.vertices;
            let n = cross(&sub(&v[ring[1]], &v[ring[0]]), &sub(&v[ring[2]], &v[ring[0]]));
            let h = dot(&n, &v[ring[0]]);
            if !h.is_positive() {
                return Err(BodyError::OriginNotInterior);
            }
            facets.push(ExactFacet { normal: n, offset: h, ring });
        }
        Ok(ExactPolytope { vertices: hull.vertices, facets })
    }

    /// Exact copy of a float polytope's vertex set.
    pub fn from_float(p: &Polytope) -> Result<Self, BodyError> {
        let pts = p
            .vertices()
            .iter()
            .map(|v| {
                let c = |x: f64| rational_from_f64(x).ok_or(BodyError::NonFinite);
                Ok([c(v.x)?, c(v.y)?, c(v.z)?])
            })
            .collect::<Result<Vec<_>, BodyError>>()?;
        Self::from_points(&pts)
    }

    pub fn vertices(&self) -> &[P3<Rational>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[ExactFacet] {
        &self.facets
    }

    /// Polar body: hull of the points `normal / offset`.
    pub fn polar(&self) -> Result<ExactPolytope, BodyError> {
        let pts: Vec<P3<Rational>> = self
            .facets
            .iter()
            .map(|f| [&f.normal[0] / &f.offset, &f.normal[1] / &f.offset, &f.normal[2] / &f.offset])
            .collect();
        Self::from_points(&pts)
    }

    /// Exact equality of vertex sets.
    pub fn same_vertex_set(&self, other: &ExactPolytope) -> bool {
        let mut a = self.vertices.clone();
        let mut b = other.vertices.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// Float polytope with the same combinatorics; planes are normalized
    /// only here.
    pub fn to_float(&self) -> Result<Polytope, BodyError> {
        let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
        let vertices: Vec<Vec3> = self.vertices.iter().map(|p| Vec3::new(f(&p[0]), f(&p[1]), f(&p[2]))).collect();
        let planes = self
            .facets
            .iter()
            .map(|fc| {
                let n = Vec3::new(f(&fc.normal[0]), f(&fc.normal[1]), f(&fc.normal[2]));
                let len = n.norm();
                (n / len, f(&fc.offset) / len)
            })
            .collect();
        let rings = self.facets.iter().map(|fc| fc.ring.clone()).collect();
        Polytope::assemble(vertices, rings, planes)
    }
}
