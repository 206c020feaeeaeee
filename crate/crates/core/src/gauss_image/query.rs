use serde::{Deserialize, Serialize};

use crate::sphere::{Cap, GeodesicArc, SphericalPolygon, UnitVec};

/// Query set ω: a closed subset of S² built from points, arcs, caps and
/// convex polygons. Caps are taken closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuerySet {
    Point { dir: UnitVec },
    Arc(GeodesicArc),
    Cap(Cap),
    Polygon(SphericalPolygon),
    Sphere,
    Union { parts: Vec<QuerySet> },
}

impl QuerySet {
    pub fn point(u: UnitVec) -> Self {
        QuerySet::Point { dir: u }
    }

    pub fn union(parts: Vec<QuerySet>) -> Self {
        QuerySet::Union { parts }
    }

    pub fn contains(&self, p: UnitVec, tol: f64) -> bool {
        match self {
            QuerySet::Point { dir } => dir.distance(p) <= tol,
            QuerySet::Arc(a) => a.contains(p, tol),
            QuerySet::Cap(c) => c.contains(p, tol),
            QuerySet::Polygon(q) => q.contains(p, tol),
            QuerySet::Sphere => true,
            QuerySet::Union { parts } => parts.iter().any(|q| q.contains(p, tol)),
        }
    }

    pub fn meets_polygon(&self, poly: &SphericalPolygon, tol: f64) -> bool {
        match self {
            QuerySet::Point { dir } => poly.contains(*dir, tol),
            QuerySet::Arc(a) => poly.intersects_arc(a, tol),
            QuerySet::Cap(c) => c.meets_polygon(poly, tol),
            QuerySet::Polygon(q) => q.intersects(poly, tol),
            QuerySet::Sphere => true,
            QuerySet::Union { parts } => parts.iter().any(|q| q.meets_polygon(poly, tol)),
        }
    }

    pub fn meets_arc(&self, arc: &GeodesicArc, tol: f64) -> bool {
        match self {
            QuerySet::Point { dir } => arc.contains(*dir, tol),
            QuerySet::Arc(a) => a.intersects_arc(arc, tol),
            QuerySet::Cap(c) => c.meets_arc(arc, tol),
            QuerySet::Polygon(q) => q.intersects_arc(arc, tol),
            QuerySet::Sphere => true,
            QuerySet::Union { parts } => parts.iter().any(|q| q.meets_arc(arc, tol)),
        }
    }

    /// Topological boundary in S². Points and arcs are their own boundary;
    /// a polygon's boundary is its edge cycle. For unions the boundaries
    /// of the parts are returned, a superset of the boundary of the union.
    /// Caps have no exact arc representation and are rejected.
    pub fn boundary(&self) -> Option<QuerySet> {
        match self {
            QuerySet::Point { .. } | QuerySet::Arc(_) => Some(self.clone()),
            QuerySet::Polygon(q) => Some(QuerySet::union(q.edges().map(QuerySet::Arc).collect())),
            QuerySet::Sphere => Some(QuerySet::union(Vec::new())),
            QuerySet::Cap(_) => None,
            QuerySet::Union { parts } => {
                parts.iter().map(|p| p.boundary()).collect::<Option<Vec<_>>>().map(QuerySet::union)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let q: QuerySet = serde_json::from_str(r#"{"kind":"cap","center":[0,0,1],"radius":0.3}"#).unwrap();
        assert!(matches!(q, QuerySet::Cap(_)));
        let q: QuerySet = serde_json::from_str(r#"{"kind":"point","dir":[0,0,2]}"#).unwrap();
        assert!(q.contains(UnitVec::E3, 1e-15));
        let q: QuerySet = serde_json::from_str(
            r#"{"kind":"union","parts":[{"kind":"sphere"},{"kind":"arc","from":[1,0,0],"to":[0,1,0]}]}"#,
        )
        .unwrap();
        assert!(q.contains(-UnitVec::E3, 0.0));
        assert!(serde_json::from_str::<QuerySet>(r#"{"kind":"cap","center":[0,0,1],"radius":4}"#).is_err());
    }
}
