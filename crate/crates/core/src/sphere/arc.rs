use serde::{Deserialize, Serialize};

use super::{SphereError, UnitVec, Vec3, EPS_NORM};

/// Minor great-circle arc between two non-antipodal points.
///
/// Coincident endpoints are allowed; such an arc is a single point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArcRepr", into = "ArcRepr")]
pub struct GeodesicArc {
    a: UnitVec,
    b: UnitVec,
}

#[derive(Serialize, Deserialize)]
struct ArcRepr {
    from: UnitVec,
    to: UnitVec,
}

impl TryFrom<ArcRepr> for GeodesicArc {
    type Error = SphereError;
    fn try_from(r: ArcRepr) -> Result<Self, SphereError> {
        GeodesicArc::new(r.from, r.to)
    }
}

impl From<GeodesicArc> for ArcRepr {
    fn from(a: GeodesicArc) -> Self {
        ArcRepr { from: a.a, to: a.b }
    }
}

impl GeodesicArc {
    pub fn new(a: UnitVec, b: UnitVec) -> Result<Self, SphereError> {
        if a.dot(b) <= -1.0 + EPS_NORM {
            return Err(SphereError::AntipodalInput);
        }
        Ok(GeodesicArc { a, b })
    }

    pub fn start(&self) -> UnitVec {
        self.a
    }

    pub fn end(&self) -> UnitVec {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    /// Unit normal of the supporting great circle, `None` when degenerate.
    pub fn pole(&self) -> Option<Vec3> {
        self.a.vec().cross(self.b.vec()).try_normalize(1e-15)
    }

    pub fn is_degenerate(&self) -> bool {
        self.length() < EPS_NORM
    }

    /// Point at arc-length fraction `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> UnitVec {
        let theta = self.length();
        if theta < 1e-12 {
            return self.a;
        }
        let (a, b) = (self.a.vec(), self.b.vec());
        let w0 = ((1.0 - s) * theta).sin();
        let w1 = (s * theta).sin();
        let v = a * w0 + b * w1;
        UnitVec::from_vec3(v).unwrap_or(self.a)
    }

    pub fn midpoint(&self) -> UnitVec {
        self.point_at(0.5)
    }

    /// Points along the arc spaced at most `res` apart, endpoints included.
    pub fn sample(&self, res: f64) -> Vec<UnitVec> {
        let n = ((self.length() / res).ceil() as usize).max(1);
        (0..=n).map(|i| self.point_at(i as f64 / n as f64)).collect()
    }

    /// Exact distance from `p` to the closed arc.
    pub fn distance_to(&self, p: UnitVec) -> f64 {
        let pv = p.vec();
        let end_d = p.distance(self.a).min(p.distance(self.b));
        let Some(n) = self.pole() else {
            return end_d;
        };
        let off = pv.dot(n);
        let proj = pv - n * off;
        let pn = proj.norm();
        if pn < 1e-15 {
            return end_d;
        }
        // The projection lies inside the arc iff it is on the inner side of
        // both endpoint meridians.
        let (a, b) = (self.a.vec(), self.b.vec());
        if a.cross(proj).dot(n) >= 0.0 && proj.cross(b).dot(n) >= 0.0 {
            off.abs().atan2(pn)
        } else {
            end_d
        }
    }

    pub fn contains(&self, p: UnitVec, tol: f64) -> bool {
        self.distance_to(p) <= tol
    }

    /// Clips the arc to the closed hemisphere `{v : n·v ≥ -tol}` (n unit).
    /// Returns the surviving sub-arc endpoints, if any.
    pub(crate) fn clip_to_hemisphere(a: Vec3, b: Vec3, n: Vec3, tol: f64) -> Option<(Vec3, Vec3)> {
        let sa = n.dot(a);
        let sb = n.dot(b);
        match (sa >= -tol, sb >= -tol) {
            (true, true) => Some((a, b)),
            (false, false) => None,
            (true, false) => Some((a, crossing(a, b, sa, sb))),
            (false, true) => Some((crossing(a, b, sa, sb), b)),
        }
    }

    /// Closed intersection test between two arcs.
    pub fn intersects_arc(&self, other: &GeodesicArc, tol: f64) -> bool {
        self.intersection_with_arc(other, tol).is_some()
    }

    /// Intersection of two closed arcs: a point, a sub-arc, or nothing.
    pub fn intersection_with_arc(&self, other: &GeodesicArc, tol: f64) -> Option<GeodesicArc> {
        if self.is_degenerate() {
            return other.contains(self.a, tol).then_some(*self);
        }
        if other.is_degenerate() {
            return self.contains(other.a, tol).then_some(*other);
        }
        let n1 = self.pole()?;
        let n2 = other.pole()?;
        let cross = n1.cross(n2);
        if cross.norm() < 1e-12 {
            // Same great circle: clip one arc by the other's end meridians.
            if other.distance_to(self.a) > tol
                && other.distance_to(self.b) > tol
                && self.distance_to(other.a) > tol
                && self.distance_to(other.b) > tol
            {
                return None;
            }
            let (oa, ob) = (other.a.vec(), other.b.vec());
            let on = if n1.dot(n2) >= 0.0 { n2 } else { -n2 };
            let h1 = on.cross(oa).try_normalize(1e-15)?;
            let h2 = ob.cross(on).try_normalize(1e-15)?;
            let (mut p, mut q) = (self.a.vec(), self.b.vec());
            for h in [h1, h2] {
                let (np, nq) = GeodesicArc::clip_to_hemisphere(p, q, h, tol)?;
                p = np;
                q = nq;
            }
            let (p, q) = (UnitVec::from_vec3(p).ok()?, UnitVec::from_vec3(q).ok()?);
            return GeodesicArc::new(p, q).ok();
        }
        let x = UnitVec::from_vec3(cross).ok()?;
        for c in [x, -x] {
            if self.distance_to(c) <= tol && other.distance_to(c) <= tol {
                return Some(GeodesicArc { a: c, b: c });
            }
        }
        // Near-touching endpoints that the great-circle crossing misses.
        for p in [self.a, self.b] {
            if other.distance_to(p) <= tol {
                return Some(GeodesicArc { a: p, b: p });
            }
        }
        for p in [other.a, other.b] {
            if self.distance_to(p) <= tol {
                return Some(GeodesicArc { a: p, b: p });
            }
        }
        None
    }

    /// Canonical key with endpoints in lexicographic order.
    pub(crate) fn sorted_endpoints(&self) -> (UnitVec, UnitVec) {
        if lex_le(self.a, self.b) {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

/// Point where the great arc from `a` (side value `sa`) to `b` (`sb`)
/// crosses the plane; signs of `sa`, `sb` differ.
#[inline]
pub(crate) fn crossing(a: Vec3, b: Vec3, sa: f64, sb: f64) -> Vec3 {
    let v = b * sa - a * sb;
    // The crossing on the minor arc is the one on the side of a + b.
    let v = if v.dot(a + b) < 0.0 { -v } else { v };
    v.try_normalize(0.0).unwrap_or(a)
}

pub(crate) fn lex_le(a: UnitVec, b: UnitVec) -> bool {
    let (a, b) = (a.vec(), b.vec());
    (a.x, a.y, a.z) <= (b.x, b.y, b.z)
}
