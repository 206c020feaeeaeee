use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{SphereError, EPS_NORM};

/// A point or direction in R³.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    /// Normalized copy, or `None` for a (near) zero vector.
    pub fn try_normalize(self, min_norm: f64) -> Option<Vec3> {
        let n = self.norm();
        if n <= min_norm || !n.is_finite() {
            None
        } else {
            Some(self / n)
        }
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Any unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthonormal(self) -> Vec3 {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Vec3::X
        } else if self.y.abs() <= self.z.abs() {
            Vec3::Y
        } else {
            Vec3::Z
        };
        let c = self.cross(a);
        c / c.norm()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A point of the unit sphere S².
///
/// The constructor normalizes, so `‖v‖ = 1` up to rounding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVec(Vec3);

impl UnitVec {
    pub const E1: UnitVec = UnitVec(Vec3::X);
    pub const E2: UnitVec = UnitVec(Vec3::Y);
    pub const E3: UnitVec = UnitVec(Vec3::Z);

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, SphereError> {
        Self::from_vec3(Vec3::new(x, y, z))
    }

    pub fn from_vec3(v: Vec3) -> Result<Self, SphereError> {
        v.try_normalize(EPS_NORM).map(UnitVec).ok_or(SphereError::ZeroVector)
    }

    /// Wraps a vector the caller already knows to be unit length.
    #[inline]
    pub(crate) fn new_unchecked(v: Vec3) -> Self {
        UnitVec(v)
    }

    #[inline]
    pub fn vec(self) -> Vec3 {
        self.0
    }

    #[inline]
    pub fn dot(self, o: UnitVec) -> f64 {
        self.0.dot(o.0)
    }

    /// Arc (great-circle) distance in radians.
    #[inline]
    pub fn distance(self, o: UnitVec) -> f64 {
        angle_between(self.0, o.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0.to_array()
    }
}

impl Neg for UnitVec {
    type Output = UnitVec;
    fn neg(self) -> UnitVec {
        UnitVec(-self.0)
    }
}

impl TryFrom<[f64; 3]> for UnitVec {
    type Error = SphereError;
    fn try_from(a: [f64; 3]) -> Result<Self, SphereError> {
        UnitVec::from_vec3(a.into())
    }
}

impl From<UnitVec> for [f64; 3] {
    fn from(v: UnitVec) -> Self {
        v.to_array()
    }
}

impl From<UnitVec> for Vec3 {
    fn from(v: UnitVec) -> Self {
        v.0
    }
}

/// Angle between two nonzero vectors, computed with `atan2` so that it stays
/// accurate for nearly parallel and nearly antiparallel inputs.
#[inline]
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}
