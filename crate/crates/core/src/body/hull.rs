//! Incremental 3-D convex hull, generic over the coordinate field.
//!
//! Both instances triangulate with exact plane-side signs: a floating-point
//! evaluation with a forward error bound settles most of them, and the rest
//! go through integer homogeneous coordinates (floats convert to rationals
//! without loss). The rational instance then merges exactly coplanar
//! triangles and drops exactly collinear ring vertices, giving the face
//! lattice of the hull. The float instance merges triangles lying within
//! `tol` of the plane of the largest triangle of their facet, and drops
//! vertices that end up on fewer than three facets.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::sphere::EPS_GEOM;

/// Scalar field for the hull. `tolerance` is the absolute plane-side
/// tolerance for coordinates of magnitude `scale`.
pub trait HullScalar:
    Clone + PartialOrd + Signed + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<Output = Self>
{
    fn homog(p: &P3<Self>) -> Homog;
    fn tolerance(scale: f64) -> Self;
    fn to_f64(&self) -> f64;
}

impl HullScalar for f64 {
    fn homog(p: &P3<Self>) -> Homog {
        homog(&p.map(|x| BigRational::from_float(x).expect("hull coordinates are finite")))
    }
    fn tolerance(scale: f64) -> Self {
        EPS_GEOM * scale.max(f64::MIN_POSITIVE)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl HullScalar for BigRational {
    fn homog(p: &P3<Self>) -> Homog {
        homog(p)
    }
    fn tolerance(_: f64) -> Self {
        BigRational::zero()
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub type P3<T> = [T; 3];

/// `[X, Y, Z, W]` with `W > 0` and the point at `(X, Y, Z) / W`.
pub type Homog = [BigInt; 4];

fn homog(p: &P3<BigRational>) -> Homog {
    let w = p[0].denom().lcm(p[1].denom()).lcm(p[2].denom());
    let c = |x: &BigRational| x.numer() * (&w / x.denom());
    [c(&p[0]), c(&p[1]), c(&p[2]), w]
}

/// Sign of `((b − a) × (c − a))·(p − a)`.
fn orient(a: &Homog, b: &Homog, c: &Homog, p: &Homog) -> Ordering {
    // Laplace expansion of det[a; b; c; p] along its first two rows.
    // That determinant is minus the oriented volume times positive W's.
    let m = |r: &Homog, s: &Homog, i: usize, j: usize| &r[i] * &s[j] - &r[j] * &s[i];
    let det = m(a, b, 0, 1) * m(c, p, 2, 3) - m(a, b, 0, 2) * m(c, p, 1, 3)
        + m(a, b, 0, 3) * m(c, p, 1, 2)
        + m(a, b, 1, 2) * m(c, p, 0, 3)
        - m(a, b, 1, 3) * m(c, p, 0, 2)
        + m(a, b, 2, 3) * m(c, p, 0, 1);
    BigInt::zero().cmp(&det)
}

fn collinear(a: &Homog, b: &Homog, c: &Homog) -> bool {
    // Rank below three: every 3×3 minor of [a; b; c] vanishes.
    let minor = |i: usize, j: usize, k: usize| {
        &a[i] * (&b[j] * &c[k] - &b[k] * &c[j]) - &a[j] * (&b[i] * &c[k] - &b[k] * &c[i])
            + &a[k] * (&b[i] * &c[j] - &b[j] * &c[i])
    };
    [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)].iter().all(|&(i, j, k)| minor(i, j, k).is_zero())
}

fn sub<T: HullScalar>(a: &P3<T>, b: &P3<T>) -> P3<T> {
    [a[0].clone() - b[0].clone(), a[1].clone() - b[1].clone(), a[2].clone() - b[2].clone()]
}

fn dot<T: HullScalar>(a: &P3<T>, b: &P3<T>) -> T {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

pub(crate) fn cross<T: HullScalar>(a: &P3<T>, b: &P3<T>) -> P3<T> {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HullError {
    TooFewPoints,
    Flat,
}

/// Hull output: the points that are vertices, and facet rings indexing
/// into them, counterclockwise seen from outside.
#[derive(Debug, Clone)]
pub struct Hull<T> {
    pub vertices: Vec<P3<T>>,
    pub facets: Vec<Vec<usize>>,
}

struct Face {
    v: [usize; 3],
    alive: bool,
}

struct Builder<'a, T> {
    pts: &'a [P3<T>],
    approx: Vec<[f64; 3]>,
    homog: Vec<Homog>,
    faces: Vec<Face>,
    edges: HashMap<(usize, usize), usize>,
}

/// Whether `p` is within `tol` of the plane through `a` with normal `n`.
fn on_plane<T: HullScalar>(a: &P3<T>, n: &P3<T>, p: &P3<T>, tol_sq: &T) -> bool {
    let val = dot(n, &sub(p, a));
    val.clone() * val <= tol_sq.clone() * dot(n, n)
}

impl<T: HullScalar> Builder<'_, T> {
    fn face_side(&self, f: usize, p: usize) -> Ordering {
        let [a, b, c] = self.faces[f].v;
        self.face_side_of(a, b, c, p)
    }

    fn face_side_of(&self, a: usize, b: usize, c: usize, p: usize) -> Ordering {
        let (det, err) = self.approx_orient([a, b, c], p);
        if det.abs() > err {
            return if det > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        orient(&self.homog[a], &self.homog[b], &self.homog[c], &self.homog[p])
    }

    /// `n·(p − a)` for the triangle `v` in floating point, with a bound on its
    /// distance from the exact value. Coordinates are taken to be within
    /// two ulps of the exact ones.
    fn approx_orient(&self, v: [usize; 3], p: usize) -> (f64, f64) {
        let [a, b, c] = v.map(|i| self.approx[i]);
        let q = self.approx[p];
        let eps = 4.0 * f64::EPSILON;
        let diff = |x: [f64; 3]| {
            let d = [x[0] - a[0], x[1] - a[1], x[2] - a[2]];
            let e = [0, 1, 2].map(|i| eps * (x[i].abs().max(a[i].abs())) + eps * d[i].abs());
            (d, e)
        };
        let ((u, eu), (v, ev), (w, ew)) = (diff(b), diff(c), diff(q));
        let det = u[0] * (v[1] * w[2] - v[2] * w[1])
            + u[1] * (v[2] * w[0] - v[0] * w[2])
            + u[2] * (v[0] * w[1] - v[1] * w[0]);
        let perm = |u: [f64; 3], v: [f64; 3], w: [f64; 3]| {
            u[0] * (v[1] * w[2] + v[2] * w[1]) + u[1] * (v[2] * w[0] + v[0] * w[2]) + u[2] * (v[0] * w[1] + v[1] * w[0])
        };
        let abs = |x: [f64; 3]| x.map(f64::abs);
        let plus = |x: [f64; 3], e: [f64; 3]| [0, 1, 2].map(|i| x[i].abs() + e[i]);
        let p0 = perm(abs(u), abs(v), abs(w));
        let p1 = perm(plus(u, eu), plus(v, ev), plus(w, ew));
        (det, 2.0 * (p1 - p0) + 1e-14 * p1)
    }

    /// Approximate distance from `p` to the plane of face `f`.
    fn approx_distance(&self, f: usize, p: usize) -> f64 {
        let [a, b, c] = self.faces[f].v.map(|i| self.approx[i]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let q = self.approx[p];
        let val = n[0] * (q[0] - a[0]) + n[1] * (q[1] - a[1]) + n[2] * (q[2] - a[2]);
        val / (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }

    fn add_face(&mut self, a: usize, b: usize, c: usize) {
        let id = self.faces.len();
        self.faces.push(Face { v: [a, b, c], alive: true });
        for (x, y) in [(a, b), (b, c), (c, a)] {
            self.edges.insert((x, y), id);
        }
    }

    fn kill_face(&mut self, f: usize) {
        self.faces[f].alive = false;
        let [a, b, c] = self.faces[f].v;
        for e in [(a, b), (b, c), (c, a)] {
            if self.edges.get(&e) == Some(&f) {
                self.edges.remove(&e);
            }
        }
    }

    fn insert(&mut self, p: usize) {
        // Seed the visible region from the most visible face, then grow it
        // through neighbours so that it stays connected.
        let mut seed: Option<(usize, f64)> = None;
        for f in 0..self.faces.len() {
            if !self.faces[f].alive || self.face_side(f, p) != Ordering::Greater {
                continue;
            }
            // Any visible face would do for exact predicates; the most
            // visible one keeps the toleranced instance well behaved.
            let score = self.approx_distance(f, p);
            if seed.as_ref().is_none_or(|(_, best)| score > *best) {
                seed = Some((f, score));
            }
        }
        let Some((start, _)) = seed else {
            return;
        };
        let mut visible = vec![start];
        let mut mark: HashMap<usize, bool> = HashMap::new();
        mark.insert(start, true);
        let mut i = 0;
        while i < visible.len() {
            let f = visible[i];
            i += 1;
            let [a, b, c] = self.faces[f].v;
            for (x, y) in [(a, b), (b, c), (c, a)] {
                let Some(&g) = self.edges.get(&(y, x)) else { continue };
                if mark.contains_key(&g) {
                    continue;
                }
                let vis = self.face_side(g, p) == Ordering::Greater;
                mark.insert(g, vis);
                if vis {
                    visible.push(g);
                }
            }
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let [a, b, c] = self.faces[f].v;
            for (x, y) in [(a, b), (b, c), (c, a)] {
                let twin = self.edges.get(&(y, x)).copied();
                if twin.is_none_or(|g| !mark.get(&g).copied().unwrap_or(false)) {
                    horizon.push((x, y));
                }
            }
        }
        for &f in &visible {
            self.kill_face(f);
        }
        for (x, y) in horizon {
            self.add_face(x, y, p);
        }
    }
}

fn scale_of<T: HullScalar>(pts: &[P3<T>]) -> f64 {
    pts.iter().flat_map(|p| p.iter().map(|c| c.to_f64().abs())).fold(0.0, f64::max)
}

/// Convex hull of `pts`.
pub fn convex_hull<T: HullScalar>(pts: &[P3<T>]) -> Result<Hull<T>, HullError> {
    if pts.len() < 4 {
        return Err(HullError::TooFewPoints);
    }
    let tol = T::tolerance(scale_of(pts));
    let tol_sq = tol.clone() * tol.clone();
    let approx = pts.iter().map(|p| [p[0].to_f64(), p[1].to_f64(), p[2].to_f64()]).collect();
    let homog = pts.iter().map(T::homog).collect();
    let mut b = Builder { pts, approx, homog, faces: Vec::new(), edges: HashMap::new() };

    let (i0, i1, i2, i3) = simplex_by_approx(&b.approx).unwrap_or_else(|| simplex_exact(pts));
    let norm_sq = |v: &P3<T>| dot(v, v);
    let d01 = sub(&pts[i1], &pts[i0]);
    if norm_sq(&d01) <= tol_sq {
        return Err(HullError::Flat);
    }
    let area = |k: usize| norm_sq(&cross(&d01, &sub(&pts[k], &pts[i0])));
    if area(i2) <= tol_sq.clone() * norm_sq(&d01) {
        return Err(HullError::Flat);
    }
    let n = cross(&d01, &sub(&pts[i2], &pts[i0]));
    if on_plane(&pts[i0], &n, &pts[i3], &tol_sq) || b.face_side_of(i0, i1, i2, i3) == Ordering::Equal {
        return Err(HullError::Flat);
    }
    if dot(&n, &sub(&pts[i3], &pts[i0])).is_positive() {
        // i3 above (i0,i1,i2): that triangle must face the other way.
        b.add_face(i0, i2, i1);
        b.add_face(i0, i1, i3);
        b.add_face(i1, i2, i3);
        b.add_face(i2, i0, i3);
    } else {
        b.add_face(i0, i1, i2);
        b.add_face(i0, i3, i1);
        b.add_face(i1, i3, i2);
        b.add_face(i2, i3, i0);
    }
    for p in 0..pts.len() {
        if p != i0 && p != i1 && p != i2 && p != i3 {
            b.insert(p);
        }
    }
    Ok(merge_facets(&b, tol.to_f64()))
}

/// Far-apart starting points: the farthest from the first, then the
/// farthest from their line, then from their plane.
fn simplex_exact<T: HullScalar>(pts: &[P3<T>]) -> (usize, usize, usize, usize) {
    let norm_sq = |v: &P3<T>| dot(v, v);
    let i0 = 0;
    let argmax = |f: &dyn Fn(usize) -> T| {
        (0..pts.len()).map(|i| (i, f(i))).fold(None, |best: Option<(usize, T)>, (i, v)| match best {
            Some((_, ref b)) if v.partial_cmp(b) != Some(Ordering::Greater) => best,
            _ => Some((i, v)),
        })
    };
    let i1 = argmax(&|i| norm_sq(&sub(&pts[i], &pts[i0]))).expect("points").0;
    let d01 = sub(&pts[i1], &pts[i0]);
    let i2 = argmax(&|k| norm_sq(&cross(&d01, &sub(&pts[k], &pts[i0])))).expect("points").0;
    let n = cross(&d01, &sub(&pts[i2], &pts[i0]));
    let i3 = argmax(&|k| dot(&n, &sub(&pts[k], &pts[i0])).abs()).expect("points").0;
    (i0, i1, i2, i3)
}

/// The same choice made on float copies; `None` when the copies look flat,
/// in which case the exact choice is needed to tell.
fn simplex_by_approx(pts: &[[f64; 3]]) -> Option<(usize, usize, usize, usize)> {
    let f: Vec<P3<f64>> = pts.to_vec();
    let scale = scale_of(&f);
    let (i0, i1, i2, i3) = simplex_exact(&f);
    let n = cross(&sub(&f[i1], &f[i0]), &sub(&f[i2], &f[i0]));
    let h = dot(&n, &sub(&f[i3], &f[i0])).abs();
    (h > 1e-6 * scale.powi(3)).then_some((i0, i1, i2, i3))
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn merge_facets<T: HullScalar>(b: &Builder<'_, T>, tol: f64) -> Hull<T> {
    let alive: Vec<usize> = (0..b.faces.len()).filter(|&f| b.faces[f].alive).collect();
    let label = if tol == 0.0 { exact_groups(b, &alive) } else { plane_groups(b, &alive, tol) };
    let mut keys: Vec<usize> = alive.iter().map(|&f| label[f]).collect();
    keys.sort_unstable();
    keys.dedup();

    let mut rings: Vec<Vec<usize>> = Vec::new();
    for k in keys {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &f in alive.iter().filter(|&&f| label[f] == k) {
            let [a, bb, c] = b.faces[f].v;
            for (x, y) in [(a, bb), (bb, c), (c, a)] {
                if label[b.edges[&(y, x)]] != k {
                    next.insert(x, y);
                }
            }
        }
        let start = *next.keys().min().unwrap();
        let mut ring = vec![start];
        let mut cur = next[&start];
        while cur != start && ring.len() <= next.len() {
            ring.push(cur);
            cur = next[&cur];
        }
        rings.push(ring);
    }
    if tol == 0.0 {
        rings = rings.into_iter().map(|r| drop_collinear(b, r)).collect();
    } else {
        drop_flat_vertices(&mut rings);
    }

    let mut used: Vec<usize> = rings.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let index: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Hull {
        vertices: used.iter().map(|&v| b.pts[v].clone()).collect(),
        facets: rings.into_iter().map(|r| r.into_iter().map(|v| index[&v]).collect()).collect(),
    }
}

/// Facet label per face: exactly coplanar neighbours share one.
fn exact_groups<T: HullScalar>(b: &Builder<'_, T>, alive: &[usize]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..b.faces.len()).collect();
    for &f in alive {
        let [a, bb, c] = b.faces[f].v;
        for (x, y) in [(a, bb), (bb, c), (c, a)] {
            let g = b.edges[&(y, x)];
            let apex = b.faces[g].v.iter().copied().find(|&v| v != x && v != y).unwrap();
            if b.face_side(f, apex) == Ordering::Equal {
                let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
                parent[rf] = rg;
            }
        }
    }
    (0..b.faces.len()).map(|f| find(&mut parent, f)).collect()
}

/// Facet label per face: starting from the largest unlabelled triangle,
/// grow across edges through triangles whose corners all lie within
/// `tol` of its plane. The reference plane stays fixed, so nearly flat
/// regions cannot drift into a curved facet.
fn plane_groups<T>(b: &Builder<'_, T>, alive: &[usize], tol: f64) -> Vec<usize> {
    let p = &b.approx;
    let normal = |f: usize| {
        let [a, bb, c] = b.faces[f].v.map(|i| p[i]);
        let n = cross(&sub(&bb, &a), &sub(&c, &a));
        (n, dot(&n, &n).sqrt())
    };
    let mut order: Vec<(usize, f64)> = alive.iter().map(|&f| (f, normal(f).1)).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut label = vec![usize::MAX; b.faces.len()];
    for (f, len) in order {
        if label[f] != usize::MAX {
            continue;
        }
        let n = normal(f).0.map(|x| x / len);
        let d = dot(&n, &p[b.faces[f].v[0]]);
        label[f] = f;
        let mut queue = vec![f];
        while let Some(g) = queue.pop() {
            let [a, bb, c] = b.faces[g].v;
            for (x, y) in [(a, bb), (bb, c), (c, a)] {
                let h = b.edges[&(y, x)];
                if label[h] == usize::MAX && b.faces[h].v.iter().all(|&v| (dot(&n, &p[v]) - d).abs() <= tol) {
                    label[h] = f;
                    queue.push(h);
                }
            }
        }
    }
    label
}

/// Removes vertices that lie on fewer than three facets; after toleranced
/// merging they sit on an edge between two facets.
fn drop_flat_vertices(rings: &mut [Vec<usize>]) {
    let mut count: HashMap<usize, usize> = HashMap::new();
    for v in rings.iter().flatten() {
        *count.entry(*v).or_default() += 1;
    }
    for r in rings.iter_mut() {
        if r.iter().filter(|v| count[v] >= 3).count() >= 3 {
            r.retain(|v| count[v] >= 3);
        }
    }
}

fn drop_collinear<T>(b: &Builder<'_, T>, mut ring: Vec<usize>) -> Vec<usize> {
    loop {
        let k = ring.len();
        if k <= 3 {
            return ring;
        }
        let h = |j: usize| &b.homog[ring[j % k]];
        match (0..k).find(|&i| collinear(h(i + k - 1), h(i), h(i + 1))) {
            Some(i) => {
                ring.remove(i);
            }
            None => return ring,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn cube_pts() -> Vec<P3<f64>> {
        let mut v = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    v.push([x, y, z]);
                }
            }
        }
        v
    }

    #[test]
    fn cube_has_six_square_facets() {
        let mut pts = cube_pts();
        pts.push([0.0, 0.0, 0.0]);
        pts.push([1.0, 0.0, 0.0]);
        pts.push([1.0, 1.0, 0.0]);
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        assert!(h.facets.iter().all(|f| f.len() == 4));
    }

    #[test]
    fn exact_cube_with_edge_points() {
        let r = |x: i64| BigRational::from_integer(BigInt::from(x));
        let mut pts: Vec<P3<BigRational>> = cube_pts().iter().map(|p| p.map(|c| r(c as i64))).collect();
        pts.insert(0, [r(1), r(1), r(0)]);
        pts.insert(0, [r(0), r(0), r(1)]);
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
    }

    #[test]
    fn flat_input_rejected() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert_eq!(convex_hull(&pts).unwrap_err(), HullError::Flat);
    }

    #[test]
    fn euler_characteristic() {
        // Points on a twisted helix are in convex position.
        let pts: Vec<P3<f64>> = (0..30)
            .map(|i| {
                let t = i as f64 * 0.7;
                [t.cos(), t.sin(), (i as f64 / 15.0) - 1.0]
            })
            .collect();
        let h = convex_hull(&pts).unwrap();
        let v = h.vertices.len() as i64;
        let f = h.facets.len() as i64;
        let e: i64 = h.facets.iter().map(|r| r.len() as i64).sum::<i64>() / 2;
        assert_eq!(v - e + f, 2);
    }
}
