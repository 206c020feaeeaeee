//! Areas of intersections of convex spherical polygons with caps.
//!
//! A region `{v : c·v ≥ s}` with `s ≥ 0` is called a disk here; polygon
//! edges are disks with `s = 0`. The area of an intersection of disks is
//! obtained from Gauss–Bonnet: walk the boundary, add the geodesic
//! curvature `s` times the swept azimuth of every circular arc and the
//! turning angle at every corner, and subtract from `2π`.

use std::f64::consts::PI;

use super::{Cap, SphericalPolygon, Vec3};

#[derive(Clone, Copy, Debug)]
struct Disk {
    c: Vec3,
    s: f64,
}

impl Disk {
    fn contains(&self, p: Vec3, tol: f64) -> bool {
        self.c.dot(p) >= self.s - tol
    }

    fn frame(&self) -> (Vec3, Vec3) {
        let e1 = self.c.any_orthonormal();
        (e1, self.c.cross(e1))
    }
}

struct BoundaryArc {
    disk: usize,
    start: Vec3,
    end: Vec3,
}

/// Area of `⋂ disks` for disks of angular radius at most `π/2`.
fn disk_intersection_area(disks: &[Disk]) -> f64 {
    let mut ds: Vec<Disk> = Vec::with_capacity(disks.len());
    for d in disks {
        if !ds.iter().any(|e| (e.c - d.c).norm() < 1e-12 && (e.s - d.s).abs() < 1e-12) {
            ds.push(*d);
        }
    }
    if ds.is_empty() {
        return 4.0 * PI;
    }
    for (i, a) in ds.iter().enumerate() {
        for b in &ds[i + 1..] {
            // Opposite disks meet in at most a circle.
            if (a.c + b.c).norm() < 1e-12 && a.s + b.s >= -1e-12 {
                return 0.0;
            }
        }
    }

    let mut arcs: Vec<BoundaryArc> = Vec::new();
    let mut swept = 0.0;
    for (i, d) in ds.iter().enumerate() {
        let rho = (1.0 - d.s * d.s).max(0.0).sqrt();
        if rho < 1e-12 {
            continue;
        }
        let (e1, e2) = d.frame();
        let at = |phi: f64| d.c * d.s + (e1 * phi.cos() + e2 * phi.sin()) * rho;
        let mut breaks: Vec<f64> = Vec::new();
        for (j, o) in ds.iter().enumerate() {
            if i == j {
                continue;
            }
            let a = o.c.dot(e1);
            let b = o.c.dot(e2);
            let r = a.hypot(b);
            if r < 1e-14 {
                continue;
            }
            let dd = (o.s - d.s * o.c.dot(d.c)) / rho;
            if dd.abs() > r {
                continue;
            }
            let base = b.atan2(a);
            let off = (dd / r).clamp(-1.0, 1.0).acos();
            breaks.push((base + off).rem_euclid(2.0 * PI));
            breaks.push((base - off).rem_euclid(2.0 * PI));
        }
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let spans: Vec<(f64, f64)> = if breaks.is_empty() {
            vec![(0.0, 2.0 * PI)]
        } else {
            let n = breaks.len();
            (0..n)
                .map(|k| {
                    let lo = breaks[k];
                    let hi = if k + 1 < n { breaks[k + 1] } else { breaks[0] + 2.0 * PI };
                    (lo, hi)
                })
                .collect()
        };
        let full = breaks.is_empty();
        for (lo, hi) in spans {
            if hi - lo < 1e-15 {
                continue;
            }
            let mid = at(0.5 * (lo + hi));
            if ds.iter().enumerate().all(|(j, o)| j == i || o.contains(mid, 1e-13)) {
                swept += d.s * (hi - lo);
                if !full {
                    arcs.push(BoundaryArc { disk: i, start: at(lo), end: at(hi) });
                }
            }
        }
    }

    let mut turning = 0.0;
    for a in &arcs {
        let Some(b) =
            arcs.iter().min_by(|x, y| (x.start - a.end).norm().partial_cmp(&(y.start - a.end).norm()).unwrap())
        else {
            continue;
        };
        let p = a.end;
        let t_in = ds[a.disk].c.cross(p);
        let t_out = ds[b.disk].c.cross(b.start);
        turning += t_in.cross(t_out).dot(p).atan2(t_in.dot(t_out));
    }
    if arcs.is_empty() && swept == 0.0 {
        // No boundary at all: the intersection is empty.
        return 0.0;
    }
    (2.0 * PI - swept - turning).max(0.0)
}

fn polygon_disks(p: &SphericalPolygon) -> Vec<Disk> {
    p.edge_normals().iter().map(|n| Disk { c: *n, s: 0.0 }).collect()
}

/// Area of `p ∩ c₁ ∩ … ∩ c_k`. Caps wider than a hemisphere are handled
/// through their complements.
pub fn polygon_caps_area(p: &SphericalPolygon, caps: &[Cap]) -> f64 {
    let base = polygon_disks(p);
    let mut small: Vec<Disk> = Vec::new();
    let mut big: Vec<Disk> = Vec::new();
    for c in caps {
        let s = c.radius().cos();
        if s >= 0.0 {
            small.push(Disk { c: c.center().vec(), s });
        } else {
            // Complement of the open cap, as a closed disk.
            big.push(Disk { c: -c.center().vec(), s: -s });
        }
    }
    let mut disks = base;
    disks.extend(small);
    with_complements(&mut disks, &big)
}

/// `area(⋂ disks \ ⋃ holes)` by recursion on the holes.
fn with_complements(disks: &mut Vec<Disk>, holes: &[Disk]) -> f64 {
    match holes.split_first() {
        None => disk_intersection_area(disks),
        Some((h, rest)) => {
            let without = with_complements(disks, rest);
            disks.push(*h);
            let inside = with_complements(disks, rest);
            disks.pop();
            (without - inside).max(0.0)
        }
    }
}

/// Area of `p ∩ (c₁ ∪ … ∪ c_k)` by inclusion–exclusion over caps that
/// meet `p` and pairwise overlap.
pub fn polygon_cap_union_area(p: &SphericalPolygon, caps: &[Cap]) -> f64 {
    let live: Vec<Cap> = caps.iter().copied().filter(|c| c.meets_polygon(p, 0.0)).collect();
    let mut total = 0.0;
    let mut chosen: Vec<Cap> = Vec::new();
    inclusion_exclusion(p, &live, 0, &mut chosen, &mut total);
    total.max(0.0)
}

fn inclusion_exclusion(p: &SphericalPolygon, caps: &[Cap], from: usize, chosen: &mut Vec<Cap>, total: &mut f64) {
    for i in from..caps.len() {
        let c = caps[i];
        if chosen.iter().any(|d| !d.meets_cap(&c, 0.0)) {
            continue;
        }
        chosen.push(c);
        let a = polygon_caps_area(p, chosen);
        if a > 0.0 {
            let sign = if chosen.len() % 2 == 1 { 1.0 } else { -1.0 };
            *total += sign * a;
            inclusion_exclusion(p, caps, i + 1, chosen, total);
        }
        chosen.pop();
    }
}

/// Area of the union of caps (no polygon restriction).
pub fn cap_union_area(caps: &[Cap]) -> f64 {
    let mut total = 0.0;
    let mut chosen: Vec<Cap> = Vec::new();
    cap_union_rec(caps, 0, &mut chosen, &mut total);
    total
}

fn cap_union_rec(caps: &[Cap], from: usize, chosen: &mut Vec<Cap>, total: &mut f64) {
    for i in from..caps.len() {
        let c = caps[i];
        if chosen.iter().any(|d| !d.meets_cap(&c, 0.0)) {
            continue;
        }
        chosen.push(c);
        let mut disks = Vec::new();
        let mut holes = Vec::new();
        for d in chosen.iter() {
            let s = d.radius().cos();
            if s >= 0.0 {
                disks.push(Disk { c: d.center().vec(), s });
            } else {
                holes.push(Disk { c: -d.center().vec(), s: -s });
            }
        }
        let a = with_complements(&mut disks, &holes);
        if a > 0.0 {
            let sign = if chosen.len() % 2 == 1 { 1.0 } else { -1.0 };
            *total += sign * a;
            cap_union_rec(caps, i + 1, chosen, total);
        }
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::UnitVec;
    use approx::assert_abs_diff_eq;

    fn u(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::new(x, y, z).unwrap()
    }

    fn octant() -> SphericalPolygon {
        SphericalPolygon::new(vec![UnitVec::E1, UnitVec::E2, UnitVec::E3]).unwrap()
    }

    #[test]
    fn polygon_alone_matches_girard() {
        let p = SphericalPolygon::new(vec![u(1.0, 0.2, 0.3), u(0.1, 1.0, 0.2), u(-0.3, 0.4, 1.0), u(0.5, -0.2, 1.0)])
            .unwrap();
        assert_abs_diff_eq!(polygon_caps_area(&p, &[]), p.area(), epsilon = 1e-12);
    }

    #[test]
    fn cap_inside_polygon() {
        let c = Cap::new(u(1.0, 1.0, 1.0), 0.2).unwrap();
        assert_abs_diff_eq!(polygon_caps_area(&octant(), &[c]), c.area(), epsilon = 1e-12);
    }

    #[test]
    fn cap_at_corner_gets_a_quarter() {
        // Three right angles at e₃ would give a quarter of the cap.
        let c = Cap::new(UnitVec::E3, 0.3).unwrap();
        assert_abs_diff_eq!(polygon_caps_area(&octant(), &[c]), c.area() / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn big_cap_via_complement() {
        let c = Cap::new(-UnitVec::E3, PI - 0.3).unwrap();
        let small = Cap::new(UnitVec::E3, 0.3).unwrap();
        let expect = PI / 2.0 - small.area() / 4.0;
        assert_abs_diff_eq!(polygon_caps_area(&octant(), &[c]), expect, epsilon = 1e-12);
    }

    #[test]
    fn union_of_overlapping_caps() {
        let a = Cap::new(UnitVec::E3, 0.5).unwrap();
        let b = Cap::new(u(0.3, 0.0, 1.0), 0.5).unwrap();
        let far = Cap::new(-UnitVec::E3, 0.2).unwrap();
        // Lens area by independent evaluation: |A ∪ B| = |A| + |B| - |A ∩ B|.
        let lens = disk_intersection_area(&[
            Disk { c: a.center().vec(), s: 0.5f64.cos() },
            Disk { c: b.center().vec(), s: 0.5f64.cos() },
        ]);
        let expect = a.area() + b.area() - lens + far.area();
        assert_abs_diff_eq!(cap_union_area(&[a, b, far]), expect, epsilon = 1e-12);
        assert!(lens > 0.0 && lens < a.area());
    }

    #[test]
    fn coincident_caps_count_once() {
        let a = Cap::new(UnitVec::E3, 0.5).unwrap();
        assert_abs_diff_eq!(cap_union_area(&[a, a]), a.area(), epsilon = 1e-12);
    }
}
