use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use super::{MeasureError, SphericalMeasure};
use crate::gauss_image::QuerySet;
use crate::rng::{substream, Rotation};
use crate::sphere::{SphericalPolygon, UnitVec, Vec3};

const MAX_ATTEMPTS: usize = 100;
/// Minimum distance between a protected point and any cell edge.
const BOUNDARY_MARGIN: f64 = 1e-6;

/// Finite family of compact convex cells tiling the sphere.
#[derive(Clone, Debug, Serialize)]
pub struct TestFamily {
    pub cells: Vec<SphericalPolygon>,
    /// Cells sharing an edge.
    pub adjacency: Vec<Vec<usize>>,
    pub max_diameter: f64,
    pub seed: u64,
    /// Index of the rotation that was accepted.
    pub rotation_attempt: usize,
}

/// A union of family cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TestSet {
    pub id: String,
    pub cells: Vec<usize>,
}

impl TestFamily {
    pub fn query(&self, set: &TestSet) -> QuerySet {
        match set.cells.as_slice() {
            [i] => QuerySet::Polygon(self.cells[*i].clone()),
            cells => QuerySet::union(cells.iter().map(|&i| QuerySet::Polygon(self.cells[i].clone())).collect()),
        }
    }

    /// Single cells, adjacent pairs, and connected triples.
    pub fn test_sets(&self, max_union: usize) -> Vec<TestSet> {
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for i in 0..self.cells.len() {
            sets.insert(vec![i]);
            if max_union >= 2 {
                for &j in &self.adjacency[i] {
                    let mut s = vec![i, j];
                    s.sort_unstable();
                    sets.insert(s);
                }
            }
            if max_union >= 3 {
                let nb = &self.adjacency[i];
                for (x, &a) in nb.iter().enumerate() {
                    for &c in &nb[x + 1..] {
                        let mut s = vec![a, i, c];
                        s.sort_unstable();
                        sets.insert(s);
                    }
                }
            }
        }
        let mut out: Vec<TestSet> = sets
            .into_iter()
            .map(|cells| {
                let id = if cells.len() == 1 {
                    format!("cell-{}", cells[0])
                } else {
                    format!("cells-{}", cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+"))
                };
                TestSet { id, cells }
            })
            .collect();
        out.sort_by(|a, b| a.cells.len().cmp(&b.cells.len()).then_with(|| a.cells.cmp(&b.cells)));
        out
    }

    /// Index of a cell containing `u`.
    pub fn cell_containing(&self, u: UnitVec) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(u, 1e-12))
    }
}

fn grid_vertex(theta: f64, phi: f64) -> UnitVec {
    UnitVec::new_unchecked(Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()))
}

/// Latitude–longitude cells with geodesic edges: `n_lat` bands, `n_lon`
/// sectors, triangles at the poles.
fn lat_lon_cells(n_lat: usize, n_lon: usize) -> (Vec<SphericalPolygon>, Vec<Vec<usize>>) {
    let theta = |k: usize| PI * k as f64 / n_lat as f64;
    let phi = |j: usize| 2.0 * PI * (j % n_lon) as f64 / n_lon as f64;
    let v = |k: usize, j: usize| grid_vertex(theta(k), phi(j));
    let id = |k: usize, j: usize| k * n_lon + (j % n_lon);
    let mut cells = Vec::with_capacity(n_lat * n_lon);
    let mut adjacency = Vec::with_capacity(n_lat * n_lon);
    for k in 0..n_lat {
        for j in 0..n_lon {
            let ring = if k == 0 {
                vec![UnitVec::E3, v(1, j), v(1, j + 1)]
            } else if k == n_lat - 1 {
                vec![-UnitVec::E3, v(k, j + 1), v(k, j)]
            } else {
                vec![v(k, j), v(k, j + 1), v(k + 1, j + 1), v(k + 1, j)]
            };
            cells.push(SphericalPolygon::new(ring).expect("grid cells are convex"));
            let mut nb = vec![id(k, j + n_lon - 1), id(k, j + 1)];
            if k > 0 {
                nb.push(id(k - 1, j));
            }
            if k + 1 < n_lat {
                nb.push(id(k + 1, j));
            }
            adjacency.push(nb);
        }
    }
    (cells, adjacency)
}

/// Cell family with every diameter below `max_diameter`, rotated by a
/// seeded random rotation chosen so that no atom of `measures` and no
/// point of `avoid` lies near a cell boundary.
pub fn grid_partition(
    max_diameter: f64,
    seed: u64,
    measures: &[SphericalMeasure],
    avoid: &[UnitVec],
) -> Result<TestFamily, MeasureError> {
    if !(max_diameter > 0.0 && max_diameter < PI / 2.0) {
        return Err(MeasureError::InvalidDiameter(max_diameter));
    }
    let mut n = 2;
    let (cells, adjacency) = loop {
        let (cells, adj) = lat_lon_cells(n, 2 * n);
        if cells.iter().all(|c| c.diameter() < max_diameter) {
            break (cells, adj);
        }
        n += 1;
    };
    let mut protected: Vec<UnitVec> = measures.iter().flat_map(|m| m.atom_dirs()).collect();
    protected.extend_from_slice(avoid);

    for attempt in 0..MAX_ATTEMPTS {
        let rot = Rotation::random(&mut substream(seed, "grid-partition", attempt as u64));
        let rotated: Vec<SphericalPolygon> =
            cells.iter().map(|c| c.map_vertices(|v| rot.apply(v)).expect("rotations keep cells valid")).collect();
        let clear =
            protected.iter().all(|p| rotated.iter().all(|c| c.edges().all(|e| e.distance_to(*p) > BOUNDARY_MARGIN)));
        if clear {
            return Ok(TestFamily { cells: rotated, adjacency, max_diameter, seed, rotation_attempt: attempt });
        }
    }
    Err(MeasureError::PartitionFailure(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cells_tile_the_sphere() {
        let f = grid_partition(0.5, 3, &[], &[]).unwrap();
        let area: f64 = f.cells.iter().map(|c| c.area()).sum();
        assert_abs_diff_eq!(area, 4.0 * PI, epsilon = 1e-6);
        assert!(f.cells.iter().all(|c| c.diameter() < 0.5));
    }

    #[test]
    fn cells_overlap_only_on_boundaries() {
        let f = grid_partition(1.0, 3, &[], &[]).unwrap();
        for (i, a) in f.cells.iter().enumerate() {
            for b in &f.cells[i + 1..] {
                assert!(a.intersection(b).is_none_or(|x| x.area() < 1e-12));
            }
        }
    }

    #[test]
    fn atoms_are_kept_off_boundaries() {
        let m = SphericalMeasure::unit_atoms(&[UnitVec::E3, -UnitVec::E3]).unwrap();
        let f = grid_partition(0.5, 11, &[m], &[]).unwrap();
        for p in [UnitVec::E3, -UnitVec::E3] {
            let owner: Vec<usize> = (0..f.cells.len()).filter(|&i| f.cells[i].contains(p, 1e-9)).collect();
            assert_eq!(owner.len(), 1);
            assert!(f.cells[owner[0]].contains_strictly(p, 1e-9));
        }
    }

    #[test]
    fn union_sets_are_connected() {
        let f = grid_partition(1.0, 1, &[], &[]).unwrap();
        let sets = f.test_sets(3);
        assert!(sets.iter().any(|s| s.cells.len() == 3));
        for s in sets.iter().filter(|s| s.cells.len() == 2) {
            assert!(f.adjacency[s.cells[0]].contains(&s.cells[1]));
        }
    }

    #[test]
    fn bad_diameter_rejected() {
        assert_eq!(grid_partition(2.0, 0, &[], &[]).unwrap_err(), MeasureError::InvalidDiameter(2.0));
    }
}
