//! Spherical measures, their pullbacks through the radial Gauss image,
//! the symmetric-difference pseudometric, and the test families used by
//! the uniqueness checkers.

mod partition;

pub use partition::{grid_partition, TestFamily, TestSet};

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::Polytope;
use crate::gauss_image::{gauss_image, QuerySet};
use crate::rng::substream;
use crate::sphere::area::polygon_cap_union_area;
use crate::sphere::{disjoint_pieces, sample_sphere, Cap, SphericalPolygon, SphericalRegion, UnitVec, EPS_GEOM};

/// Tolerance for comparing masses in float mode.
pub const EPS_MEAS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("atom weight must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("atoms {0} and {1} coincide")]
    DuplicateAtom(usize, usize),
    #[error("density must be non-negative, got {0}")]
    NegativeDensity(f64),
    #[error("maximum cell diameter must lie in (0, π/2), got {0}")]
    InvalidDiameter(f64),
    #[error("no admissible rotation found after {0} attempts")]
    PartitionFailure(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub dir: UnitVec,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MeasureRepr {
    Atoms { atoms: Vec<Atom> },
    Uniform,
    CapLebesgue { caps: Vec<Cap>, density: f64 },
}

/// A finite Borel measure on S².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub enum SphericalMeasure {
    Atoms(Vec<Atom>),
    /// Surface measure, total mass 4π.
    Uniform,
    /// `density` times surface measure restricted to the union of caps.
    CapLebesgue {
        caps: Vec<Cap>,
        density: f64,
    },
}

impl TryFrom<MeasureRepr> for SphericalMeasure {
    type Error = MeasureError;
    fn try_from(r: MeasureRepr) -> Result<Self, MeasureError> {
        match r {
            MeasureRepr::Atoms { atoms } => SphericalMeasure::atoms(atoms),
            MeasureRepr::Uniform => Ok(SphericalMeasure::Uniform),
            MeasureRepr::CapLebesgue { caps, density } => SphericalMeasure::cap_lebesgue(caps, density),
        }
    }
}

impl From<SphericalMeasure> for MeasureRepr {
    fn from(m: SphericalMeasure) -> Self {
        match m {
            SphericalMeasure::Atoms(atoms) => MeasureRepr::Atoms { atoms },
            SphericalMeasure::Uniform => MeasureRepr::Uniform,
            SphericalMeasure::CapLebesgue { caps, density } => MeasureRepr::CapLebesgue { caps, density },
        }
    }
}

impl SphericalMeasure {
    pub fn atoms(atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.w.is_finite() || a.w <= 0.0 {
                return Err(MeasureError::NonPositiveWeight(a.w));
            }
            for (j, b) in atoms[..i].iter().enumerate() {
                if a.dir.distance(b.dir) <= EPS_GEOM {
                    return Err(MeasureError::DuplicateAtom(j, i));
                }
            }
        }
        Ok(SphericalMeasure::Atoms(atoms))
    }

    pub fn cap_lebesgue(caps: Vec<Cap>, density: f64) -> Result<Self, MeasureError> {
        if !density.is_finite() || density < 0.0 {
            return Err(MeasureError::NegativeDensity(density));
        }
        Ok(SphericalMeasure::CapLebesgue { caps, density })
    }

    /// Unit atoms at the given directions.
    pub fn unit_atoms(dirs: &[UnitVec]) -> Result<Self, MeasureError> {
        Self::atoms(dirs.iter().map(|&dir| Atom { dir, w: 1.0 }).collect())
    }

    pub fn atom_dirs(&self) -> Vec<UnitVec> {
        match self {
            SphericalMeasure::Atoms(a) => a.iter().map(|a| a.dir).collect(),
            _ => Vec::new(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SphericalMeasure::Atoms(a) => a.iter().map(|a| a.w).sum(),
            SphericalMeasure::Uniform => 4.0 * std::f64::consts::PI,
            SphericalMeasure::CapLebesgue { caps, density } => density * crate::sphere::area::cap_union_area(caps),
        }
    }

    /// Mass of interior-disjoint polygon pieces (Lebesgue-type measures).
    fn pieces_mass(&self, pieces: &[SphericalPolygon]) -> f64 {
        match self {
            SphericalMeasure::Atoms(_) => 0.0,
            SphericalMeasure::Uniform => pieces.iter().map(|p| p.area()).fold(0.0, |s, a| s + a),
            SphericalMeasure::CapLebesgue { caps, density } => {
                density * pieces.iter().map(|p| polygon_cap_union_area(p, caps)).fold(0.0, |s, a| s + a)
            }
        }
    }
}

/// `λ(R)`. Atoms count with closed membership in any stratum; Lebesgue
/// measures see only the polygon stratum, overlaps counted once.
pub fn region_measure(lambda: &SphericalMeasure, r: &SphericalRegion) -> f64 {
    match lambda {
        SphericalMeasure::Atoms(atoms) => {
            atoms.iter().filter(|a| r.contains(a.dir, EPS_GEOM)).map(|a| a.w).fold(0.0, |s, w| s + w)
        }
        _ => lambda.pieces_mass(&r.disjoint_pieces()),
    }
}

/// `λ(K, ω) = λ(α_K(ω))`.
pub fn gauss_image_measure(lambda: &SphericalMeasure, k: &Polytope, omega: &QuerySet) -> f64 {
    region_measure(lambda, &gauss_image(k, omega).region)
}

fn minus(a: &[SphericalPolygon], b: &[SphericalPolygon]) -> Vec<SphericalPolygon> {
    let mut frags: Vec<SphericalPolygon> = a.to_vec();
    for q in b {
        frags = frags.iter().flat_map(|f| f.difference(q)).collect();
        if frags.is_empty() {
            break;
        }
    }
    frags
}

/// `λ(A △ B)`.
pub fn symdiff_distance(lambda: &SphericalMeasure, a: &SphericalRegion, b: &SphericalRegion) -> f64 {
    match lambda {
        SphericalMeasure::Atoms(atoms) => atoms
            .iter()
            .filter(|x| a.contains(x.dir, EPS_GEOM) != b.contains(x.dir, EPS_GEOM))
            .map(|x| x.w)
            .fold(0.0, |s, w| s + w),
        _ => {
            let pa = a.disjoint_pieces();
            let pb = b.disjoint_pieces();
            lambda.pieces_mass(&minus(&pa, &pb)) + lambda.pieces_mass(&minus(&pb, &pa))
        }
    }
}

/// Monte Carlo estimate of the area of the polygon stratum of `r`:
/// `(estimate, standard error)` from `samples` uniform points.
pub fn monte_carlo_area(r: &SphericalRegion, samples: usize, seed: u64) -> (f64, f64) {
    const CHUNK: usize = 10_000;
    let polys = SphericalRegion::from_polygons(disjoint_pieces(&r.polygons));
    let chunks = samples.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, "monte-carlo", c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n).filter(|_| polys.contains(sample_sphere(&mut rng), 0.0)).count()
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let total = 4.0 * std::f64::consts::PI;
    (p * total, total * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Random convex polygon inside a cap of the given radius around a
/// random center: hull of a few random points.
pub fn random_polygon<R: rand::Rng + ?Sized>(rng: &mut R, max_radius: f64) -> SphericalPolygon {
    loop {
        let c = sample_sphere(rng);
        let radius = rng.random_range(0.05..max_radius);
        let cap = Cap::new(c, radius).expect("radius in range");
        let n = rng.random_range(3..8);
        let pts: Vec<UnitVec> = (0..n).map(|_| cap.sample(rng)).collect();
        if let Ok(p) = crate::sphere::spherical_hull(&pts) {
            if p.area() > 1e-6 {
                return p;
            }
        }
    }
}
