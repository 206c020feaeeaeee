//! Checkers for the uniqueness theorems on concrete instances: a.e.
//! equality of Gauss image maps over a test family, the simultaneous map
//! on the support of λ, per-component dilation, the ratio partition, and
//! the vanishing of ratio increments.

mod components;

pub use components::{Component, Generator, SupportComponents};

use std::collections::BTreeMap;

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::Polytope;
use crate::gauss_image::{GaussError, GaussMap, QuerySet};
use crate::measure::{region_measure, symdiff_distance, SphericalMeasure, TestFamily, EPS_MEAS};
use crate::report::{CheckReport, Witness};
use crate::rng::substream;
use crate::sphere::hausdorff::directed_hausdorff;
use crate::sphere::{Cap, SphereError, SphericalRegion, UnitVec, EPS_GEOM};

/// Name of the a.e. equality check; the later checkers require a passing
/// report with this name.
pub const AE_CHECK: &str = "thm-1.1-ae-equality";
pub const SIMULTANEOUS_CHECK: &str = "thm-1.2-simultaneous-map";
pub const DILATION_CHECK: &str = "thm-1.3-dilation";
pub const RATIO_INCREMENT_CHECK: &str = "lemma-6.5-ratio-increment";

/// Relative spread allowed within a component by the dilation check.
pub const RATIO_SPREAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UniquenessError {
    #[error("hypothesis not established: {0}")]
    HypothesisNotEstablished(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

fn require_ae(report: &CheckReport) -> Result<(), UniquenessError> {
    if report.check != AE_CHECK {
        return Err(UniquenessError::HypothesisNotEstablished(format!(
            "expected a {AE_CHECK} report, got {}",
            report.check
        )));
    }
    if !report.passed() {
        return Err(UniquenessError::HypothesisNotEstablished("the a.e. equality check failed".into()));
    }
    Ok(())
}

/// Compares `α_K` and `α_L` on every cell of the family and every union of
/// up to `max_union` adjacent cells. For each set ω the table holds
/// `s = λ(α_K(ω) △ α_L(ω))` and `m = |λ(K, ω) − λ(L, ω)|`; the check passes
/// iff every `s ≤ ε_meas`. When a set has `s > 0.1` the report also names
/// a family set with `m > ε_meas`.
pub fn ae_equal_check(
    k: &Polytope,
    l: &Polytope,
    lambda: &SphericalMeasure,
    family: &TestFamily,
    max_union: usize,
) -> CheckReport {
    let (mk, ml) = (GaussMap::new(k), GaussMap::new(l));
    let cell_images: Vec<(SphericalRegion, SphericalRegion)> = family
        .cells
        .par_iter()
        .map(|c| {
            let q = QuerySet::Polygon(c.clone());
            (mk.image(&q).region, ml.image(&q).region)
        })
        .collect();
    let sets = family.test_sets(max_union);
    let rows: Vec<(f64, f64)> = sets
        .par_iter()
        .map(|set| {
            let mut a = SphericalRegion::empty();
            let mut b = SphericalRegion::empty();
            for &c in &set.cells {
                a.extend(cell_images[c].0.clone());
                b.extend(cell_images[c].1.clone());
            }
            let s = symdiff_distance(lambda, &a, &b);
            let m = (region_measure(lambda, &a) - region_measure(lambda, &b)).abs();
            (s, m)
        })
        .collect();

    let mut report = CheckReport::new(AE_CHECK);
    report.config("family_cells", family.cells.len());
    report.config("family_max_diameter", family.max_diameter);
    report.config("seed", family.seed);
    report.config("max_union", max_union);
    report.config("rotation_attempt", family.rotation_attempt);
    let mut failing: Vec<usize> = Vec::new();
    let (mut max_s, mut max_m): (f64, f64) = (0.0, 0.0);
    for (i, (set, (s, m))) in sets.iter().zip(&rows).enumerate() {
        report.table.push(Witness::new(set.id.clone()).with("s", *s).with("m", *m));
        max_s = max_s.max(*s);
        max_m = max_m.max(*m);
        if *s > EPS_MEAS {
            failing.push(i);
        }
    }
    failing.sort_by(|&a, &b| rows[b].0.total_cmp(&rows[a].0).then(a.cmp(&b)));
    for &i in failing.iter().take(10) {
        report.witnesses.push(Witness::new(sets[i].id.clone()).with("s", rows[i].0).with("m", rows[i].1));
    }
    if failing.first().is_some_and(|&i| rows[i].0 > 0.1) {
        // Reverse direction: a large symmetric difference must show up as a
        // mass difference on some family set.
        if let Some(j) = (0..sets.len()).max_by(|&a, &b| rows[a].1.total_cmp(&rows[b].1).then(b.cmp(&a))) {
            if rows[j].1 > EPS_MEAS {
                report.config("reverse_witness", sets[j].id.clone());
                report.margin("reverse_m", rows[j].1);
            }
        }
    }
    report.margin("max_s", max_s);
    report.margin("max_m", max_m);
    report.margin("tolerance", EPS_MEAS);
    report.margin("sets", sets.len() as f64);
    let pass = failing.is_empty();
    report.conclude(pass)
}

/// `α_{K*,L*}(u) = α_{K*}(u) ∩ α_{L*}(u)`, computed through the reverse
/// images `α*_K(u)` and `α*_L(u)`.
pub fn simultaneous_map(k: &Polytope, l: &Polytope, u: UnitVec) -> SphericalRegion {
    simultaneous_with(&GaussMap::new(k), &GaussMap::new(l), u)
}

fn simultaneous_with(mk: &GaussMap, ml: &GaussMap, u: UnitVec) -> SphericalRegion {
    let q = QuerySet::point(u);
    mk.reverse_image(&q).region.intersection(&ml.reverse_image(&q).region, EPS_GEOM)
}

/// Continuity rows of one support component, keyed by its label.
pub type ComponentRows = (String, Vec<ContinuityRow>);

/// One row of the continuity probe: the largest excess of
/// `α_{K*,L*}(u′)` over `α_{K*,L*}(u)` for sampled `u′ ∈ u_δ ∩ spt λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub delta: f64,
    pub excess: f64,
}

/// Points of `spt λ` within `delta` of `u` in the same component.
fn nearby<R: rand::Rng + ?Sized>(c: &Component, u: UnitVec, delta: f64, rng: &mut R, n: usize) -> Vec<UnitVec> {
    if c.is_atomic() {
        return vec![u];
    }
    let cap = Cap::new(u, delta).expect("probe radius in range");
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 100 * n {
        tries += 1;
        let p = cap.sample(rng);
        if c.contains(p) {
            out.push(p);
        }
    }
    out
}

/// On an instance where a.e. equality holds, `α_{K*,L*}(u)` is nonempty
/// for `samples` points of each support component, and the excess of the
/// map over shrinking neighbourhoods of a sampled point falls to within
/// `res` at the smallest `δ`.
#[allow(clippy::too_many_arguments)]
pub fn simultaneous_map_check(
    k: &Polytope,
    l: &Polytope,
    components: &SupportComponents,
    samples: usize,
    deltas: &[f64],
    res: f64,
    seed: u64,
    ae: &CheckReport,
) -> Result<(CheckReport, Vec<ComponentRows>), UniquenessError> {
    require_ae(ae)?;
    let (mk, ml) = (GaussMap::new(k), GaussMap::new(l));
    let mut report = CheckReport::new(SIMULTANEOUS_CHECK);
    report.config("samples", samples);
    report.config("seed", seed);
    report.config("resolution", res);
    let mut probes = Vec::new();
    let mut pass = true;
    for (ci, comp) in components.components.iter().enumerate() {
        let mut rng = substream(seed, "simultaneous-map", ci as u64);
        let pts: Vec<UnitVec> = (0..samples).map(|_| comp.sample(&mut rng)).collect();
        let empty = pts.par_iter().filter(|u| simultaneous_with(&mk, &ml, **u).is_empty()).count();
        let mut w = Witness::new(comp.id.clone()).with("samples", pts.len() as f64).with("empty", empty as f64);

        let u = pts[0];
        let base = simultaneous_with(&mk, &ml, u);
        let mut rows = Vec::new();
        for (di, &delta) in deltas.iter().enumerate() {
            let mut prng = substream(seed, "continuity-probe", (ci * deltas.len() + di) as u64);
            let mut excess: f64 = 0.0;
            for p in nearby(comp, u, delta, &mut prng, 50) {
                let img = simultaneous_with(&mk, &ml, p);
                if !img.is_empty() && !base.is_empty() {
                    excess = excess.max(directed_hausdorff(&img, &base, res)?);
                }
            }
            rows.push(ContinuityRow { delta, excess });
        }
        let last = rows.last().map_or(0.0, |r| r.excess);
        w = w.with("final_excess", last);
        let ok = empty == 0 && last <= res;
        pass &= ok;
        report.table.push(w.clone());
        if !ok {
            report.witnesses.push(w);
        }
        probes.push((comp.id.clone(), rows));
    }
    report.margin("components", components.components.len() as f64);
    Ok((report.conclude(pass), probes))
}

/// Sign class of `ρ_K − ρ_L` over a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioLabel {
    /// `ρ_K > ρ_L` throughout (ω′).
    Greater,
    /// `ρ_K < ρ_L` throughout (ω).
    Less,
    /// `ρ_K = ρ_L` throughout (ω₀).
    Equal,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellLabel {
    pub cell: usize,
    pub label: RatioLabel,
    /// Range of the relative difference `(ρ_K − ρ_L)/max(ρ_K, ρ_L)`.
    pub min_rel: f64,
    pub max_rel: f64,
}

fn grid_points(cell: &crate::sphere::SphericalPolygon, s: usize) -> Vec<UnitVec> {
    let s = s.max(1);
    let mut out: Vec<UnitVec> = cell.vertices().to_vec();
    let vs = cell.vertices();
    for i in 1..vs.len() - 1 {
        let (a, b, c) = (vs[0].vec(), vs[i].vec(), vs[i + 1].vec());
        for p in 0..=s {
            for q in 0..=s - p {
                let (x, y) = (p as f64 / s as f64, q as f64 / s as f64);
                let v = a * (1.0 - x - y) + b * x + c * y;
                if let Ok(u) = UnitVec::from_vec3(v) {
                    out.push(u);
                }
            }
        }
    }
    out
}

/// Labels each family cell by the sign of `ρ_K − ρ_L` at its vertices and
/// a barycentric grid of `s` steps per fan triangle. A label other than
/// `Mixed` requires every sample to clear `ε_geom` (relative difference).
pub fn ratio_partition(k: &Polytope, l: &Polytope, family: &TestFamily, s: usize) -> Vec<CellLabel> {
    family
        .cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let rel: Vec<f64> = grid_points(cell, s)
                .into_iter()
                .map(|u| {
                    let (a, b) = (k.radial(u), l.radial(u));
                    (a - b) / a.max(b)
                })
                .collect();
            let min_rel = rel.iter().copied().fold(f64::INFINITY, f64::min);
            let max_rel = rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let label = if min_rel > EPS_GEOM {
                RatioLabel::Greater
            } else if max_rel < -EPS_GEOM {
                RatioLabel::Less
            } else if min_rel >= -EPS_GEOM && max_rel <= EPS_GEOM {
                RatioLabel::Equal
            } else {
                RatioLabel::Mixed
            };
            CellLabel { cell: i, label, min_rel, max_rel }
        })
        .collect()
}

/// Checks that `h_K/h_L` is constant on each support component, relative
/// spread at most `1e-9`, on `samples` points per component.
pub fn dilation_component_check(
    k: &Polytope,
    l: &Polytope,
    components: &SupportComponents,
    samples: usize,
    seed: u64,
    ae: &CheckReport,
) -> Result<CheckReport, UniquenessError> {
    require_ae(ae)?;
    let mut report = CheckReport::new(DILATION_CHECK);
    report.config("samples", samples);
    report.config("seed", seed);
    let mut worst: f64 = 0.0;
    for (ci, comp) in components.components.iter().enumerate() {
        let mut rng = substream(seed, "dilation", ci as u64);
        let ratios: Vec<f64> = (0..samples.max(1))
            .map(|_| {
                let v = comp.sample(&mut rng).vec();
                k.support(v) / l.support(v)
            })
            .collect();
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let spread = (max - min) / mean;
        worst = worst.max(spread);
        let w =
            Witness::new(comp.id.clone()).with("ratio", mean).with("min", min).with("max", max).with("spread", spread);
        if spread > RATIO_SPREAD_TOL {
            report.witnesses.push(w.clone());
        }
        report.table.push(w);
    }
    report.margin("max_spread", worst);
    report.margin("tolerance", RATIO_SPREAD_TOL);
    let pass = report.witnesses.is_empty();
    Ok(report.conclude(pass))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Incremental ratios `|f(u′) − f(u)|/|u′ − u|` of
/// `f = ρ_{K*}/ρ_{L*} = h_L/h_K` for pairs inside each component at the
/// separations `seps` (decreasing). The table lists the median and the
/// 0.9 quantile per separation; the check passes iff the 0.9 quantile at
/// the smallest separation is at most `eps` in every component.
#[allow(clippy::too_many_arguments)]
pub fn ratio_increment_check(
    k: &Polytope,
    l: &Polytope,
    components: &SupportComponents,
    eps: f64,
    seps: &[f64],
    pair_samples: usize,
    seed: u64,
    ae: &CheckReport,
) -> Result<CheckReport, UniquenessError> {
    require_ae(ae)?;
    if seps.is_empty() || seps.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
        return Err(UniquenessError::InvalidParameter("separations must lie in (0, 1)".into()));
    }
    let f = |u: UnitVec| l.support(u.vec()) / k.support(u.vec());
    let mut report = CheckReport::new(RATIO_INCREMENT_CHECK);
    report.config("eps", eps);
    report.config("pair_samples", pair_samples);
    report.config("seed", seed);
    let mut worst: f64 = 0.0;
    for (ci, comp) in components.components.iter().enumerate() {
        let mut last_q = 0.0;
        for (si, &sep) in seps.iter().enumerate() {
            let mut rng = substream(seed, "ratio-increment", (ci * seps.len() + si) as u64);
            let mut incs = Vec::with_capacity(pair_samples);
            if !comp.is_atomic() {
                let mut tries = 0;
                while incs.len() < pair_samples && tries < 100 * pair_samples.max(1) {
                    tries += 1;
                    let u = comp.sample(&mut rng);
                    let e1 = u.vec().any_orthonormal();
                    let e2 = u.vec().cross(e1);
                    let phi = rng.random::<f64>() * std::f64::consts::TAU;
                    let dir = e1 * phi.cos() + e2 * phi.sin();
                    let v = UnitVec::from_vec3(u.vec() * sep.cos() + dir * sep.sin())?;
                    if comp.contains(v) {
                        let chord = (v.vec() - u.vec()).norm();
                        incs.push((f(v) - f(u)).abs() / chord);
                    }
                }
            }
            incs.sort_by(f64::total_cmp);
            last_q = quantile(&incs, 0.9);
            report.table.push(
                Witness::new(format!("{}@{sep:e}", comp.id))
                    .with("separation", sep)
                    .with("pairs", incs.len() as f64)
                    .with("median", quantile(&incs, 0.5))
                    .with("q90", last_q),
            );
        }
        worst = worst.max(last_q);
        if last_q > eps {
            report.witnesses.push(Witness::new(comp.id.clone()).with("q90", last_q).with("eps", eps));
        }
    }
    report.margin("max_final_q90", worst);
    report.margin("eps", eps);
    let pass = report.witnesses.is_empty();
    Ok(report.conclude(pass))
}

/// Per-component ratio table of a dilation report, keyed by component id.
pub fn component_ratios(report: &CheckReport) -> BTreeMap<String, f64> {
    report.table.iter().filter_map(|w| w.values.get("ratio").map(|r| (w.set.clone(), *r))).collect()
}
