use std::path::Path;

use gil_core::body::generate::{cross_polytope, cube, frustum, random_polytope};
use gil_core::body::json::format_rational;
use gil_core::body::{BodyFile, Polytope};
use gil_core::gauss_image::{boundary_inclusion_check, GaussError, GaussMap, QuerySet};
use gil_core::measure::{
    gauss_image_measure, grid_partition, monte_carlo_area, SphericalMeasure, TestFamily, EPS_MEAS,
};
use gil_core::report::{CheckReport, Witness};
use gil_core::rng::substream;
use gil_core::sphere::{sample_sphere, SphericalRegion, UnitVec, Vec3};
use gil_core::uniqueness::{
    ae_equal_check, dilation_component_check, ratio_increment_check, ratio_partition, simultaneous_map_check,
    RatioLabel, SupportComponents, UniquenessError, DILATION_CHECK, RATIO_INCREMENT_CHECK, SIMULTANEOUS_CHECK,
};
use gil_core::variation::{harmonic_mean, lipschitz_scan, sweep_inclusion_check, HarmonicPath};
use serde_json::{json, Value};

use crate::output::{
    body_file_json, body_json, emit, load_body, load_exact_body, load_measure, load_query, path_value, record, to_json,
    write_csv, write_table_csv, CliError,
};
use crate::{Command, Family, Kind, Mode, Outputs, UniquenessCheck};

/// Double-polar deviation allowed in float mode.
const POLAR_TOL: f64 = 1e-7;
/// Relative error allowed in the radial identity of the harmonic path.
const HARMONIC_TOL: f64 = 1e-9;
/// Separations for the continuity probe of the simultaneous map.
const PROBE_DELTAS: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];
/// Pair separations for the ratio increment check.
const INCREMENT_SEPS: [f64; 4] = [0.1, 0.01, 1e-3, 1e-4];

/// Runs one command; `Ok(pass)` on completion.
pub fn run(cmd: Command) -> Result<bool, CliError> {
    match cmd {
        Command::Generate { kind, scale, m, seed, out } => generate(kind, scale, m, seed, out.as_deref()),
        Command::Polar { k, mode, artifact, outputs } => polar(&k, mode, artifact.as_deref(), &outputs),
        Command::GaussImage { k, omega, reverse, samples, artifact, outputs } => {
            gauss_image(&k, &omega, reverse, samples, artifact.as_deref(), &outputs)
        }
        Command::Measure { k, l, lambda, omega, samples, seed, outputs } => {
            measure(&k, l.as_deref(), &lambda, &omega, samples, seed, &outputs)
        }
        Command::Harmonic { k, l, t_count, samples, seed, t, artifact, outputs } => {
            harmonic(&k, &l, t_count, samples, seed, t, artifact.as_deref(), &outputs)
        }
        Command::LipschitzScan { k, l, omega, t_count, resolution, outputs } => {
            let (kb, lb, q) = (load_body(&k)?, load_body(&l)?, load_query(&omega)?);
            let (mut report, rows) = lipschitz_scan(&kb, &lb, &q, t_count, resolution).map_err(CliError::input)?;
            record(
                &mut report,
                "lipschitz-scan",
                vec![
                    ("k", path_value(&k)),
                    ("l", path_value(&l)),
                    ("omega", path_value(&omega)),
                    ("t_count", json!(t_count)),
                    ("resolution", json!(resolution)),
                ],
            );
            if let Some(csv) = &outputs.csv {
                let rows: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| vec![r.t.to_string(), r.d_h.to_string(), r.ratio.to_string(), r.bound.to_string()])
                    .collect();
                write_csv(csv, &["t", "d_H", "ratio", "bound"], &rows)?;
            }
            finish(report, &outputs, false)
        }
        Command::SweepCheck { k, l, omega, t_count, samples, resolution, seed, outputs } => {
            let (kb, lb) = (load_body(&k)?, load_body(&l)?);
            let QuerySet::Polygon(gamma) = load_query(&omega)? else {
                return Err(CliError::Input("sweep-check needs a polygon query set".into()));
            };
            let mut report =
                sweep_inclusion_check(&kb, &lb, &gamma, t_count, samples, seed, resolution).map_err(CliError::input)?;
            record(
                &mut report,
                "sweep-check",
                vec![
                    ("k", path_value(&k)),
                    ("l", path_value(&l)),
                    ("omega", path_value(&omega)),
                    ("t_count", json!(t_count)),
                    ("samples", json!(samples)),
                    ("resolution", json!(resolution)),
                    ("seed", json!(seed)),
                ],
            );
            finish(report, &outputs, true)
        }
        Command::UniquenessCheck {
            k,
            l,
            lambda,
            check,
            max_union,
            samples,
            resolution,
            eps,
            mode,
            family,
            outputs,
        } => {
            let knobs = vec![
                ("k", path_value(&k)),
                ("l", path_value(&l)),
                ("lambda", path_value(&lambda)),
                ("max_union", json!(max_union)),
                ("samples", json!(samples)),
                ("resolution", json!(resolution)),
                ("eps", json!(eps)),
                ("mode", json!(mode.name())),
                ("family_diameter", json!(family.family_diameter)),
                ("seed", json!(family.seed)),
            ];
            let (kb, lb, lam) = (load_body(&k)?, load_body(&l)?, load_measure(&lambda)?);
            if mode == Mode::Rational && !matches!(lam, SphericalMeasure::Atoms(_)) {
                return Err(CliError::Input("rational mode applies to atom measures only".into()));
            }
            let fam = family_for(&family, &lam, &kb, &lb)?;
            let mut ae = ae_equal_check(&kb, &lb, &lam, &fam, max_union);
            if mode == Mode::Rational && ae.passed() && ae.margins["max_s"] != 0.0 {
                // Atom masses are sums of weights, so agreement means exactly zero.
                ae.margin("tolerance", 0.0);
                ae = ae.conclude(false);
            }
            let comps = SupportComponents::from_measure(&lam);
            let seed = family.seed;
            let mut report = match check {
                UniquenessCheck::Ae => ae,
                UniquenessCheck::SimultaneousMap => hypothesis(
                    SIMULTANEOUS_CHECK,
                    &ae,
                    simultaneous_map_check(&kb, &lb, &comps, samples, &PROBE_DELTAS, resolution, seed, &ae)
                        .map(|(r, _)| r),
                )?,
                UniquenessCheck::RatioIncrement => hypothesis(
                    RATIO_INCREMENT_CHECK,
                    &ae,
                    ratio_increment_check(&kb, &lb, &comps, eps, &INCREMENT_SEPS, samples, seed, &ae),
                )?,
            };
            record(&mut report, "uniqueness-check", knobs);
            finish(report, &outputs, true)
        }
        Command::DilationCheck { k, l, lambda, samples, family, outputs } => {
            let (kb, lb, lam) = (load_body(&k)?, load_body(&l)?, load_measure(&lambda)?);
            let fam = family_for(&family, &lam, &kb, &lb)?;
            let ae = ae_equal_check(&kb, &lb, &lam, &fam, 3);
            let comps = SupportComponents::from_measure(&lam);
            let mut report =
                hypothesis(DILATION_CHECK, &ae, dilation_component_check(&kb, &lb, &comps, samples, family.seed, &ae))?;
            record(
                &mut report,
                "dilation-check",
                vec![
                    ("k", path_value(&k)),
                    ("l", path_value(&l)),
                    ("lambda", path_value(&lambda)),
                    ("samples", json!(samples)),
                    ("family_diameter", json!(family.family_diameter)),
                    ("seed", json!(family.seed)),
                ],
            );
            finish(report, &outputs, true)
        }
        Command::RatioPartition { k, l, grid, family, outputs } => ratio_partition_cmd(&k, &l, grid, &family, &outputs),
    }
}

/// Writes the report and, when asked and `table_csv` is set, its table.
fn finish(report: CheckReport, outputs: &Outputs, table_csv: bool) -> Result<bool, CliError> {
    if table_csv {
        if let Some(csv) = &outputs.csv {
            write_table_csv(csv, &report)?;
        }
    }
    emit(outputs.out.as_deref(), &to_json(&report))?;
    Ok(report.passed())
}

/// Family respecting `λ` whose cell edges also stay clear of the vertex
/// directions of both bodies, where the image jumps.
fn family_for(f: &Family, lambda: &SphericalMeasure, k: &Polytope, l: &Polytope) -> Result<TestFamily, CliError> {
    let mut avoid: Vec<UnitVec> = k.vertex_dirs().to_vec();
    avoid.extend_from_slice(l.vertex_dirs());
    grid_partition(f.family_diameter, f.seed, std::slice::from_ref(lambda), &avoid).map_err(CliError::input)
}

/// A checker that needs a passing a.e. report: a refused hypothesis is a
/// failed check, other errors are input errors.
fn hypothesis(
    name: &str,
    ae: &CheckReport,
    result: Result<CheckReport, UniquenessError>,
) -> Result<CheckReport, CliError> {
    match result {
        Ok(r) => Ok(r),
        Err(UniquenessError::HypothesisNotEstablished(why)) => {
            let mut r = CheckReport::new(name);
            r.config("hypothesis", why);
            let mut w = Witness::new(ae.check.clone());
            for key in ["max_s", "max_m"] {
                if let Some(v) = ae.margins.get(key) {
                    w = w.with(key, *v);
                }
            }
            r.witnesses.push(w);
            Ok(r.conclude(false))
        }
        Err(e) => Err(CliError::input(e)),
    }
}

fn generate(kind: Kind, scale: f64, m: usize, seed: u64, out: Option<&Path>) -> Result<bool, CliError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::Input(format!("scale must be positive, got {scale}")));
    }
    let body = match kind {
        Kind::Cube => cube(scale),
        Kind::Cross => cross_polytope(scale),
        Kind::Frustum => frustum(),
        Kind::Random => random_polytope(m, seed).map_err(CliError::input)?,
    };
    emit(out, &body_json(&body))?;
    Ok(true)
}

fn vertex_table(report: &mut CheckReport, vs: &[Vec3]) {
    for (i, v) in vs.iter().enumerate() {
        report.table.push(Witness::new(format!("vertex-{i}")).with("x", v.x).with("y", v.y).with("z", v.z));
    }
}

fn polar(k: &Path, mode: Mode, artifact: Option<&Path>, outputs: &Outputs) -> Result<bool, CliError> {
    let mut report = CheckReport::new("polar-round-trip");
    let (pass, rows, body): (bool, Vec<Vec<String>>, String) = match mode {
        Mode::Float => {
            let kb = load_body(k)?;
            let p = kb.polar().map_err(CliError::input)?;
            let dev = kb.vertex_set_distance(&p.polar().map_err(CliError::input)?);
            report.margin("deviation", dev);
            report.margin("tolerance", POLAR_TOL);
            report.margin("facets", p.facets().len() as f64);
            vertex_table(&mut report, p.vertices());
            let rows = p.vertices().iter().map(|v| vec![v.x.to_string(), v.y.to_string(), v.z.to_string()]).collect();
            (dev <= POLAR_TOL, rows, body_json(&p))
        }
        Mode::Rational => {
            let e = load_exact_body(k)?;
            let p = e.polar().map_err(CliError::input)?;
            let same = p.polar().map_err(CliError::input)?.same_vertex_set(&e);
            report.margin("exact_match", if same { 1.0 } else { 0.0 });
            report.margin("facets", p.facets().len() as f64);
            vertex_table(&mut report, p.to_float().map_err(CliError::input)?.vertices());
            let rows = p.vertices().iter().map(|v| v.iter().map(format_rational).collect()).collect();
            (same, rows, body_file_json(&BodyFile::from_exact(&p)))
        }
    };
    record(&mut report, "polar", vec![("k", path_value(k)), ("mode", json!(mode.name()))]);
    if let Some(csv) = &outputs.csv {
        write_csv(csv, &["x", "y", "z"], &rows)?;
    }
    if let Some(a) = artifact {
        emit(Some(a), &body)?;
    }
    finish(report.conclude(pass), outputs, false)
}

fn region_rows(region: &SphericalRegion) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut push = |kind: &str, i: usize, j: usize, u: UnitVec| {
        let v = u.vec();
        rows.push(vec![
            kind.to_string(),
            i.to_string(),
            j.to_string(),
            v.x.to_string(),
            v.y.to_string(),
            v.z.to_string(),
        ]);
    };
    for (i, p) in region.points.iter().enumerate() {
        push("point", i, 0, *p);
    }
    for (i, a) in region.arcs.iter().enumerate() {
        push("arc", i, 0, a.start());
        push("arc", i, 1, a.end());
    }
    for (i, p) in region.polygons.iter().enumerate() {
        for (j, v) in p.vertices().iter().enumerate() {
            push("polygon", i, j, *v);
        }
    }
    rows
}

fn gauss_image(
    k: &Path,
    omega: &Path,
    reverse: bool,
    samples: usize,
    artifact: Option<&Path>,
    outputs: &Outputs,
) -> Result<bool, CliError> {
    let (kb, q) = (load_body(k)?, load_query(omega)?);
    // The reverse image of K is the image of its polar.
    let body = if reverse { kb.polar().map_err(CliError::input)? } else { kb };
    let value = GaussMap::new(&body).image(&q);
    let mut report = match boundary_inclusion_check(&body, &q, samples) {
        Ok(r) => r,
        Err(GaussError::UnsupportedBoundary) => {
            let mut r = CheckReport::new("gauss-image");
            r.config("boundary_check", "skipped: no polygonal boundary for this query set");
            r
        }
        Err(e) => return Err(CliError::input(e)),
    };
    let region = &value.region;
    report.margin("points", region.points.len() as f64);
    report.margin("arcs", region.arcs.len() as f64);
    report.margin("polygons", region.polygons.len() as f64);
    report.margin("area", region.area());
    record(
        &mut report,
        "gauss-image",
        vec![
            ("k", path_value(k)),
            ("omega", path_value(omega)),
            ("reverse", json!(reverse)),
            ("samples", json!(samples)),
        ],
    );
    if let Some(csv) = &outputs.csv {
        write_csv(csv, &["stratum", "index", "vertex", "x", "y", "z"], &region_rows(region))?;
    }
    if let Some(a) = artifact {
        emit(Some(a), &to_json(&value))?;
    }
    finish(report, outputs, false)
}

fn measure(
    k: &Path,
    l: Option<&Path>,
    lambda: &Path,
    omega: &Path,
    samples: usize,
    seed: u64,
    outputs: &Outputs,
) -> Result<bool, CliError> {
    let (kb, lam, q) = (load_body(k)?, load_measure(lambda)?, load_query(omega)?);
    let mut report = CheckReport::new("gauss-image-measure");
    let total = lam.total_mass();
    let value = gauss_image_measure(&lam, &kb, &q);
    report.margin("value", value);
    report.margin("total_mass", total);
    let mut pass = (0.0..=total + EPS_MEAS).contains(&value);
    if matches!(lam, SphericalMeasure::Uniform) && samples > 0 {
        // Girard areas against a Monte Carlo estimate of the same region.
        let region = GaussMap::new(&kb).image(&q).region;
        let (est, se) = monte_carlo_area(&region, samples, seed);
        let gap = (value - est).abs();
        report.margin("monte_carlo", est);
        report.margin("standard_error", se);
        pass &= gap <= 4.0 * se + EPS_MEAS;
    }
    let mut knobs = vec![
        ("k", path_value(k)),
        ("lambda", path_value(lambda)),
        ("omega", path_value(omega)),
        ("samples", json!(samples)),
        ("seed", json!(seed)),
    ];
    if let Some(l) = l {
        let other = gauss_image_measure(&lam, &load_body(l)?, &q);
        report.margin("value_l", other);
        report.margin("difference", (value - other).abs());
        knobs.push(("l", path_value(l)));
    }
    record(&mut report, "measure", knobs);
    if !pass {
        report.witnesses.push(Witness { set: "omega".into(), values: report.margins.clone() });
    }
    finish(report.conclude(pass), outputs, false)
}

#[allow(clippy::too_many_arguments)]
fn harmonic(
    k: &Path,
    l: &Path,
    t_count: usize,
    samples: usize,
    seed: u64,
    t: Option<f64>,
    artifact: Option<&Path>,
    outputs: &Outputs,
) -> Result<bool, CliError> {
    let (kb, lb) = (load_body(k)?, load_body(l)?);
    let path = HarmonicPath::uniform(&kb, &lb, t_count).map_err(CliError::input)?;
    let mut report = CheckReport::new("harmonic-path");
    let mut worst: f64 = 0.0;
    for (i, (m, &ti)) in path.bodies().zip(path.t_grid()).enumerate() {
        // 1/ρ of the path interpolates 1/ρ of the ends linearly.
        let mut rng = substream(seed, "harmonic-identity", i as u64);
        let err = (0..samples)
            .map(|_| {
                let u = sample_sphere(&mut rng);
                let want = (1.0 - ti) / kb.radial(u) + ti / lb.radial(u);
                (1.0 / m.radial(u) - want).abs() / want
            })
            .fold(0.0, f64::max);
        worst = worst.max(err);
        let radii = m.radii();
        report.table.push(
            Witness::new(format!("t-{i}"))
                .with("t", ti)
                .with("vertices", m.vertices().len() as f64)
                .with("facets", m.facets().len() as f64)
                .with("r", radii.r)
                .with("R", radii.big_r)
                .with("identity_error", err),
        );
    }
    let bodies: Vec<&Polytope> = path.bodies().collect();
    let ends = bodies[0].vertex_set_distance(&kb).max(bodies[bodies.len() - 1].vertex_set_distance(&lb));
    report.margin("max_identity_error", worst);
    report.margin("endpoint_deviation", ends);
    report.margin("tolerance", HARMONIC_TOL);
    let mut knobs = vec![
        ("k", path_value(k)),
        ("l", path_value(l)),
        ("t_count", json!(t_count)),
        ("samples", json!(samples)),
        ("seed", json!(seed)),
    ];
    if let (Some(t), Some(a)) = (t, artifact) {
        let m = harmonic_mean(&kb, &lb, t).map_err(CliError::input)?;
        emit(Some(a), &body_json(&m))?;
        knobs.push(("t", json!(t)));
    }
    record(&mut report, "harmonic", knobs);
    let pass = worst <= HARMONIC_TOL && ends == 0.0;
    finish(report.conclude(pass), outputs, true)
}

fn label_name(l: RatioLabel) -> &'static str {
    match l {
        RatioLabel::Greater => "greater",
        RatioLabel::Less => "less",
        RatioLabel::Equal => "equal",
        RatioLabel::Mixed => "mixed",
    }
}

/// Numeric label in the report table: 1 for ρ_K > ρ_L, −1 for ρ_K < ρ_L,
/// 0 for equality and 2 for mixed cells.
fn label_code(l: RatioLabel) -> f64 {
    match l {
        RatioLabel::Greater => 1.0,
        RatioLabel::Less => -1.0,
        RatioLabel::Equal => 0.0,
        RatioLabel::Mixed => 2.0,
    }
}

fn ratio_partition_cmd(k: &Path, l: &Path, grid: usize, family: &Family, outputs: &Outputs) -> Result<bool, CliError> {
    let (kb, lb) = (load_body(k)?, load_body(l)?);
    let mut avoid: Vec<UnitVec> = kb.vertex_dirs().to_vec();
    avoid.extend_from_slice(lb.vertex_dirs());
    let fam = grid_partition(family.family_diameter, family.seed, &[], &avoid).map_err(CliError::input)?;
    let labels = ratio_partition(&kb, &lb, &fam, grid);
    let mut report = CheckReport::new("lemma-5.6-ratio-partition");
    let mut rows = Vec::with_capacity(labels.len());
    for c in &labels {
        let center = fam.cells[c.cell].vertices().iter().fold(Vec3::ZERO, |s, v| s + v.vec());
        let center = center.try_normalize(1e-12).unwrap_or(center);
        report.table.push(
            Witness::new(format!("cell-{}", c.cell))
                .with("label", label_code(c.label))
                .with("min_rel", c.min_rel)
                .with("max_rel", c.max_rel),
        );
        rows.push(vec![
            c.cell.to_string(),
            label_name(c.label).to_string(),
            c.min_rel.to_string(),
            c.max_rel.to_string(),
            center.x.to_string(),
            center.y.to_string(),
            center.z.to_string(),
        ]);
    }
    for l in [RatioLabel::Greater, RatioLabel::Less, RatioLabel::Equal, RatioLabel::Mixed] {
        report.margin(label_name(l), labels.iter().filter(|c| c.label == l).count() as f64);
    }
    record(
        &mut report,
        "ratio-partition",
        vec![
            ("k", path_value(k)),
            ("l", path_value(l)),
            ("grid", json!(grid)),
            ("family_diameter", json!(family.family_diameter)),
            ("seed", json!(family.seed)),
            ("cells", Value::from(fam.cells.len())),
        ],
    );
    if let Some(csv) = &outputs.csv {
        write_csv(csv, &["cell", "label", "min_rel", "max_rel", "center_x", "center_y", "center_z"], &rows)?;
    }
    finish(report.conclude(true), outputs, false)
}
