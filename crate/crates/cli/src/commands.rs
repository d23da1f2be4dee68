use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use smooth_rigidity::format::{g17, to_json_pretty};
use smooth_rigidity::geometry::{generate_grid, generate_near_grid, generate_triangle, PointSet};
use smooth_rigidity::poly::{BallSearch, MultiPoly};
use smooth_rigidity::remez::{remez_constant_cached, LpCache, RemezOptions, RemezStatus};
use smooth_rigidity::rigidity::{
    build_report, interior_lower, rigidity_lower_main1, sublevel_example, verify_witness, Provenance, RigidityConfig,
    RigidityReport, SmoothFunction,
};
use smooth_rigidity::vitushkin::{omega, OmegaOptions, OmegaResult};

use crate::args::{CommonArgs, FamilyArgs, FamilyKind, RigidityArgs, VerifyArgs};

/// Lattice step for derivative norms in reports and replays.
const DERIVATIVE_RESOLUTION: f64 = 1.0 / 64.0;
/// Lattice step for sampling sublevel sets.
const SUBLEVEL_SAMPLE: f64 = 1.0 / 128.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INFINITE: i32 = 2;

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    pub d: usize,
    /// `M_{d+1}` recorded when the witness was built.
    pub derivative_norm: f64,
    pub function: SmoothFunction,
}

pub fn read_point_set(path: &Path) -> Result<PointSet> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{');
    let parsed = if is_json {
        PointSet::from_json_str(&text)
    } else {
        PointSet::from_csv(&text)
    };
    parsed.with_context(|| format!("invalid point set in {}", path.display()))
}

fn input_set(common: &CommonArgs) -> Result<PointSet> {
    match &common.input {
        Some(p) => read_point_set(p),
        None => bail!("--input is required"),
    }
}

fn emit(common: &CommonArgs, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn remez_options(common: &CommonArgs) -> RemezOptions {
    RemezOptions {
        search: BallSearch {
            resolution: common.resolution,
            refine_steps: common.refine,
            ..Default::default()
        },
        oracle: common.oracle,
        ..Default::default()
    }
}

fn omega_options(common: &CommonArgs) -> OmegaOptions {
    OmegaOptions {
        grid: common.eps_grid.unwrap_or_default(),
        trace: common.trace,
        ..Default::default()
    }
}

fn rigidity_config(common: &CommonArgs, interior: bool, include_witness: bool) -> RigidityConfig {
    RigidityConfig {
        remez: remez_options(common),
        omega: omega_options(common),
        derivative_resolution: DERIVATIVE_RESOLUTION,
        interior,
        include_witness,
    }
}

fn single_or_array<T: Serialize>(items: &[T]) -> Result<String> {
    Ok(if items.len() == 1 {
        to_json_pretty(&items[0])?
    } else {
        to_json_pretty(&items)?
    })
}

pub fn cmd_remez(common: &CommonArgs) -> Result<i32> {
    let z = input_set(common)?;
    let mut opts = remez_options(common);
    opts.omega = Some(omega_options(common));
    let cache = LpCache::new();
    let mut results = Vec::new();
    for d in common.degree.degrees() {
        results.push(remez_constant_cached(&z, d, &opts, &cache)?);
    }
    emit(common, &single_or_array(&results)?)?;
    let infinite = results.iter().any(|r| r.status == RemezStatus::Infinite);
    Ok(if infinite { EXIT_INFINITE } else { EXIT_OK })
}

pub fn cmd_rigidity(args: &RigidityArgs) -> Result<i32> {
    let common = &args.common;
    let z = input_set(common)?;
    if args.witness_out.is_some() && !common.degree.is_single() {
        bail!("--witness-out needs a single degree");
    }
    let config = rigidity_config(common, args.interior, args.witness_out.is_some());
    let mut reports: Vec<RigidityReport> = Vec::new();
    for d in common.degree.degrees() {
        reports.push(build_report(&z, d, &config)?);
    }
    if let Some(path) = &args.witness_out {
        let r = &reports[0];
        match (&r.witness, &r.upper.construction) {
            (Some(f), Some(b)) => {
                let file = WitnessFile {
                    d: r.d,
                    derivative_norm: b.value,
                    function: f.clone(),
                };
                fs::write(path, format!("{}\n", to_json_pretty(&file)?))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            _ => eprintln!("warning: no bump witness for a degenerate set; {} not written", path.display()),
        }
    }
    for r in &mut reports {
        r.witness = None;
    }
    emit(common, &single_or_array(&reports)?)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OmegaSequence {
    results: Vec<OmegaResult>,
    non_increasing: bool,
}

pub fn cmd_omega(common: &CommonArgs) -> Result<i32> {
    let z = input_set(common)?;
    let opts = omega_options(common);
    let mut results = Vec::new();
    for d in common.degree.degrees() {
        if d == 0 {
            bail!("ω is defined for degrees d ≥ 1");
        }
        results.push(omega(&z, d, &opts)?);
    }
    let text = if results.len() == 1 {
        to_json_pretty(&results[0])?
    } else {
        let non_increasing = results
            .windows(2)
            .all(|w| w[1].certified <= w[0].certified + 1e-12 * w[0].certified.abs().max(1.0));
        to_json_pretty(&OmegaSequence { results, non_increasing })?
    };
    emit(common, &text)?;
    Ok(EXIT_OK)
}

const FAMILY_HEADER: [&str; 15] = [
    "family",
    "param",
    "n",
    "d",
    "size",
    "remez_lower",
    "oracle",
    "rhat",
    "h_r_over_2",
    "rigidity_lower",
    "rigidity_lower_estimate",
    "upper_construction",
    "upper_theorem",
    "fitted_slope",
    "status",
];

#[derive(Default)]
struct FamilyRow {
    param: f64,
    n: usize,
    d: usize,
    size: usize,
    remez_lower: Option<f64>,
    oracle: Option<f64>,
    rhat: Option<f64>,
    h_r_over_2: Option<f64>,
    rigidity_lower: Option<f64>,
    rigidity_lower_estimate: Option<f64>,
    upper_construction: Option<f64>,
    upper_theorem: Option<f64>,
    status: String,
}

fn cell(v: Option<f64>) -> String {
    v.map(g17).unwrap_or_default()
}

/// Least-squares slope of `log y` against `log(1/x)`.
pub fn fitted_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (-x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn report_row(param: f64, z: &PointSet, r: &RigidityReport) -> FamilyRow {
    let status = if r.degenerate { "degenerate" } else { "finite" };
    FamilyRow {
        param,
        n: r.n,
        d: r.d,
        size: z.len(),
        remez_lower: r.remez.lower.is_finite().then_some(r.remez.lower),
        oracle: r.remez.oracle,
        rhat: r.remez.rhat,
        h_r_over_2: None,
        rigidity_lower: Some(r.best_lower()),
        rigidity_lower_estimate: r.lower.main1_estimate.as_ref().map(|b| b.value),
        upper_construction: r.upper.construction.as_ref().map(|b| b.value),
        upper_theorem: r.upper.theorem.as_ref().map(|b| b.value),
        status: status.into(),
    }
}

pub fn cmd_family(args: &FamilyArgs) -> Result<i32> {
    let common = &args.common;
    if args.values.is_empty() {
        bail!("--values lists no family parameters");
    }
    if !common.degree.is_single() {
        bail!("family sweeps take a single degree");
    }
    let d = *common.degree.0.start();
    let config = rigidity_config(common, false, false);
    let mut rows = Vec::new();
    for &v in &args.values {
        let row = match args.family {
            FamilyKind::Triangle => {
                let z = generate_triangle(v)?;
                let mut config = config.clone();
                config.remez.oracle = true;
                let r = build_report(&z, d, &config)?;
                let mut row = report_row(v, &z, &r);
                let remez = r.remez.oracle.unwrap_or(r.remez.lower);
                row.h_r_over_2 = Some(v * remez / 2.0);
                row
            }
            FamilyKind::Grid => {
                let z = generate_grid(args.dim, v)?;
                report_row(v, &z, &build_report(&z, d, &config)?)
            }
            FamilyKind::NearGrid => {
                let z = generate_near_grid(args.dim, v, v / 10.0, common.seed)?;
                report_row(v, &z, &build_report(&z, d, &config)?)
            }
            FamilyKind::Sublevel => {
                let p = MultiPoly::chebyshev_in(args.dim, 2, 0);
                let (z, rec) = sublevel_example(&p, v, SUBLEVEL_SAMPLE)?;
                FamilyRow {
                    param: v,
                    n: args.dim,
                    d: 2,
                    size: z.len(),
                    remez_lower: Some(rec.remez_lower),
                    rhat: Some(rec.rhat_estimate),
                    rigidity_lower: Some(interior_lower(2)),
                    rigidity_lower_estimate: Some(rigidity_lower_main1(v, Provenance::Estimate, 2).value),
                    status: if rec.rhat_within { "within" } else { "exceeds" }.into(),
                    ..Default::default()
                }
            }
        };
        rows.push(row);
    }
    let slope = matches!(args.family, FamilyKind::Grid | FamilyKind::NearGrid)
        .then(|| fitted_slope(&rows.iter().filter_map(|r| Some((r.param, r.upper_construction?))).collect::<Vec<_>>()))
        .flatten();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FAMILY_HEADER)?;
    let family = match args.family {
        FamilyKind::Triangle => "triangle",
        FamilyKind::Grid => "grid",
        FamilyKind::NearGrid => "near-grid",
        FamilyKind::Sublevel => "sublevel",
    };
    for r in &rows {
        w.write_record([
            family.to_string(),
            g17(r.param),
            r.n.to_string(),
            r.d.to_string(),
            r.size.to_string(),
            cell(r.remez_lower),
            cell(r.oracle),
            cell(r.rhat),
            cell(r.h_r_over_2),
            cell(r.rigidity_lower),
            cell(r.rigidity_lower_estimate),
            cell(r.upper_construction),
            cell(r.upper_theorem),
            cell(slope),
            r.status.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
    let text = String::from_utf8(bytes)?;
    emit(common, text.trim_end())?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let z = input_set(&args.common)?;
    let text = fs::read_to_string(&args.witness).with_context(|| format!("cannot read {}", args.witness.display()))?;
    let file: WitnessFile =
        serde_json::from_str(&text).with_context(|| format!("invalid witness file {}", args.witness.display()))?;
    let check = verify_witness(&file.function, &z, file.d, Some(file.derivative_norm), DERIVATIVE_RESOLUTION)?;
    for m in &check.messages {
        eprintln!("verify: {m}");
    }
    emit(&args.common, &to_json_pretty(&check)?)?;
    Ok(if check.passed { EXIT_OK } else { EXIT_FAILURE })
}
