//! The diagnostics report: every metric for every configured row of the
//! ablation grid, plus pass/fail checks against pinned thresholds.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use anyhow::{Context, Result};
use hyplane::layout::{layout_for, LayoutKind, UnifiedMap};
use hyplane::metrics::{
    density_cov, density_cov_uniform_square, mirror_entanglement, polar_sensitivity, seam_gap, utilization_report,
};
use hyplane::rng::mix64;
use hyplane::{primary_sphere, MetricReport, ReprOptions, Variant, WarpKind};
use serde::{Deserialize, Serialize};

use crate::config::{Config, ReportConfig, RowConfig};

pub const REPORT_VERSION: u32 = 1;

/// Naive rows between 10 and 170 degrees colatitude follow the `sin(theta)`
/// row law at least this closely.
pub const ROW_LAW_TOLERANCE: f64 = 0.10;
pub const ELLIPTICAL_UTILIZATION_FLOOR: f64 = 0.99;
pub const DISC_UTILIZATION_TOLERANCE: f64 = 0.01;
/// Largest seam-to-interior median gap ratio for equal-area warps.
pub const SEAM_MEDIAN_RATIO_CEILING: f64 = 2.0;
/// Smallest naive seam max gap over the interior median.
pub const NAIVE_SEAM_FLOOR: f64 = 10.0;
/// Largest fraction of points whose aggregate feature survives a mirror
/// reflection unchanged, for variants with a sphere.
pub const MIRROR_IDENTICAL_CEILING: f64 = 0.01;
/// Band for the elliptical polar/equatorial sensitivity ratio and for the
/// naive ratio measured against its Jacobian prediction.
pub const POLAR_BAND: (f64, f64) = (0.5, 2.0);
/// Naive polar caps are at least this much more sensitive than the equator.
pub const NAIVE_POLAR_FLOOR: f64 = 5.0;
/// Naive over elliptical density CoV. The continuum limit at 64 bins is
/// about 2.25; sampling noise brings the measured value to about 2.2.
pub const DENSITY_RATIO_FLOOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `section.key` the value came from.
    pub metric: String,
    pub value: f64,
    pub op: Op,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: String, metric: String, value: f64, op: Op, threshold: f64) -> Self {
        let passed = match op {
            Op::AtLeast => value >= threshold,
            Op::AtMost => value <= threshold,
        };
        Self {
            name,
            metric,
            value,
            op,
            threshold,
            passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub label: String,
    pub variant: Variant,
    pub layout: LayoutKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warp: Option<WarpKind>,
    pub sections: Vec<MetricReport>,
}

impl RowReport {
    pub fn section(&self, prefix: &str) -> Option<&MetricReport> {
        self.sections.iter().find(|s| s.name.split('/').next() == Some(prefix))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub seed: u64,
    pub size: usize,
    pub channels: usize,
    pub parameters: ReportConfig,
    pub rows: Vec<RowReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("report is plain data");
        v.push(b'\n');
        v
    }
}

fn not_applicable(name: &str) -> MetricReport {
    let mut r = MetricReport::new(&format!("{name}/not-applicable"));
    r.meta("applicable", 0);
    r
}

/// Seeds for the independent parts of one report.
fn sub_seed(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ mix64(tag))
}

/// Per-warp metrics repeat across rows; compute each once.
#[derive(Default)]
struct Cache {
    density: HashMap<Option<WarpKind>, MetricReport>,
    utilization: HashMap<Option<WarpKind>, MetricReport>,
}

fn warp_sections(cache: &mut Cache, warp: Option<WarpKind>, p: &ReportConfig, seed: u64) -> Result<[MetricReport; 2]> {
    let density = match cache.density.get(&warp) {
        Some(r) => r.clone(),
        None => {
            let s = sub_seed(seed, 1);
            let r = match warp {
                Some(k) => density_cov(k, p.bins, p.samples, s)?,
                None => density_cov_uniform_square(p.bins, p.samples, s)?,
            };
            cache.density.insert(warp, r.clone());
            r
        }
    };
    let util = match cache.utilization.get(&warp) {
        Some(r) => r.clone(),
        None => {
            let r = utilization_report(warp, p.utilization_resolution, p.utilization_samples, sub_seed(seed, 2))?;
            cache.utilization.insert(warp, r.clone());
            r
        }
    };
    Ok([density, util])
}

fn row_report(cfg: &Config, row: &RowConfig, cache: &mut Cache) -> Result<RowReport> {
    let p = &cfg.report;
    let warp = row.effective_warp();
    let layout = layout_for(row.variant, row.layout, cfg.size)?;
    let map = UnifiedMap::random(layout, cfg.channels, sub_seed(cfg.seed, 3))?;
    let opts = ReprOptions {
        warp: warp.unwrap_or(WarpKind::LaeaElliptical),
        depth: cfg.depth,
        cap: None,
    };
    let rep = map.build(row.variant, &opts)?;
    let [density, util] = warp_sections(cache, warp, p, cfg.seed)?;
    let (seam, polar) = match primary_sphere(&rep) {
        Some(sp) => (
            seam_gap(sp, p.seam_pairs, p.seam_delta, sub_seed(cfg.seed, 4))?,
            polar_sensitivity(sp, p.polar_samples, sub_seed(cfg.seed, 5))?,
        ),
        None => (not_applicable("seam_gap"), not_applicable("polar_sensitivity")),
    };
    let mirror = mirror_entanglement(&rep, p.mirror_points, sub_seed(cfg.seed, 6))?;
    Ok(RowReport {
        label: row.label(),
        variant: row.variant,
        layout: row.layout,
        warp,
        sections: vec![density, util, seam, mirror, polar],
    })
}

fn value(row: &RowReport, section: &str, key: &str) -> (String, f64) {
    let s = row.section(section).expect("every row has all sections");
    (format!("{}.{key}", s.name), s.get(key).unwrap_or(f64::NAN))
}

fn row_checks(row: &RowReport, out: &mut Vec<Check>) {
    let mut check = |what: &str, (metric, v): (String, f64), op, t| {
        out.push(Check::new(format!("{}: {what}", row.label), metric, v, op, t));
    };
    match row.warp {
        Some(WarpKind::NaiveThetaPhi) => {
            check(
                "row density follows sin(theta)",
                value(row, "density_cov", "row_law_max_rel_error"),
                Op::AtMost,
                ROW_LAW_TOLERANCE,
            );
            check(
                "seam max gap dwarfs interior median",
                value(row, "seam_gap", "seam_max_over_interior_median"),
                Op::AtLeast,
                NAIVE_SEAM_FLOOR,
            );
            check(
                "polar caps oversensitive",
                value(row, "polar_sensitivity", "ratio"),
                Op::AtLeast,
                NAIVE_POLAR_FLOOR,
            );
            let r = value(row, "polar_sensitivity", "ratio_over_predicted");
            check("polar ratio matches prediction (low)", r.clone(), Op::AtLeast, POLAR_BAND.0);
            check("polar ratio matches prediction (high)", r, Op::AtMost, POLAR_BAND.1);
        }
        Some(kind) => {
            let u = value(row, "utilization", "fraction");
            if kind == WarpKind::LaeaElliptical {
                check("utilization", u, Op::AtLeast, ELLIPTICAL_UTILIZATION_FLOOR);
                let r = value(row, "polar_sensitivity", "ratio");
                check("polar cap sensitivity near equator's (low)", r.clone(), Op::AtLeast, POLAR_BAND.0);
                check("polar cap sensitivity near equator's (high)", r, Op::AtMost, POLAR_BAND.1);
            } else {
                check("utilization (low)", u.clone(), Op::AtLeast, FRAC_PI_4 - DISC_UTILIZATION_TOLERANCE);
                check("utilization (high)", u, Op::AtMost, FRAC_PI_4 + DISC_UTILIZATION_TOLERANCE);
            }
            check(
                "seam median gap near interior",
                value(row, "seam_gap", "median_ratio"),
                Op::AtMost,
                SEAM_MEDIAN_RATIO_CEILING,
            );
        }
        None => {}
    }
    if row.variant.has_sphere() {
        check(
            "aggregate changes under mirroring",
            value(row, "mirror_entanglement", "identical_fraction"),
            Op::AtMost,
            MIRROR_IDENTICAL_CEILING,
        );
    }
    if row.variant == Variant::TriPlane {
        check(
            "xy plane identical under mirroring",
            value(row, "mirror_entanglement", "xy.identical_fraction"),
            Op::AtLeast,
            1.0,
        );
    }
}

/// Elliptical against naive for rows that differ only in the warp.
fn pair_checks(rows: &[RowReport], out: &mut Vec<Check>) {
    for e in rows.iter().filter(|r| r.warp == Some(WarpKind::LaeaElliptical)) {
        let naive = rows
            .iter()
            .find(|n| n.variant == e.variant && n.layout == e.layout && n.warp == Some(WarpKind::NaiveThetaPhi));
        let Some(n) = naive else { continue };
        let (_, ce) = value(e, "density_cov", "cov");
        let (_, cn) = value(n, "density_cov", "cov");
        let ratio = cn / ce;
        let metric = "density_cov/naive.cov / density_cov/elliptical.cov".to_string();
        out.push(Check::new(
            format!("{} beats {} on density CoV", e.label, n.label),
            metric.clone(),
            ratio,
            Op::AtLeast,
            1.0,
        ));
        out.push(Check::new(
            format!("{} density CoV ratio over {}", e.label, n.label),
            metric,
            ratio,
            Op::AtLeast,
            DENSITY_RATIO_FLOOR,
        ));
    }
}

pub fn run_report(cfg: &Config) -> Result<Report> {
    cfg.validate()?;
    let mut cache = Cache::default();
    let rows = cfg
        .report
        .rows
        .iter()
        .map(|row| row_report(cfg, row, &mut cache).with_context(|| format!("row {}", row.label())))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for row in &rows {
        row_checks(row, &mut checks);
    }
    pair_checks(&rows, &mut checks);
    Ok(Report {
        version: REPORT_VERSION,
        seed: cfg.seed,
        size: cfg.size,
        channels: cfg.channels,
        parameters: cfg.report.clone(),
        passed: checks.iter().all(|c| c.passed),
        rows,
        checks,
    })
}
