//! Monte-Carlo diagnostics of the warps and representations: sample density
//! on the feature map, map utilization, seam gaps, mirror entanglement and
//! polar noise sensitivity.
//!
//! Sampling runs in fixed chunks, each with its own PRNG stream derived from
//! the seed, so results do not depend on the thread count.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dir_to_cartesian, SphericalDir, Vec3};
use crate::plane::{FeatureGrid, SphericalPlane};
use crate::repr::{mirror_pair_features, Representation};
use crate::rng::SplitMix64;
use crate::warp::{sphere_to_uv, Uv, WarpKind};

/// Samples per PRNG stream.
pub const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub name: String,
    pub scalars: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub histograms: BTreeMap<String, Histogram>,
    pub metadata: BTreeMap<String, u64>,
}

impl MetricReport {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    /// Non-finite values are stored as zero so the report stays valid JSON.
    pub fn scalar(&mut self, key: &str, value: f64) -> &mut Self {
        self.scalars.insert(key.to_string(), if value.is_finite() { value } else { 0.0 });
        self
    }

    pub fn meta(&mut self, key: &str, value: u64) -> &mut Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.scalars.get(key).copied()
    }
}

/// Runs `f(rng, len)` over `n` samples split into [`CHUNK`]-sized pieces and
/// returns the per-chunk results in chunk order.
fn chunked<T: Send>(n: usize, seed: u64, f: impl Fn(&mut SplitMix64, usize) -> T + Sync) -> Vec<T> {
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitMix64::stream(seed, i as u64);
            f(&mut rng, CHUNK.min(n - i * CHUNK))
        })
        .collect()
}

/// Bin-count histogram over `bins x bins` cells of the square.
fn histogram2d(n: usize, seed: u64, bins: usize, sample: impl Fn(&mut SplitMix64) -> Uv + Sync) -> Vec<u64> {
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitMix64::stream(seed, i as u64);
            let mut counts = vec![0u64; bins * bins];
            for _ in 0..CHUNK.min(n - i * CHUNK) {
                let q = sample(&mut rng);
                counts[bin_of(q.v, bins) * bins + bin_of(q.u, bins)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; bins * bins],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[inline]
fn bin_of(x: f64, bins: usize) -> usize {
    ((0.5 * (x + 1.0) * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

/// Which bins of a `bins x bins` split of the square the warp's image
/// touches, and which it covers entirely.
fn image_bins(kind: Option<WarpKind>, bins: usize) -> (Vec<bool>, Vec<bool>) {
    let n = bins * bins;
    if kind != Some(WarpKind::LaeaDiscOnly) {
        return (vec![true; n], vec![true; n]);
    }
    let side = 2.0 / bins as f64;
    let mut touch = vec![false; n];
    let mut inside = vec![false; n];
    for r in 0..bins {
        for c in 0..bins {
            let (u0, v0) = (-1.0 + c as f64 * side, -1.0 + r as f64 * side);
            let (u1, v1) = (u0 + side, v0 + side);
            let near_u = 0.0f64.clamp(u0, u1);
            let near_v = 0.0f64.clamp(v0, v1);
            let far_u = u0.abs().max(u1.abs());
            let far_v = v0.abs().max(v1.abs());
            touch[r * bins + c] = near_u.hypot(near_v) < 1.0;
            inside[r * bins + c] = far_u.hypot(far_v) <= 1.0;
        }
    }
    (touch, inside)
}

fn cov_of(counts: &[u64], mask: &[bool]) -> (f64, f64, f64, usize) {
    let sel: Vec<f64> = counts.iter().zip(mask).filter(|(_, &m)| m).map(|(&c, _)| c as f64).collect();
    let k = sel.len();
    let mean = sel.iter().sum::<f64>() / k as f64;
    let var = sel.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / k as f64;
    let min = sel.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sel.iter().copied().fold(0.0, f64::max);
    (var.sqrt() / mean, min / mean, max / mean, k)
}

fn density_report(
    name: &str,
    kind: Option<WarpKind>,
    bins: usize,
    n_samples: usize,
    seed: u64,
    sample: impl Fn(&mut SplitMix64) -> Uv + Sync,
) -> Result<MetricReport> {
    if bins < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 bins, got {bins}")));
    }
    if n_samples < 100_000 {
        return Err(Error::InvalidArgument(format!("need at least 1e5 samples, got {n_samples}")));
    }
    let counts = histogram2d(n_samples, seed, bins, sample);
    let (touch, inside) = image_bins(kind, bins);
    let (cov, min_d, max_d, k) = cov_of(&counts, &touch);
    let (cov_inside, _, _, k_inside) = cov_of(&counts, &inside);
    let mut rep = MetricReport::new(name);
    rep.scalar("cov", cov)
        .scalar("cov_interior", cov_inside)
        .scalar("min_density", min_d)
        .scalar("max_density", max_d)
        .scalar("poisson_floor", (k as f64 / n_samples as f64).sqrt())
        .meta("bins", bins as u64)
        .meta("image_bins", k as u64)
        .meta("interior_bins", k_inside as u64)
        .meta("samples", n_samples as u64)
        .meta("seed", seed)
        .meta("chunk", CHUNK as u64);

    let rows: Vec<u64> = counts.chunks(bins).map(|r| r.iter().sum()).collect();
    let edges = (0..=bins).map(|j| -1.0 + 2.0 * j as f64 / bins as f64).collect();
    rep.histograms.insert("row_counts".into(), Histogram { edges, counts: rows.clone() });

    if kind == Some(WarpKind::NaiveThetaPhi) {
        // Samples per row follow sin(theta); texels per steradian follow
        // 1 / sin(theta).
        let dtheta = PI / bins as f64;
        let mut worst: f64 = 0.0;
        for (j, &c) in rows.iter().enumerate() {
            let theta = (j as f64 + 0.5) * dtheta;
            if !(PI / 18.0..=PI - PI / 18.0).contains(&theta) {
                continue;
            }
            let predicted = n_samples as f64 * 0.5 * theta.sin() * dtheta;
            worst = worst.max((c as f64 / predicted - 1.0).abs());
        }
        rep.scalar("row_law_max_rel_error", worst);
    }
    Ok(rep)
}

/// Spread of per-bin sample counts when uniform directions are warped onto
/// the square. Bins outside the warp's image are ignored.
pub fn density_cov(kind: WarpKind, bins: usize, n_samples: usize, seed: u64) -> Result<MetricReport> {
    density_report(&format!("density_cov/{kind}"), Some(kind), bins, n_samples, seed, move |rng| {
        sphere_to_uv(rng.sphere_dir(), kind)
    })
}

/// Control: points uniform on the square itself, as a planar feature map
/// sees them.
pub fn density_cov_uniform_square(bins: usize, n_samples: usize, seed: u64) -> Result<MetricReport> {
    density_report("density_cov/uniform-square", None, bins, n_samples, seed, |rng| {
        Uv::new(rng.next_signed(), rng.next_signed())
    })
}

fn utilization_with(resolution: usize, n_samples: usize, seed: u64, sample: impl Fn(&mut SplitMix64) -> Uv + Sync) -> Result<f64> {
    if resolution < 64 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} below 64")));
    }
    let counts = histogram2d(n_samples, seed, resolution, sample);
    Ok(counts.iter().filter(|&&c| c > 0).count() as f64 / counts.len() as f64)
}

/// Fraction of `resolution x resolution` texels hit by at least one of
/// `n_samples` uniform directions.
pub fn utilization(kind: WarpKind, resolution: usize, n_samples: usize, seed: u64) -> Result<f64> {
    utilization_with(resolution, n_samples, seed, move |rng| sphere_to_uv(rng.sphere_dir(), kind))
}

pub fn utilization_uniform_square(resolution: usize, n_samples: usize, seed: u64) -> Result<f64> {
    utilization_with(resolution, n_samples, seed, |rng| Uv::new(rng.next_signed(), rng.next_signed()))
}

pub fn utilization_report(kind: Option<WarpKind>, resolution: usize, n_samples: usize, seed: u64) -> Result<MetricReport> {
    let (name, f) = match kind {
        Some(k) => (format!("utilization/{k}"), utilization(k, resolution, n_samples, seed)?),
        None => ("utilization/uniform-square".to_string(), utilization_uniform_square(resolution, n_samples, seed)?),
    };
    let mut rep = MetricReport::new(&name);
    rep.scalar("fraction", f)
        .meta("resolution", resolution as u64)
        .meta("samples", n_samples as u64)
        .meta("seed", seed);
    Ok(rep)
}

fn feature_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn feature_at(sp: &SphericalPlane, d: SphericalDir) -> Vec<f64> {
    let hit = sp.locate_dir(d);
    let mut out = vec![0.0; sp.grid().channels()];
    sp.accumulate_hit(&hit, 1.0, &mut out);
    out
}

/// Colatitudes used for seam pairs: `|cos theta| <= SEAM_BAND`.
pub const SEAM_BAND: f64 = 0.9;

/// Feature gaps across the `phi = +-pi` seam against interior controls.
///
/// Each seam pair sits at one colatitude, `delta` apart along the parallel
/// and straddling the seam; its control is the same pair rotated to a
/// random interior longitude.
pub fn seam_gap(sp: &SphericalPlane, n_pairs: usize, delta: f64, seed: u64) -> Result<MetricReport> {
    if !(delta > 0.0 && delta <= 1e-2) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 1e-2]")));
    }
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("no pairs requested".into()));
    }
    let parts = chunked(n_pairs, seed, |rng, len| {
        let mut seam = Vec::with_capacity(len);
        let mut interior = Vec::with_capacity(len);
        for _ in 0..len {
            let theta = rng.sphere_dir_in_band(-SEAM_BAND, SEAM_BAND).theta();
            let half = 0.5 * delta / theta.sin();
            let a = feature_at(sp, SphericalDir::new(theta, PI - half));
            let b = feature_at(sp, SphericalDir::new(theta, -PI + half));
            seam.push(feature_dist(&a, &b));
            let phi = rng.uniform(-PI + 2.0 * half, PI - 2.0 * half);
            let a = feature_at(sp, SphericalDir::new(theta, phi - half));
            let b = feature_at(sp, SphericalDir::new(theta, phi + half));
            interior.push(feature_dist(&a, &b));
        }
        (seam, interior)
    });
    let (mut seam, mut interior): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for (s, i) in parts {
        seam.extend(s);
        interior.extend(i);
    }
    let seam_max = seam.iter().copied().fold(0.0, f64::max);
    let interior_max = interior.iter().copied().fold(0.0, f64::max);
    let seam_med = median(&mut seam);
    let interior_med = median(&mut interior);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    let mut rep = MetricReport::new(&format!("seam_gap/{}", sp.kind()));
    rep.scalar("seam_max", seam_max)
        .scalar("seam_median", seam_med)
        .scalar("interior_max", interior_max)
        .scalar("interior_median", interior_med)
        .scalar("median_ratio", ratio(seam_med, interior_med))
        .scalar("max_ratio", ratio(seam_max, interior_max))
        .scalar("seam_max_over_interior_median", ratio(seam_max, interior_med))
        .scalar("delta", delta)
        .meta("pairs", n_pairs as u64)
        .meta("seed", seed);
    Ok(rep)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 && nb == 0.0 {
        1.0
    } else if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[derive(Clone, Default)]
struct MirrorTally {
    cos_sum: f64,
    cos_min: f64,
    identical: u64,
    below_one: u64,
}

impl MirrorTally {
    fn add(&mut self, a: &[f64], b: &[f64]) {
        let c = cosine(a, b);
        self.cos_sum += c;
        self.cos_min = self.cos_min.min(c);
        self.identical += (a == b) as u64;
        self.below_one += (c < 1.0) as u64;
    }

    fn merge(&mut self, o: &MirrorTally) {
        self.cos_sum += o.cos_sum;
        self.cos_min = self.cos_min.min(o.cos_min);
        self.identical += o.identical;
        self.below_one += o.below_one;
    }

    fn write(&self, rep: &mut MetricReport, prefix: &str, n: usize) {
        let n = n as f64;
        rep.scalar(&format!("{prefix}mean_cosine"), self.cos_sum / n)
            .scalar(&format!("{prefix}min_cosine"), self.cos_min)
            .scalar(&format!("{prefix}identical_fraction"), self.identical as f64 / n)
            .scalar(&format!("{prefix}below_one_fraction"), self.below_one as f64 / n);
    }
}

fn fresh_tally() -> MirrorTally {
    MirrorTally {
        cos_min: 1.0,
        ..MirrorTally::default()
    }
}

/// How alike the features at `p` and at its mirror image `(x, y, -z)` are,
/// in aggregate and per constituent plane. Points are uniform in the cube.
pub fn mirror_entanglement(rep: &Representation, n_points: usize, seed: u64) -> Result<MetricReport> {
    if n_points < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 points, got {n_points}")));
    }
    let n_comp = rep.components(Vec3::new(0.1, 0.2, 0.3))?.len();
    let parts = chunked(n_points, seed, |rng, len| -> Result<_> {
        let mut total = fresh_tally();
        let mut comps = vec![fresh_tally(); n_comp];
        let mut names = Vec::new();
        for _ in 0..len {
            let p = loop {
                let p = Vec3::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
                if p.norm() > 1e-6 {
                    break p;
                }
            };
            let m = mirror_pair_features(rep, p)?;
            total.add(&m.at_p, &m.at_mirror);
            for (t, (_, a, b)) in comps.iter_mut().zip(&m.components) {
                t.add(a, b);
            }
            if names.is_empty() {
                names = m.components.into_iter().map(|c| c.0).collect();
            }
        }
        Ok((total, comps, names))
    });
    let mut total = fresh_tally();
    let mut comps = vec![fresh_tally(); n_comp];
    let mut names: Vec<String> = Vec::new();
    for part in parts {
        let (t, c, nm) = part?;
        total.merge(&t);
        for (a, b) in comps.iter_mut().zip(&c) {
            a.merge(b);
        }
        if names.is_empty() {
            names = nm;
        }
    }
    let mut out = MetricReport::new(&format!("mirror_entanglement/{}", rep.variant()));
    total.write(&mut out, "", n_points);
    for (name, t) in names.iter().zip(&comps) {
        t.write(&mut out, &format!("{name}."), n_points);
    }
    out.meta("points", n_points as u64).meta("seed", seed);
    Ok(out)
}

pub const POLAR_CAP: f64 = PI / 18.0;
pub const EQUATOR_HALF_WIDTH: f64 = PI / 36.0;
/// Angular finite-difference step.
pub const FD_STEP: f64 = 1e-4;
pub const DEFAULT_POLAR_SAMPLES: usize = 20_000;

/// Squared directional derivatives (measured, predicted) at `n` random
/// points and tangent directions of one band.
fn band_derivatives(sp: &SphericalPlane, cos_lo: f64, cos_hi: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let frame = *sp.frame();
    let g = sp.grid();
    let (sx, sy) = (0.5 * (g.width() - 1) as f64, 0.5 * (g.height() - 1) as f64);
    // Mean squared directional derivative of bilinear unit-variance noise
    // per unit texel displacement, summed over channels.
    let noise_gain = 4.0 / 3.0 * g.channels() as f64;
    let parts = chunked(n, seed, |rng, len| {
        let mut measured = Vec::with_capacity(len);
        let mut predicted = Vec::with_capacity(len);
        for _ in 0..len {
            let d = rng.sphere_dir_in_band(cos_lo, cos_hi);
            let p = dir_to_cartesian(d, &frame);
            let (st, ct) = d.theta().sin_cos();
            let (sp_, cp) = d.phi().sin_cos();
            let (n_, r_, e_) = (frame.north(), frame.ref_azimuth(), frame.east());
            let e_theta = (r_ * cp + e_ * sp_) * ct - n_ * st;
            let e_phi = e_ * cp - r_ * sp_;
            let psi = PI * rng.next_signed();
            let t = e_theta * psi.cos() + e_phi * psi.sin();
            let q = (p + t * FD_STEP).normalized().expect("unit plus small tangent");
            let (Ok(h0), Ok(h1)) = (sp.locate(p), sp.locate(q)) else {
                continue;
            };
            let mut f0 = vec![0.0; g.channels()];
            let mut f1 = vec![0.0; g.channels()];
            sp.accumulate_hit(&h0, 1.0, &mut f0);
            sp.accumulate_hit(&h1, 1.0, &mut f1);
            let h2 = FD_STEP * FD_STEP;
            measured.push(feature_dist(&f0, &f1).powi(2) / h2);
            let du = (h1.uv.u - h0.uv.u) * sx;
            let dv = (h1.uv.v - h0.uv.v) * sy;
            predicted.push(noise_gain * (du * du + dv * dv) / h2);
        }
        (measured, predicted)
    });
    let mut m = Vec::new();
    let mut pr = Vec::new();
    for (a, b) in parts {
        m.extend(a);
        pr.extend(b);
    }
    (m, pr)
}

/// Median squared feature derivative per radian in the northern polar cap
/// `theta < pi/18` against the equatorial band `|theta - pi/2| < pi/36`, plus
/// the ratio predicted from the warp's texel-scaled Jacobian alone. The
/// southern cap is reported for reference.
pub fn polar_sensitivity(sp: &SphericalPlane, n_samples: usize, seed: u64) -> Result<MetricReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("no samples requested".into()));
    }
    let s_eq = EQUATOR_HALF_WIDTH.sin();
    let c_cap = POLAR_CAP.cos();
    let (mut north, mut north_pred) = band_derivatives(sp, c_cap, 1.0, n_samples, seed);
    let (mut eq, mut eq_pred) = band_derivatives(sp, -s_eq, s_eq, n_samples, seed ^ 0x9e37);
    let (mut south, mut south_pred) = band_derivatives(sp, -1.0, -c_cap, n_samples, seed ^ 0x7f4a);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    let (n_med, e_med, s_med) = (median(&mut north), median(&mut eq), median(&mut south));
    let (np, ep, spr) = (median(&mut north_pred), median(&mut eq_pred), median(&mut south_pred));
    let mut rep = MetricReport::new(&format!("polar_sensitivity/{}", sp.kind()));
    rep.scalar("north_cap_median", n_med)
        .scalar("equator_median", e_med)
        .scalar("south_cap_median", s_med)
        .scalar("ratio", ratio(n_med, e_med))
        .scalar("south_ratio", ratio(s_med, e_med))
        .scalar("predicted_ratio", ratio(np, ep))
        .scalar("predicted_south_ratio", ratio(spr, ep))
        .scalar("ratio_over_predicted", ratio(ratio(n_med, e_med), ratio(np, ep)))
        .meta("samples", n_samples as u64)
        .meta("seed", seed);
    Ok(rep)
}

/// Spherical plane over a fresh unit-variance noise grid, as used by the
/// seam and polar diagnostics.
pub fn noise_sphere(kind: WarpKind, size: usize, channels: usize, seed: u64) -> Result<SphericalPlane> {
    Ok(SphericalPlane::new(
        crate::geometry::SphereFrame::head_top(),
        kind,
        FeatureGrid::random(size, size, channels, seed)?,
    ))
}
