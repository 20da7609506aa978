//! The six plane arrangements behind one `query(point) -> feature` entry
//! point: tri-plane, tri-grid, spherical tri-plane, dual spherical
//! tri-plane, and the two hy-plane variants.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SphereFrame, Vec3};
use crate::plane::{Axis, FeatureGrid, PlanarPlane, SphereHit, SphericalPlane};
use crate::rng::mix64;
use crate::warp::{Uv, WarpKind, LAEA_DISC_RADIUS};

/// Radial normalization of the spherical tri-plane: the cube's half
/// diagonal, so every in-cube point has `u` in range.
pub const RADIAL_MAX: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    TriPlane,
    TriGrid,
    SphericalTriPlane,
    DualSphericalTriPlane,
    #[serde(rename = "hy-plane-31")]
    HyPlane31,
    #[serde(rename = "hy-plane-22")]
    HyPlane22,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::TriPlane,
        Variant::TriGrid,
        Variant::SphericalTriPlane,
        Variant::DualSphericalTriPlane,
        Variant::HyPlane31,
        Variant::HyPlane22,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::TriPlane => "tri-plane",
            Variant::TriGrid => "tri-grid",
            Variant::SphericalTriPlane => "spherical-tri-plane",
            Variant::DualSphericalTriPlane => "dual-spherical-tri-plane",
            Variant::HyPlane31 => "hy-plane-31",
            Variant::HyPlane22 => "hy-plane-22",
        }
    }

    pub fn has_sphere(self) -> bool {
        !matches!(self, Variant::TriPlane | Variant::TriGrid)
    }

    /// Grid names this variant is built from, in canonical order.
    pub fn plane_names(self, depth: usize) -> Vec<String> {
        let fixed: &[&str] = match self {
            Variant::TriPlane => &["xy", "xz", "yz"],
            Variant::TriGrid => {
                return ["xy", "xz", "yz"]
                    .iter()
                    .flat_map(|a| (0..depth).map(move |k| format!("{a}_{k}")))
                    .collect()
            }
            Variant::SphericalTriPlane => &["theta_phi", "r_theta", "r_phi"],
            Variant::DualSphericalTriPlane => {
                &["a_theta_phi", "a_r_theta", "a_r_phi", "b_theta_phi", "b_r_theta", "b_r_phi"]
            }
            Variant::HyPlane31 => &["xy", "xz", "yz", "sphere"],
            Variant::HyPlane22 => &["xy", "yz", "sphere_a", "sphere_b"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .or(match s {
                "hy-plane" | "hyplane-31" | "hy-plane-3+1" => Some(Variant::HyPlane31),
                "hyplane-22" | "hy-plane-2+2" => Some(Variant::HyPlane22),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReprOptions {
    /// Warp used by every spherical plane.
    pub warp: WarpKind,
    /// Parallel grids per axis for the tri-grid.
    pub depth: usize,
    /// Colatitude covered by the secondary sphere of the (2+2) variant;
    /// `None` makes it a full sphere.
    pub cap: Option<f64>,
}

impl Default for ReprOptions {
    fn default() -> Self {
        Self {
            warp: WarpKind::LaeaElliptical,
            depth: 3,
            cap: None,
        }
    }
}

/// Frame of the hy-plane (3+1) sphere and of the spherical tri-plane.
pub fn head_frame() -> SphereFrame {
    SphereFrame::head_top()
}

/// Second sphere of the dual spherical tri-plane, orthogonal to
/// [`head_frame`]: North Pole along +x.
pub fn dual_secondary_frame() -> SphereFrame {
    SphereFrame::axis_aligned(Vec3::X, Vec3::Z)
}

/// Primary (2+2) sphere: North Pole toward the back of the head.
pub fn hyplane22_frame_a() -> SphereFrame {
    SphereFrame::axis_aligned(-Vec3::Z, Vec3::Y)
}

pub fn hyplane22_frame_b() -> SphereFrame {
    hyplane22_frame_a().antipodal()
}

#[derive(Clone, Debug)]
pub struct TriPlane {
    pub xy: PlanarPlane,
    pub xz: PlanarPlane,
    pub yz: PlanarPlane,
}

/// Tri-plane with `D` parallel grids per axis, interpolated linearly along
/// the projection axis. Grids sit at equispaced depths in `[-1, 1]`, or at
/// depth 0 when `D = 1`.
#[derive(Clone, Debug)]
pub struct TriGrid {
    pub xy: Vec<FeatureGrid>,
    pub xz: Vec<FeatureGrid>,
    pub yz: Vec<FeatureGrid>,
}

#[derive(Clone, Debug)]
pub struct SphericalTriPlane {
    pub theta_phi: SphericalPlane,
    /// Indexed by `(2 r / RADIAL_MAX - 1, 2 theta / pi - 1)`.
    pub r_theta: FeatureGrid,
    /// Indexed by `(2 r / RADIAL_MAX - 1, phi / pi)`.
    pub r_phi: FeatureGrid,
}

#[derive(Clone, Debug)]
pub struct DualSphericalTriPlane {
    pub a: SphericalTriPlane,
    pub b: SphericalTriPlane,
}

#[derive(Clone, Debug)]
pub struct HyPlane31 {
    pub xy: PlanarPlane,
    pub xz: PlanarPlane,
    pub yz: PlanarPlane,
    pub sphere: SphericalPlane,
}

#[derive(Clone, Debug)]
pub struct HyPlane22 {
    pub xy: PlanarPlane,
    pub yz: PlanarPlane,
    pub sphere_a: SphericalPlane,
    /// Full sphere or cap around `sphere_a`'s South Pole.
    pub sphere_b: SphericalPlane,
}

#[derive(Clone, Debug)]
pub enum Representation {
    TriPlane(TriPlane),
    TriGrid(TriGrid),
    SphericalTriPlane(SphericalTriPlane),
    DualSphericalTriPlane(DualSphericalTriPlane),
    HyPlane31(HyPlane31),
    HyPlane22(HyPlane22),
}

/// Weights of the dual-sphere blend, `w = (R_max - R)^2`. A direction
/// outside a cap plane's support gets weight zero from that plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlendWeights {
    pub w_a: f64,
    pub w_b: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub r_a_max: f64,
    pub r_b_max: f64,
}

impl BlendWeights {
    pub fn new(r_a: f64, r_b: f64) -> Result<Self> {
        for r in [r_a, r_b] {
            if !(0.0..=LAEA_DISC_RADIUS).contains(&r) {
                return Err(Error::InvalidArgument(format!("disc radius {r} outside [0, 2]")));
            }
        }
        Ok(Self {
            w_a: (LAEA_DISC_RADIUS - r_a).powi(2),
            w_b: (LAEA_DISC_RADIUS - r_b).powi(2),
            r_a,
            r_b,
            r_a_max: LAEA_DISC_RADIUS,
            r_b_max: LAEA_DISC_RADIUS,
        })
    }

    pub fn from_hits(a: &SphericalPlane, hit_a: &SphereHit, b: &SphericalPlane, hit_b: &SphereHit) -> Self {
        let w = |sp: &SphericalPlane, h: &SphereHit| {
            if h.supported {
                (sp.max_disc_radius() - h.disc_radius).max(0.0).powi(2)
            } else {
                0.0
            }
        };
        Self {
            w_a: w(a, hit_a),
            w_b: w(b, hit_b),
            r_a: hit_a.disc_radius,
            r_b: hit_b.disc_radius,
            r_a_max: a.max_disc_radius(),
            r_b_max: b.max_disc_radius(),
        }
    }

    /// `(w_a, w_b) / (w_a + w_b)`.
    pub fn normalized(&self) -> Result<(f64, f64)> {
        let total = self.w_a + self.w_b;
        if !(total > 0.0) {
            return Err(Error::DegenerateBlend);
        }
        Ok((self.w_a / total, self.w_b / total))
    }

    pub fn blend(&self, f_a: &[f64], f_b: &[f64]) -> Result<Vec<f64>> {
        if f_a.len() != f_b.len() {
            return Err(Error::InvalidArgument("feature lengths differ".into()));
        }
        let total = self.w_a + self.w_b;
        if !(total > 0.0) {
            return Err(Error::DegenerateBlend);
        }
        Ok(f_a
            .iter()
            .zip(f_b)
            .map(|(a, b)| (self.w_a * a + self.w_b * b) / total)
            .collect())
    }
}

/// Blend of two full-sphere features by their equal-area disc radii.
pub fn blend_dual_sphere(f_a: &[f64], f_b: &[f64], r_a: f64, r_b: f64) -> Result<Vec<f64>> {
    BlendWeights::new(r_a, r_b)?.blend(f_a, f_b)
}

/// Feature of one constituent plane (or depth-interpolated plane stack).
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub name: String,
    pub feature: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MirrorPair {
    pub at_p: Vec<f64>,
    pub at_mirror: Vec<f64>,
    /// `(name, feature at p, feature at the mirrored point)`.
    pub components: Vec<(String, Vec<f64>, Vec<f64>)>,
}

/// How a stored grid is addressed; used for bundle manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaneRole {
    Planar {
        axes: [Axis; 2],
    },
    TriGridSlice {
        axes: [Axis; 2],
        depth: f64,
    },
    Spherical {
        frame: SphereFrame,
        warp: WarpKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<f64>,
    },
    Radial {
        frame: SphereFrame,
        angle: RadialAngle,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialAngle {
    Theta,
    Phi,
}

#[derive(Clone, Debug)]
pub struct PlaneEntry<'a> {
    pub name: String,
    pub grid: &'a FeatureGrid,
    pub role: PlaneRole,
}

fn check_query_point(p: Vec3) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::InvalidArgument("non-finite query point".into()));
    }
    Ok(())
}

fn planar(axes: (Axis, Axis), grid: FeatureGrid) -> PlanarPlane {
    PlanarPlane::new(axes, grid).expect("distinct axes")
}

const XY: (Axis, Axis) = (Axis::X, Axis::Y);
const XZ: (Axis, Axis) = (Axis::X, Axis::Z);
const YZ: (Axis, Axis) = (Axis::Y, Axis::Z);

fn planar_feature(pl: &PlanarPlane, p: Vec3) -> Vec<f64> {
    let mut out = vec![0.0; pl.grid().channels()];
    pl.accumulate(p, 1.0, &mut out);
    out
}

fn sphere_feature(sp: &SphericalPlane, hit: &SphereHit) -> Vec<f64> {
    let mut out = vec![0.0; sp.grid().channels()];
    sp.accumulate_hit(hit, 1.0, &mut out);
    out
}

fn mean(features: &[&[f64]]) -> Vec<f64> {
    let n = features.len() as f64;
    let mut out = vec![0.0; features[0].len()];
    for f in features {
        for (o, v) in out.iter_mut().zip(f.iter()) {
            *o += v;
        }
    }
    for o in &mut out {
        *o /= n;
    }
    out
}

/// Depth of slice `k` out of `d`.
pub fn slice_depth(k: usize, d: usize) -> f64 {
    if d == 1 {
        0.0
    } else {
        -1.0 + 2.0 * k as f64 / (d - 1) as f64
    }
}

impl TriGrid {
    fn depth(&self) -> usize {
        self.xy.len()
    }

    fn stack_feature(stack: &[FeatureGrid], axes: (Axis, Axis), depth_axis: Axis, p: Vec3) -> Vec<f64> {
        let q = Uv::new(axes.0.of(p), axes.1.of(p)).clamped();
        let mut out = vec![0.0; stack[0].channels()];
        if stack.len() == 1 {
            stack[0].accumulate_bilinear(q, 1.0, &mut out);
            return out;
        }
        let d = stack.len();
        let s = 0.5 * (depth_axis.of(p).clamp(-1.0, 1.0) + 1.0) * (d - 1) as f64;
        let k = (s.floor() as usize).min(d - 2);
        let t = s - k as f64;
        stack[k].accumulate_bilinear(q, 1.0 - t, &mut out);
        if t > 0.0 {
            stack[k + 1].accumulate_bilinear(q, t, &mut out);
        }
        out
    }
}

impl SphericalTriPlane {
    fn radial_uv(r: f64, angle: f64) -> Uv {
        Uv::new(2.0 * r / RADIAL_MAX - 1.0, angle).clamped()
    }

    /// The three plane features and the `theta_phi` hit.
    fn features(&self, p: Vec3) -> Result<([Vec<f64>; 3], SphereHit)> {
        let hit = self.theta_phi.locate(p)?;
        let r = p.norm();
        let f_tp = sphere_feature(&self.theta_phi, &hit);
        let mut f_rt = vec![0.0; self.r_theta.channels()];
        self.r_theta
            .accumulate_bilinear(Self::radial_uv(r, 2.0 * hit.dir.theta() / PI - 1.0), 1.0, &mut f_rt);
        let mut f_rp = vec![0.0; self.r_phi.channels()];
        self.r_phi
            .accumulate_bilinear(Self::radial_uv(r, hit.dir.phi() / PI), 1.0, &mut f_rp);
        Ok(([f_tp, f_rt, f_rp], hit))
    }

    fn query(&self, p: Vec3) -> Result<(Vec<f64>, SphereHit)> {
        let (f, hit) = self.features(p)?;
        Ok((mean(&[&f[0], &f[1], &f[2]]), hit))
    }
}

impl HyPlane22 {
    pub fn blend_weights(&self, p: Vec3) -> Result<BlendWeights> {
        let ha = self.sphere_a.locate(p)?;
        let hb = self.sphere_b.locate(p)?;
        Ok(BlendWeights::from_hits(&self.sphere_a, &ha, &self.sphere_b, &hb))
    }

    /// The two sphere features blended into one.
    pub fn spherical_feature(&self, p: Vec3) -> Result<Vec<f64>> {
        let ha = self.sphere_a.locate(p)?;
        let hb = self.sphere_b.locate(p)?;
        let w = BlendWeights::from_hits(&self.sphere_a, &ha, &self.sphere_b, &hb);
        let fa = sphere_feature(&self.sphere_a, &ha);
        let fb = if w.w_b > 0.0 {
            sphere_feature(&self.sphere_b, &hb)
        } else {
            vec![0.0; fa.len()]
        };
        w.blend(&fa, &fb)
    }
}

impl DualSphericalTriPlane {
    pub fn blend_weights(&self, p: Vec3) -> Result<BlendWeights> {
        let ha = self.a.theta_phi.locate(p)?;
        let hb = self.b.theta_phi.locate(p)?;
        Ok(BlendWeights::from_hits(&self.a.theta_phi, &ha, &self.b.theta_phi, &hb))
    }
}

fn named(name: &str, feature: Vec<f64>) -> Component {
    Component {
        name: name.to_string(),
        feature,
    }
}

impl Representation {
    pub fn variant(&self) -> Variant {
        match self {
            Representation::TriPlane(_) => Variant::TriPlane,
            Representation::TriGrid(_) => Variant::TriGrid,
            Representation::SphericalTriPlane(_) => Variant::SphericalTriPlane,
            Representation::DualSphericalTriPlane(_) => Variant::DualSphericalTriPlane,
            Representation::HyPlane31(_) => Variant::HyPlane31,
            Representation::HyPlane22(_) => Variant::HyPlane22,
        }
    }

    pub fn channels(&self) -> usize {
        self.planes()[0].grid.channels()
    }

    /// Options that rebuild this representation from its grids.
    pub fn options(&self) -> ReprOptions {
        let mut o = ReprOptions::default();
        match self {
            Representation::TriPlane(_) => {}
            Representation::TriGrid(t) => o.depth = t.depth(),
            Representation::SphericalTriPlane(s) => o.warp = s.theta_phi.kind(),
            Representation::DualSphericalTriPlane(d) => o.warp = d.a.theta_phi.kind(),
            Representation::HyPlane31(h) => o.warp = h.sphere.kind(),
            Representation::HyPlane22(h) => {
                o.warp = h.sphere_a.kind();
                o.cap = h.sphere_b.cap_colatitude();
            }
        }
        o
    }

    /// Assembles a representation from named grids. Names must match
    /// [`Variant::plane_names`] exactly and all grids share one channel count.
    pub fn from_grids(variant: Variant, opts: &ReprOptions, mut grids: BTreeMap<String, FeatureGrid>) -> Result<Self> {
        if opts.depth == 0 {
            return Err(Error::InvalidArgument("tri-grid depth must be at least 1".into()));
        }
        let expected = variant.plane_names(opts.depth);
        let want: BTreeSet<&str> = expected.iter().map(String::as_str).collect();
        let have: BTreeSet<&str> = grids.keys().map(String::as_str).collect();
        if want != have {
            return Err(Error::RegionMismatch {
                missing: want.difference(&have).map(|s| s.to_string()).collect(),
                extra: have.difference(&want).map(|s| s.to_string()).collect(),
            });
        }
        let channels: BTreeSet<usize> = grids.values().map(FeatureGrid::channels).collect();
        if channels.len() != 1 {
            return Err(Error::InvalidGrid(format!("grids disagree on channel count: {channels:?}")));
        }
        let mut take = |name: &str| grids.remove(name).expect("name checked above");
        let w = opts.warp;
        let stp = |tp, rt, rp, frame| SphericalTriPlane {
            theta_phi: SphericalPlane::new(frame, w, tp),
            r_theta: rt,
            r_phi: rp,
        };
        Ok(match variant {
            Variant::TriPlane => Representation::TriPlane(TriPlane {
                xy: planar(XY, take("xy")),
                xz: planar(XZ, take("xz")),
                yz: planar(YZ, take("yz")),
            }),
            Variant::TriGrid => {
                let mut stack = |a: &str| (0..opts.depth).map(|k| take(&format!("{a}_{k}"))).collect::<Vec<_>>();
                Representation::TriGrid(TriGrid {
                    xy: stack("xy"),
                    xz: stack("xz"),
                    yz: stack("yz"),
                })
            }
            Variant::SphericalTriPlane => Representation::SphericalTriPlane(stp(
                take("theta_phi"),
                take("r_theta"),
                take("r_phi"),
                head_frame(),
            )),
            Variant::DualSphericalTriPlane => Representation::DualSphericalTriPlane(DualSphericalTriPlane {
                a: stp(take("a_theta_phi"), take("a_r_theta"), take("a_r_phi"), head_frame()),
                b: stp(take("b_theta_phi"), take("b_r_theta"), take("b_r_phi"), dual_secondary_frame()),
            }),
            Variant::HyPlane31 => Representation::HyPlane31(HyPlane31 {
                xy: planar(XY, take("xy")),
                xz: planar(XZ, take("xz")),
                yz: planar(YZ, take("yz")),
                sphere: SphericalPlane::new(head_frame(), w, take("sphere")),
            }),
            Variant::HyPlane22 => {
                let sphere_b = match opts.cap {
                    Some(c) => SphericalPlane::cap(hyplane22_frame_b(), w, take("sphere_b"), c)?,
                    None => SphericalPlane::new(hyplane22_frame_b(), w, take("sphere_b")),
                };
                Representation::HyPlane22(HyPlane22 {
                    xy: planar(XY, take("xy")),
                    yz: planar(YZ, take("yz")),
                    sphere_a: SphericalPlane::new(hyplane22_frame_a(), w, take("sphere_a")),
                    sphere_b,
                })
            }
        })
    }

    /// Every grid `size x size` with independent unit-variance noise.
    pub fn random(variant: Variant, opts: &ReprOptions, size: usize, channels: usize, seed: u64) -> Result<Self> {
        let grids = variant
            .plane_names(opts.depth)
            .into_iter()
            .enumerate()
            .map(|(i, name)| {
                let g = FeatureGrid::random(size, size, channels, mix64(seed ^ mix64(i as u64 + 1)))?;
                Ok((name, g))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_grids(variant, opts, grids)
    }

    /// Stored grids with their addressing, in canonical order.
    pub fn planes(&self) -> Vec<PlaneEntry<'_>> {
        fn pl<'a>(name: &str, p: &'a PlanarPlane) -> PlaneEntry<'a> {
            PlaneEntry {
                name: name.to_string(),
                grid: p.grid(),
                role: PlaneRole::Planar {
                    axes: [p.axes().0, p.axes().1],
                },
            }
        }
        fn sph<'a>(name: &str, s: &'a SphericalPlane) -> PlaneEntry<'a> {
            PlaneEntry {
                name: name.to_string(),
                grid: s.grid(),
                role: PlaneRole::Spherical {
                    frame: *s.frame(),
                    warp: s.kind(),
                    cap: s.cap_colatitude(),
                },
            }
        }
        fn stp<'a>(prefix: &str, s: &'a SphericalTriPlane) -> Vec<PlaneEntry<'a>> {
            let frame = *s.theta_phi.frame();
            let radial = |angle, grid| PlaneEntry {
                name: format!(
                    "{prefix}{}",
                    if angle == RadialAngle::Theta { "r_theta" } else { "r_phi" }
                ),
                grid,
                role: PlaneRole::Radial { frame, angle },
            };
            vec![
                sph(&format!("{prefix}theta_phi"), &s.theta_phi),
                radial(RadialAngle::Theta, &s.r_theta),
                radial(RadialAngle::Phi, &s.r_phi),
            ]
        }
        match self {
            Representation::TriPlane(t) => vec![pl("xy", &t.xy), pl("xz", &t.xz), pl("yz", &t.yz)],
            Representation::TriGrid(t) => {
                let d = t.depth();
                [("xy", &t.xy, XY), ("xz", &t.xz, XZ), ("yz", &t.yz, YZ)]
                    .into_iter()
                    .flat_map(|(a, stack, axes)| {
                        stack.iter().enumerate().map(move |(k, g)| PlaneEntry {
                            name: format!("{a}_{k}"),
                            grid: g,
                            role: PlaneRole::TriGridSlice {
                                axes: [axes.0, axes.1],
                                depth: slice_depth(k, d),
                            },
                        })
                    })
                    .collect()
            }
            Representation::SphericalTriPlane(s) => stp("", s),
            Representation::DualSphericalTriPlane(d) => {
                let mut v = stp("a_", &d.a);
                v.extend(stp("b_", &d.b));
                v
            }
            Representation::HyPlane31(h) => vec![
                pl("xy", &h.xy),
                pl("xz", &h.xz),
                pl("yz", &h.yz),
                sph("sphere", &h.sphere),
            ],
            Representation::HyPlane22(h) => vec![
                pl("xy", &h.xy),
                pl("yz", &h.yz),
                sph("sphere_a", &h.sphere_a),
                sph("sphere_b", &h.sphere_b),
            ],
        }
    }

    /// Per-constituent features at `p`. Tri-grid stacks contribute one
    /// depth-interpolated component per axis; the (2+2) spheres contribute
    /// their blended feature as `sphere`.
    pub fn components(&self, p: Vec3) -> Result<Vec<Component>> {
        check_query_point(p)?;
        Ok(match self {
            Representation::TriPlane(t) => vec![
                named("xy", planar_feature(&t.xy, p)),
                named("xz", planar_feature(&t.xz, p)),
                named("yz", planar_feature(&t.yz, p)),
            ],
            Representation::TriGrid(t) => vec![
                named("xy", TriGrid::stack_feature(&t.xy, XY, Axis::Z, p)),
                named("xz", TriGrid::stack_feature(&t.xz, XZ, Axis::Y, p)),
                named("yz", TriGrid::stack_feature(&t.yz, YZ, Axis::X, p)),
            ],
            Representation::SphericalTriPlane(s) => {
                let ([tp, rt, rp], _) = s.features(p)?;
                vec![named("theta_phi", tp), named("r_theta", rt), named("r_phi", rp)]
            }
            Representation::DualSphericalTriPlane(d) => {
                let ([a0, a1, a2], _) = d.a.features(p)?;
                let ([b0, b1, b2], _) = d.b.features(p)?;
                vec![
                    named("a_theta_phi", a0),
                    named("a_r_theta", a1),
                    named("a_r_phi", a2),
                    named("b_theta_phi", b0),
                    named("b_r_theta", b1),
                    named("b_r_phi", b2),
                ]
            }
            Representation::HyPlane31(h) => {
                let hit = h.sphere.locate(p)?;
                vec![
                    named("xy", planar_feature(&h.xy, p)),
                    named("xz", planar_feature(&h.xz, p)),
                    named("yz", planar_feature(&h.yz, p)),
                    named("sphere", sphere_feature(&h.sphere, &hit)),
                ]
            }
            Representation::HyPlane22(h) => vec![
                named("xy", planar_feature(&h.xy, p)),
                named("yz", planar_feature(&h.yz, p)),
                named("sphere", h.spherical_feature(p)?),
            ],
        })
    }

    /// Aggregated feature at `p`: the mean over constituents; the dual
    /// spherical tri-plane blends its two per-sphere means instead.
    pub fn query(&self, p: Vec3) -> Result<Vec<f64>> {
        check_query_point(p)?;
        if let Representation::DualSphericalTriPlane(d) = self {
            let (fa, ha) = d.a.query(p)?;
            let (fb, hb) = d.b.query(p)?;
            return BlendWeights::from_hits(&d.a.theta_phi, &ha, &d.b.theta_phi, &hb).blend(&fa, &fb);
        }
        let comps = self.components(p)?;
        let refs: Vec<&[f64]> = comps.iter().map(|c| c.feature.as_slice()).collect();
        Ok(mean(&refs))
    }
}

/// Aggregates and per-constituent features at `p` and at `p` reflected
/// through `z = 0`.
pub fn mirror_pair_features(rep: &Representation, p: Vec3) -> Result<MirrorPair> {
    let m = p.z_reflect();
    let ca = rep.components(p)?;
    let cb = rep.components(m)?;
    Ok(MirrorPair {
        at_p: rep.query(p)?,
        at_mirror: rep.query(m)?,
        components: ca
            .into_iter()
            .zip(cb)
            .map(|(a, b)| (a.name, a.feature, b.feature))
            .collect(),
    })
}

/// The sphere the seam and polar diagnostics look at: the only one, or the
/// first of two.
pub fn primary_sphere(rep: &Representation) -> Option<&SphericalPlane> {
    match rep {
        Representation::TriPlane(_) | Representation::TriGrid(_) => None,
        Representation::SphericalTriPlane(s) => Some(&s.theta_phi),
        Representation::DualSphericalTriPlane(d) => Some(&d.a.theta_phi),
        Representation::HyPlane31(h) => Some(&h.sphere),
        Representation::HyPlane22(h) => Some(&h.sphere_a),
    }
}
