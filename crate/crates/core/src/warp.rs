//! Near-equal-area warping between the sphere and the square feature map.
//!
//! The composite map runs in three stages:
//!
//! 1. Lambert azimuthal equal-area flattening: the sphere is opened at its
//!    South Pole onto a disc of radius 2 centred on the North Pole,
//!    `R = 2 sin(theta / 2)`, `Theta = -phi`.
//! 2. Polar to Cartesian, `(x, y) = (R cos Theta, R sin Theta)`.
//! 3. Elliptical grid mapping from the unit disc onto `[-1, 1]^2`.
//!
//! Stage 1 is exactly equal-area. Stage 3 is only approximately so, hence
//! "near-equal-area". The naive baseline indexes the square directly by
//! `(phi, theta)`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PolarPoint, SphericalDir};

/// Radius of the disc produced by the equal-area flattening of the unit
/// sphere (its area equals the sphere's, `4 pi`).
pub const LAEA_DISC_RADIUS: f64 = 2.0;

/// Points this far outside a disc (relative to its radius) are clamped onto
/// it instead of rejected.
pub const DISC_SLACK: f64 = 1e-9;

/// Canonical square coordinates; `-1` is the left/bottom edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Uv {
    pub u: f64,
    pub v: f64,
}

impl Uv {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn clamped(self) -> Self {
        Self::new(self.u.clamp(-1.0, 1.0), self.v.clamp(-1.0, 1.0))
    }

    pub fn dist(self, o: Uv) -> f64 {
        (self.u - o.u).hypot(self.v - o.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WarpKind {
    /// `(u, v) = (phi / pi, 2 theta / pi - 1)`.
    #[serde(rename = "naive")]
    NaiveThetaPhi,
    /// Equal-area disc inscribed in the square; corners are never reached.
    #[serde(rename = "disc")]
    LaeaDiscOnly,
    /// Equal-area disc stretched onto the full square.
    #[serde(rename = "elliptical")]
    LaeaElliptical,
}

impl WarpKind {
    pub const ALL: [WarpKind; 3] = [
        WarpKind::NaiveThetaPhi,
        WarpKind::LaeaDiscOnly,
        WarpKind::LaeaElliptical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WarpKind::NaiveThetaPhi => "naive",
            WarpKind::LaeaDiscOnly => "disc",
            WarpKind::LaeaElliptical => "elliptical",
        }
    }

    pub fn is_laea(self) -> bool {
        !matches!(self, WarpKind::NaiveThetaPhi)
    }
}

impl fmt::Display for WarpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WarpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" | "theta-phi" => Ok(WarpKind::NaiveThetaPhi),
            "disc" | "laea-disc" => Ok(WarpKind::LaeaDiscOnly),
            "elliptical" | "laea" | "wrap" => Ok(WarpKind::LaeaElliptical),
            other => Err(Error::InvalidArgument(format!("unknown warp kind {other:?}"))),
        }
    }
}

pub fn laea_forward(d: SphericalDir) -> PolarPoint {
    PolarPoint::new(2.0 * (0.5 * d.theta()).sin(), -d.phi())
}

pub fn laea_inverse(p: PolarPoint) -> Result<SphericalDir> {
    let mut r = p.radius();
    if r > LAEA_DISC_RADIUS {
        if r > LAEA_DISC_RADIUS * (1.0 + DISC_SLACK) {
            return Err(Error::OutsideDisc {
                radius: r / LAEA_DISC_RADIUS,
            });
        }
        r = LAEA_DISC_RADIUS;
    }
    Ok(SphericalDir::new(2.0 * (0.5 * r).asin(), -p.azimuth()))
}

pub fn polar_to_xy(p: PolarPoint) -> (f64, f64) {
    let (s, c) = p.azimuth().sin_cos();
    (p.radius() * c, p.radius() * s)
}

/// Elliptical grid mapping from the disc of `disc_radius` onto the square.
///
/// Only square roots of the two radicand pairs are taken; there is no
/// division, so the map is finite on the whole closed disc.
pub fn disc_to_square(x: f64, y: f64, disc_radius: f64) -> Result<Uv> {
    let mut x = x / disc_radius;
    let mut y = y / disc_radius;
    let rho2 = x * x + y * y;
    if rho2 > 1.0 {
        let rho = rho2.sqrt();
        if !(rho <= 1.0 + DISC_SLACK) {
            return Err(Error::OutsideDisc { radius: rho });
        }
        x /= rho;
        y /= rho;
    }
    Ok(unit_disc_to_square(x, y))
}

#[inline]
fn unit_disc_to_square(x: f64, y: f64) -> Uv {
    const TWO_SQRT_2: f64 = 2.0 * SQRT_2;
    let d = x * x - y * y;
    let su = 2.0 + d;
    let sv = 2.0 - d;
    // Radicands touch zero at the four 45-degree boundary points; clamp the
    // rounding residue there.
    let u = 0.5 * (su + TWO_SQRT_2 * x).max(0.0).sqrt() - 0.5 * (su - TWO_SQRT_2 * x).max(0.0).sqrt();
    let v = 0.5 * (sv + TWO_SQRT_2 * y).max(0.0).sqrt() - 0.5 * (sv - TWO_SQRT_2 * y).max(0.0).sqrt();
    Uv::new(u, v).clamped()
}

pub fn square_to_disc(q: Uv, disc_radius: f64) -> (f64, f64) {
    let q = q.clamped();
    let x = q.u * (1.0 - 0.5 * q.v * q.v).sqrt();
    let y = q.v * (1.0 - 0.5 * q.u * q.u).sqrt();
    (disc_radius * x, disc_radius * y)
}

pub fn sphere_to_uv(d: SphericalDir, kind: WarpKind) -> Uv {
    uv_from_angles(d.theta(), d.phi(), kind)
}

/// Forward map on raw angles. `phi` need not be wrapped, which lets finite
/// differences straddle the longitude seam.
pub(crate) fn uv_from_angles(theta: f64, phi: f64, kind: WarpKind) -> Uv {
    match kind {
        WarpKind::NaiveThetaPhi => Uv::new(phi / PI, 2.0 * theta / PI - 1.0),
        WarpKind::LaeaDiscOnly | WarpKind::LaeaElliptical => {
            let (x, y) = laea_xy(theta, phi);
            let (x, y) = (x / LAEA_DISC_RADIUS, y / LAEA_DISC_RADIUS);
            if kind == WarpKind::LaeaDiscOnly {
                Uv::new(x, y)
            } else {
                let rho2 = x * x + y * y;
                if rho2 > 1.0 {
                    let rho = rho2.sqrt();
                    unit_disc_to_square(x / rho, y / rho)
                } else {
                    unit_disc_to_square(x, y)
                }
            }
        }
    }
}

/// Equal-area disc coordinates (radius-2 disc) for raw angles.
#[inline]
pub(crate) fn laea_xy(theta: f64, phi: f64) -> (f64, f64) {
    let r = 2.0 * (0.5 * theta).sin();
    let (s, c) = (-phi).sin_cos();
    (r * c, r * s)
}

/// Inverse of [`sphere_to_uv`].
///
/// For [`WarpKind::LaeaDiscOnly`], square points outside the inscribed disc
/// have no preimage and collapse onto the South Pole.
pub fn uv_to_sphere(q: Uv, kind: WarpKind) -> SphericalDir {
    let q = q.clamped();
    match kind {
        WarpKind::NaiveThetaPhi => SphericalDir::new(0.5 * PI * (q.v + 1.0), PI * q.u),
        WarpKind::LaeaDiscOnly => {
            let p = PolarPoint::from_xy(LAEA_DISC_RADIUS * q.u, LAEA_DISC_RADIUS * q.v);
            disc_point_to_sphere(p)
        }
        WarpKind::LaeaElliptical => {
            let (x, y) = square_to_disc(q, LAEA_DISC_RADIUS);
            disc_point_to_sphere(PolarPoint::from_xy(x, y))
        }
    }
}

fn disc_point_to_sphere(p: PolarPoint) -> SphericalDir {
    let p = PolarPoint::new(p.radius().min(LAEA_DISC_RADIUS), p.azimuth());
    laea_inverse(p).expect("radius clamped onto the disc")
}

/// Whether `q` is the image of some sphere point under `kind`.
pub fn in_image(q: Uv, kind: WarpKind) -> bool {
    let inside_square = q.u.abs() <= 1.0 && q.v.abs() <= 1.0;
    match kind {
        WarpKind::LaeaDiscOnly => inside_square && q.u * q.u + q.v * q.v <= 1.0,
        _ => inside_square,
    }
}

/// Central-difference estimate of the area of the image of a small sphere
/// patch around `d`, per unit solid angle, under the sphere-to-square map.
///
/// `h` is the angular step in both theta and phi.
pub fn area_scale(d: SphericalDir, kind: WarpKind, h: f64) -> Result<f64> {
    check_step(d, h)?;
    let (t, p) = (d.theta(), d.phi());
    let f = |t: f64, p: f64| {
        let q = uv_from_angles(t, p, kind);
        (q.u, q.v)
    };
    Ok(fd_jacobian_det(f, t, p, h) / t.sin())
}

/// Same estimate for the first stage alone: sphere onto the radius-2 disc.
/// Exactly 1 for an equal-area projection.
pub fn laea_area_scale(d: SphericalDir, h: f64) -> Result<f64> {
    check_step(d, h)?;
    let (t, p) = (d.theta(), d.phi());
    Ok(fd_jacobian_det(laea_xy, t, p, h) / t.sin())
}

fn check_step(d: SphericalDir, h: f64) -> Result<()> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h} outside (0, 1e-3]"
        )));
    }
    if d.theta() <= h || d.theta() >= PI - h {
        return Err(Error::NearSingularity);
    }
    Ok(())
}

fn fd_jacobian_det(f: impl Fn(f64, f64) -> (f64, f64), t: f64, p: f64, h: f64) -> f64 {
    let (a1, b1) = f(t + h, p);
    let (a0, b0) = f(t - h, p);
    let (c1, d1) = f(t, p + h);
    let (c0, d0) = f(t, p - h);
    let inv = 1.0 / (2.0 * h);
    let (at, bt) = ((a1 - a0) * inv, (b1 - b0) * inv);
    let (ap, bp) = ((c1 - c0) * inv, (d1 - d0) * inv);
    (at * bp - ap * bt).abs()
}

/// Boundary points of the unit disc that land on the four square corners.
pub const CORNER_AZIMUTHS: [f64; 4] = [PI / 4.0, 3.0 * PI / 4.0, -3.0 * PI / 4.0, -PI / 4.0];
