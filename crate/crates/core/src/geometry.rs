//! Coordinate types and conversions between Cartesian, spherical and polar
//! coordinates.
//!
//! ## Conventions
//!
//! - World frame: `+z` points toward the face, `+y` toward the top of the
//!   head and `+x` toward the left ear. Queries live in the cube `[-1, 1]^3`.
//! - `theta` is the colatitude, the angle from a frame's North Pole, in
//!   `[0, pi]`.
//! - `phi` is the longitude in `(-pi, pi]`, measured from the frame's
//!   reference azimuth and increasing right-handedly about the North Pole,
//!   i.e. toward `north x ref_azimuth`.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating unit length and orthogonality of frames.
pub const FRAME_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Ok(self * (1.0 / n))
        } else {
            Err(Error::DegenerateDirection)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Mirror image across the `z = 0` plane (front/back of the head).
    pub fn z_reflect(self) -> Vec3 {
        Vec3::new(self.x, self.y, -self.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Angle between two non-zero vectors, accurate near 0 and pi.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Direction on the unit sphere relative to some [`SphereFrame`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalDir {
    theta: f64,
    phi: f64,
}

impl SphericalDir {
    pub const NORTH: SphericalDir = SphericalDir { theta: 0.0, phi: 0.0 };
    pub const SOUTH: SphericalDir = SphericalDir { theta: PI, phi: 0.0 };

    /// Builds a canonical direction: `theta` is clamped into `[0, pi]`,
    /// `phi` wrapped into `(-pi, pi]`, and `phi` is 0 exactly at the poles.
    pub fn new(theta: f64, phi: f64) -> Self {
        debug_assert!(theta.is_finite() && phi.is_finite());
        let theta = theta.clamp(0.0, PI);
        let phi = if theta == 0.0 || theta == PI {
            0.0
        } else {
            wrap_angle(phi)
        };
        Self { theta, phi }
    }

    #[inline]
    pub fn theta(self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn phi(self) -> f64 {
        self.phi
    }
}

/// Point on the flattened disc in polar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    radius: f64,
    azimuth: f64,
}

impl PolarPoint {
    /// Canonical polar point: azimuth wrapped into `(-pi, pi]` and 0 at the
    /// origin. Negative radii are rejected by clamping to 0.
    pub fn new(radius: f64, azimuth: f64) -> Self {
        debug_assert!(radius.is_finite() && azimuth.is_finite());
        let radius = radius.max(0.0);
        let azimuth = if radius == 0.0 { 0.0 } else { wrap_angle(azimuth) };
        Self { radius, azimuth }
    }

    pub fn from_xy(x: f64, y: f64) -> Self {
        Self::new(x.hypot(y), y.atan2(x))
    }

    #[inline]
    pub fn radius(self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn azimuth(self) -> f64 {
        self.azimuth
    }
}

/// Orientation of a spherical feature plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameSpec", into = "FrameSpec")]
pub struct SphereFrame {
    north: Vec3,
    ref_azimuth: Vec3,
    east: Vec3,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct FrameSpec {
    north: [f64; 3],
    ref_azimuth: [f64; 3],
}

impl TryFrom<FrameSpec> for SphereFrame {
    type Error = Error;
    fn try_from(s: FrameSpec) -> Result<Self> {
        let [a, b, c] = s.north;
        let [d, e, f] = s.ref_azimuth;
        SphereFrame::new(Vec3::new(a, b, c), Vec3::new(d, e, f))
    }
}

impl From<SphereFrame> for FrameSpec {
    fn from(f: SphereFrame) -> Self {
        FrameSpec {
            north: f.north.to_array(),
            ref_azimuth: f.ref_azimuth.to_array(),
        }
    }
}

impl SphereFrame {
    pub fn new(north: Vec3, ref_azimuth: Vec3) -> Result<Self> {
        if !north.is_finite() || !ref_azimuth.is_finite() {
            return Err(Error::InvalidFrame("non-finite axis".into()));
        }
        if (north.norm() - 1.0).abs() > FRAME_TOLERANCE {
            return Err(Error::InvalidFrame(format!("|north| = {}", north.norm())));
        }
        if (ref_azimuth.norm() - 1.0).abs() > FRAME_TOLERANCE {
            return Err(Error::InvalidFrame(format!(
                "|ref_azimuth| = {}",
                ref_azimuth.norm()
            )));
        }
        if north.dot(ref_azimuth).abs() > FRAME_TOLERANCE {
            return Err(Error::InvalidFrame(format!(
                "north . ref_azimuth = {}",
                north.dot(ref_azimuth)
            )));
        }
        Ok(Self {
            north,
            ref_azimuth,
            east: north.cross(ref_azimuth),
        })
    }

    /// North Pole at the top of the head, longitude zero toward the face.
    pub fn head_top() -> Self {
        Self::new(Vec3::Y, Vec3::Z).expect("axis-aligned frame")
    }

    /// Frame with the given axis-aligned North Pole; used for the fixed
    /// orientations of the built-in representations.
    pub(crate) fn axis_aligned(north: Vec3, ref_azimuth: Vec3) -> Self {
        Self::new(north, ref_azimuth).expect("axis-aligned frame")
    }

    pub fn north(&self) -> Vec3 {
        self.north
    }

    pub fn ref_azimuth(&self) -> Vec3 {
        self.ref_azimuth
    }

    /// Direction of `phi = pi/2` on the equator.
    pub fn east(&self) -> Vec3 {
        self.east
    }

    /// Frame with the North Pole reversed, keeping the reference azimuth.
    pub fn antipodal(&self) -> Self {
        Self::axis_aligned(-self.north, self.ref_azimuth)
    }
}

/// Colatitude and longitude of `p` in `frame`. Only the direction of `p`
/// matters.
pub fn cartesian_to_dir(p: Vec3, frame: &SphereFrame) -> Result<SphericalDir> {
    if !p.is_finite() || p == Vec3::ZERO {
        return Err(Error::DegenerateDirection);
    }
    let along = p.dot(frame.north);
    let e1 = p.dot(frame.ref_azimuth);
    let e2 = p.dot(frame.east);
    let across = e1.hypot(e2);
    let theta = across.atan2(along);
    let phi = if across == 0.0 { 0.0 } else { e2.atan2(e1) };
    Ok(SphericalDir::new(theta, phi))
}

/// Unit vector for `d` in `frame`.
pub fn dir_to_cartesian(d: SphericalDir, frame: &SphereFrame) -> Vec3 {
    let (st, ct) = d.theta.sin_cos();
    let (sp, cp) = d.phi.sin_cos();
    frame.north * ct + (frame.ref_azimuth * cp + frame.east * sp) * st
}
