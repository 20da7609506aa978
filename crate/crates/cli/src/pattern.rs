//! Test patterns pushed through the sphere/square warps.
//!
//! The square view treats the pattern as an equirectangular image of the
//! sphere and shows where each feature-map texel lands on it. The sphere
//! view treats the pattern as the feature map itself and shows it wrapped
//! onto the sphere, unrolled equirectangularly. The hemisphere view shows
//! the same wrapping from above each pole, where naive coordinates pinch.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use hyplane::image::Raster;
use hyplane::warp::{in_image, sphere_to_uv, uv_to_sphere};
use hyplane::{SphericalDir, Uv, WarpKind};

/// Square-view colour for texels no direction maps to.
pub const BACKGROUND: [u8; 3] = [128, 128, 128];

const PERIODS: f64 = 16.0;
const GRID_LINES: f64 = 12.0;
const LINE_HALF_WIDTH: f64 = 0.008;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Stripes,
    Checker,
    PolarGrid,
    File(PathBuf),
}

impl Pattern {
    /// Builtin names, anything else is a file path.
    pub fn parse(s: &str) -> Self {
        match s {
            "stripes" => Pattern::Stripes,
            "checker" => Pattern::Checker,
            "polar-grid" => Pattern::PolarGrid,
            path => Pattern::File(PathBuf::from(path)),
        }
    }

    /// Used as the output file prefix.
    pub fn name(&self) -> String {
        match self {
            Pattern::Stripes => "stripes".into(),
            Pattern::Checker => "checker".into(),
            Pattern::PolarGrid => "polar-grid".into(),
            Pattern::File(p) => p.file_stem().map_or_else(|| "pattern".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// RGB raster of the pattern. Builtins are `resolution` square.
    pub fn raster(&self, resolution: usize) -> Result<Raster> {
        let f: fn(f64, f64) -> [u8; 3] = match self {
            Pattern::Stripes => stripes,
            Pattern::Checker => checker,
            Pattern::PolarGrid => polar_grid,
            Pattern::File(path) => {
                let r = Raster::load(path).with_context(|| format!("reading pattern {}", path.display()))?;
                if r.width < 2 || r.height < 2 {
                    bail!("pattern {} is smaller than 2x2", path.display());
                }
                return Ok(to_rgb(r));
            }
        };
        if resolution < 2 {
            bail!("pattern resolution must be at least 2");
        }
        let step = 1.0 / (resolution - 1) as f64;
        let mut data = Vec::with_capacity(resolution * resolution * 3);
        for r in 0..resolution {
            for c in 0..resolution {
                data.extend_from_slice(&f(c as f64 * step, r as f64 * step));
            }
        }
        Ok(Raster::new(resolution, resolution, 3, data)?)
    }
}

fn band(x: f64, periods: f64) -> u32 {
    ((x * periods).floor() as u32).min(periods as u32 - 1)
}

fn stripes(s: f64, _t: f64) -> [u8; 3] {
    if band(s, PERIODS).is_multiple_of(2) {
        [255; 3]
    } else {
        [0; 3]
    }
}

fn checker(s: f64, t: f64) -> [u8; 3] {
    if (band(s, PERIODS) + band(t, PERIODS)).is_multiple_of(2) {
        [255; 3]
    } else {
        [0; 3]
    }
}

fn near_line(x: f64) -> bool {
    let k = x * GRID_LINES;
    (k - k.round()).abs() < LINE_HALF_WIDTH * GRID_LINES
}

/// Meridians in red, parallels in blue, on white.
fn polar_grid(s: f64, t: f64) -> [u8; 3] {
    match (near_line(s), near_line(t)) {
        (true, true) => [0, 0, 0],
        (true, false) => [200, 30, 30],
        (false, true) => [30, 30, 200],
        (false, false) => [255, 255, 255],
    }
}

fn to_rgb(r: Raster) -> Raster {
    if r.channels == 3 {
        return r;
    }
    let data = r.data.iter().flat_map(|&g| [g, g, g]).collect();
    Raster::new(r.width, r.height, 3, data).expect("three times the grey length")
}

/// Texel-centre coordinate in `[-1, 1]`, corners aligned like feature grids.
fn axis(i: usize, n: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (n - 1) as f64
}

fn nearest(x: f64, n: usize) -> usize {
    ((x * (n - 1) as f64).round().max(0.0) as usize).min(n - 1)
}

/// Nearest pattern pixel at normalised `(s, t)`, origin top left.
fn lookup(p: &Raster, s: f64, t: f64) -> [u8; 3] {
    let px = p.pixel(nearest(s, p.width), nearest(t, p.height));
    [px[0], px[1], px[2]]
}

/// Feature-map layout (row 0 at `v = -1`): each texel shows the pattern
/// colour at its direction, reading the pattern as an equirectangular image
/// with the North Pole on the top row and `phi = -pi` on the left.
pub fn square_view(pattern: &Raster, kind: WarpKind) -> Raster {
    let (w, h) = (pattern.width, pattern.height);
    let mut data = Vec::with_capacity(w * h * 3);
    for r in 0..h {
        for c in 0..w {
            let q = Uv::new(axis(c, w), axis(r, h));
            let px = if in_image(q, kind) {
                let d = uv_to_sphere(q, kind);
                lookup(pattern, (d.phi() + PI) / (2.0 * PI), d.theta() / PI)
            } else {
                BACKGROUND
            };
            data.extend_from_slice(&px);
        }
    }
    Raster::new(w, h, 3, data).expect("sized from the pattern")
}

/// Direction at the centre of pixel `(c, r)` of a `2h x h` equirectangular
/// image.
pub fn equirect_dir(c: usize, r: usize, h: usize) -> SphericalDir {
    let theta = PI * (r as f64 + 0.5) / h as f64;
    let phi = -PI + PI * (c as f64 + 0.5) / h as f64;
    SphericalDir::new(theta, phi)
}

/// Equirectangular image, `2h x h`, of the pattern read as the feature map.
pub fn sphere_view(pattern: &Raster, kind: WarpKind) -> Raster {
    let h = pattern.height;
    let w = 2 * h;
    let mut data = Vec::with_capacity(w * h * 3);
    for r in 0..h {
        for c in 0..w {
            let q = sphere_to_uv(equirect_dir(c, r, h), kind);
            data.extend_from_slice(&lookup(pattern, 0.5 * (q.u + 1.0), 0.5 * (q.v + 1.0)));
        }
    }
    Raster::new(w, h, 3, data).expect("sized from the pattern")
}

/// Direction under pixel `(c, r)` of an `h x h` orthographic view of the
/// northern (or southern) hemisphere seen from outside its pole; `None`
/// outside the disc.
pub fn hemisphere_dir(c: usize, r: usize, h: usize, north: bool) -> Option<SphericalDir> {
    let (x, y) = (axis(c, h), -axis(r, h));
    let rho = x.hypot(y);
    if rho > 1.0 {
        return None;
    }
    let t = rho.asin();
    Some(if north {
        SphericalDir::new(t, y.atan2(x))
    } else {
        SphericalDir::new(PI - t, y.atan2(-x))
    })
}

/// North and south hemispheres side by side, `2h x h`, of the pattern read
/// as the feature map.
pub fn hemisphere_view(pattern: &Raster, kind: WarpKind) -> Raster {
    let h = pattern.height;
    let mut data = Vec::with_capacity(2 * h * h * 3);
    for r in 0..h {
        for north in [true, false] {
            for c in 0..h {
                let px = match hemisphere_dir(c, r, h, north) {
                    Some(d) => {
                        let q = sphere_to_uv(d, kind);
                        lookup(pattern, 0.5 * (q.u + 1.0), 0.5 * (q.v + 1.0))
                    }
                    None => BACKGROUND,
                };
                data.extend_from_slice(&px);
            }
        }
    }
    Raster::new(2 * h, h, 3, data).expect("sized from the pattern")
}
