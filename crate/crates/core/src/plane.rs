//! Feature-grid storage, bilinear sampling and the planar/spherical planes
//! built on top of it.
//!
//! A [`FeatureGrid`] is a window into reference-counted `f32` storage. A
//! standalone grid owns its whole buffer; the unify-split layouts hand out
//! windows into one shared buffer without copying.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cartesian_to_dir, SphereFrame, SphericalDir, Vec3};
use crate::rng::SplitMix64;
use crate::warp::{self, Uv, WarpKind, LAEA_DISC_RADIUS};

pub const DEFAULT_CHANNELS: usize = 32;

/// `H x W x C` feature values, row-major with channels fastest. Row 0 is the
/// bottom edge (`v = -1`), column 0 the left edge (`u = -1`).
#[derive(Clone)]
pub struct FeatureGrid {
    storage: Arc<[f32]>,
    /// Index of texel (0, 0), channel 0, in `storage`.
    offset: usize,
    /// Texels between consecutive rows in `storage`.
    row_stride: usize,
    height: usize,
    width: usize,
    channels: usize,
}

impl fmt::Debug for FeatureGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeatureGrid")
            .field("height", &self.height)
            .field("width", &self.width)
            .field("channels", &self.channels)
            .field("offset", &self.offset)
            .field("row_stride", &self.row_stride)
            .finish()
    }
}

impl FeatureGrid {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(height, width, channels)?;
        if data.len() != height * width * channels {
            return Err(Error::InvalidGrid(format!(
                "data length {} != {height}x{width}x{channels}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            storage: data.into(),
            offset: 0,
            row_stride: width,
            height,
            width,
            channels,
        })
    }

    pub fn constant(height: usize, width: usize, channels: usize, value: f32) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Result<Self> {
        Self::constant(height, width, channels, 0.0)
    }

    /// Builds a grid from `f(row, col, channel)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for r in 0..height {
            for c in 0..width {
                for k in 0..channels {
                    data.push(f(r, c, k));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    /// Independent uniform noise with zero mean and unit variance.
    pub fn random(height: usize, width: usize, channels: usize, seed: u64) -> Result<Self> {
        let scale = 3f64.sqrt();
        let mut rng = SplitMix64::new(seed);
        Self::from_fn(height, width, channels, |_, _, _| (scale * rng.next_signed()) as f32)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    fn base(&self, row: usize, col: usize) -> usize {
        self.offset + (row * self.row_stride + col) * self.channels
    }

    /// Channel values of one texel.
    #[inline]
    pub fn texel(&self, row: usize, col: usize) -> &[f32] {
        assert!(row < self.height && col < self.width, "texel ({row}, {col}) out of range");
        let b = self.base(row, col);
        &self.storage[b..b + self.channels]
    }

    /// Mutable access to one texel. Fails while other grids share the
    /// storage: writes must happen before the map is split and shared.
    pub fn texel_mut(&mut self, row: usize, col: usize) -> Result<&mut [f32]> {
        if row >= self.height || col >= self.width {
            return Err(Error::InvalidArgument(format!("texel ({row}, {col}) out of range")));
        }
        let b = self.base(row, col);
        let c = self.channels;
        let storage = Arc::get_mut(&mut self.storage).ok_or(Error::StorageShared)?;
        Ok(&mut storage[b..b + c])
    }

    /// Contiguous copy of the values in this window.
    pub fn to_vec(&self) -> Vec<f32> {
        let mut out = Vec::with_capacity(self.height * self.width * self.channels);
        for r in 0..self.height {
            let b = self.base(r, 0);
            out.extend_from_slice(&self.storage[b..b + self.width * self.channels]);
        }
        out
    }

    /// Deep copy into freshly allocated storage.
    pub fn to_owned_grid(&self) -> FeatureGrid {
        FeatureGrid::new(self.height, self.width, self.channels, self.to_vec())
            .expect("window of a valid grid")
    }

    /// Window of `height x width` texels starting at (`row0`, `col0`),
    /// aliasing this grid's storage.
    pub fn view(&self, row0: usize, col0: usize, height: usize, width: usize) -> Result<FeatureGrid> {
        check_dims(height, width, self.channels)?;
        if row0 + height > self.height || col0 + width > self.width {
            return Err(Error::InvalidGrid(format!(
                "view {height}x{width} at ({row0}, {col0}) exceeds {}x{}",
                self.height, self.width
            )));
        }
        Ok(FeatureGrid {
            storage: Arc::clone(&self.storage),
            offset: self.base(row0, col0),
            row_stride: self.row_stride,
            height,
            width,
            channels: self.channels,
        })
    }

    pub fn shares_storage_with(&self, other: &FeatureGrid) -> bool {
        Arc::ptr_eq(&self.storage, &other.storage)
    }

    /// Address of texel (0, 0), channel 0.
    pub fn data_ptr(&self) -> *const f32 {
        self.storage[self.offset..].as_ptr()
    }

    /// Adds `weight * sample_bilinear(q)` into `out`.
    pub fn accumulate_bilinear(&self, q: Uv, weight: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.channels);
        let q = q.clamped();
        let (c0, tx) = cell(q.u, self.width);
        let (r0, ty) = cell(q.v, self.height);
        let c = self.channels;
        let s00 = &self.storage[self.base(r0, c0)..][..c];
        let s10 = &self.storage[self.base(r0, c0 + 1)..][..c];
        let s01 = &self.storage[self.base(r0 + 1, c0)..][..c];
        let s11 = &self.storage[self.base(r0 + 1, c0 + 1)..][..c];
        // Nested lerps are exact on constant neighbourhoods and at texel
        // centres.
        for k in 0..c {
            let (a, b) = (s00[k] as f64, s10[k] as f64);
            let bottom = a + tx * (b - a);
            let (a, b) = (s01[k] as f64, s11[k] as f64);
            let top = a + tx * (b - a);
            out[k] += weight * (bottom + ty * (top - bottom));
        }
    }
}

impl PartialEq for FeatureGrid {
    fn eq(&self, other: &Self) -> bool {
        self.height == other.height
            && self.width == other.width
            && self.channels == other.channels
            && self.to_vec().iter().map(|v| v.to_bits()).eq(other.to_vec().iter().map(|v| v.to_bits()))
    }
}

fn check_dims(height: usize, width: usize, channels: usize) -> Result<()> {
    if height < 2 || width < 2 {
        return Err(Error::InvalidGrid(format!("grid {height}x{width} smaller than 2x2")));
    }
    if channels == 0 {
        return Err(Error::InvalidGrid("zero channels".into()));
    }
    Ok(())
}

/// Align-corners addressing: `-1` and `1` land on the centres of the first
/// and last texel. Returns the lower texel index and the blend fraction.
#[inline]
fn cell(coord: f64, n: usize) -> (usize, f64) {
    let x = 0.5 * (coord + 1.0) * (n - 1) as f64;
    let i = (x.floor() as usize).min(n - 2);
    (i, x - i as f64)
}

/// Bilinear sample with clamp-to-edge addressing.
pub fn sample_bilinear(grid: &FeatureGrid, q: Uv) -> Vec<f64> {
    let mut out = vec![0.0; grid.channels()];
    grid.accumulate_bilinear(q, 1.0, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    #[inline]
    pub fn of(self, p: Vec3) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
            Axis::Z => p.z,
        }
    }
}

/// Feature plane queried by orthogonal projection onto two world axes.
#[derive(Clone, Debug)]
pub struct PlanarPlane {
    axes: (Axis, Axis),
    grid: FeatureGrid,
}

impl PlanarPlane {
    pub fn new(axes: (Axis, Axis), grid: FeatureGrid) -> Result<Self> {
        if axes.0 == axes.1 {
            return Err(Error::InvalidArgument(format!("repeated planar axis {:?}", axes.0)));
        }
        Ok(Self { axes, grid })
    }

    pub fn axes(&self) -> (Axis, Axis) {
        self.axes
    }

    pub fn grid(&self) -> &FeatureGrid {
        &self.grid
    }

    pub fn uv(&self, p: Vec3) -> Uv {
        Uv::new(self.axes.0.of(p), self.axes.1.of(p)).clamped()
    }

    pub fn accumulate(&self, p: Vec3, weight: f64, out: &mut [f64]) {
        self.grid.accumulate_bilinear(self.uv(p), weight, out);
    }
}

pub fn sample_planar(pl: &PlanarPlane, p: Vec3) -> Vec<f64> {
    sample_bilinear(&pl.grid, pl.uv(p))
}

/// Where a query direction lands on a spherical plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereHit {
    pub dir: SphericalDir,
    pub uv: Uv,
    /// Radius on the equal-area disc, `2 sin(theta / 2)`.
    pub disc_radius: f64,
    /// False when the direction lies outside a cap plane's support.
    pub supported: bool,
}

/// Feature plane indexed by direction.
///
/// A cap plane covers only colatitudes up to `cap`; for the equal-area warps
/// its disc is the equal-area image of the cap, stretched onto the square.
#[derive(Clone, Debug)]
pub struct SphericalPlane {
    frame: SphereFrame,
    kind: WarpKind,
    grid: FeatureGrid,
    cap: Option<f64>,
}

impl SphericalPlane {
    pub fn new(frame: SphereFrame, kind: WarpKind, grid: FeatureGrid) -> Self {
        Self {
            frame,
            kind,
            grid,
            cap: None,
        }
    }

    /// Plane covering only the cap `theta <= cap_colatitude`.
    pub fn cap(frame: SphereFrame, kind: WarpKind, grid: FeatureGrid, cap_colatitude: f64) -> Result<Self> {
        if !(cap_colatitude > 0.0 && cap_colatitude <= std::f64::consts::PI) {
            return Err(Error::InvalidArgument(format!(
                "cap colatitude {cap_colatitude} outside (0, pi]"
            )));
        }
        Ok(Self {
            frame,
            kind,
            grid,
            cap: Some(cap_colatitude),
        })
    }

    pub fn frame(&self) -> &SphereFrame {
        &self.frame
    }

    pub fn kind(&self) -> WarpKind {
        self.kind
    }

    pub fn grid(&self) -> &FeatureGrid {
        &self.grid
    }

    pub fn cap_colatitude(&self) -> Option<f64> {
        self.cap
    }

    /// Radius of the plane's equal-area disc: 2 for a full sphere, smaller
    /// for a cap.
    pub fn max_disc_radius(&self) -> f64 {
        match self.cap {
            Some(c) => 2.0 * (0.5 * c).sin(),
            None => LAEA_DISC_RADIUS,
        }
    }

    pub fn locate(&self, p: Vec3) -> Result<SphereHit> {
        let dir = cartesian_to_dir(p, &self.frame)?;
        Ok(self.locate_dir(dir))
    }

    pub fn locate_dir(&self, dir: SphericalDir) -> SphereHit {
        let disc_radius = 2.0 * (0.5 * dir.theta()).sin();
        let Some(cap) = self.cap else {
            return SphereHit {
                dir,
                uv: warp::sphere_to_uv(dir, self.kind),
                disc_radius,
                supported: true,
            };
        };
        let supported = dir.theta() <= cap;
        let uv = match self.kind {
            WarpKind::NaiveThetaPhi => {
                Uv::new(dir.phi() / std::f64::consts::PI, 2.0 * dir.theta() / cap - 1.0).clamped()
            }
            WarpKind::LaeaDiscOnly | WarpKind::LaeaElliptical => {
                let r_max = self.max_disc_radius();
                let (x, y) = warp::polar_to_xy(warp::laea_forward(dir));
                let rho = disc_radius / r_max;
                let (x, y) = if rho > 1.0 { (x / rho, y / rho) } else { (x, y) };
                if self.kind == WarpKind::LaeaDiscOnly {
                    Uv::new(x / r_max, y / r_max).clamped()
                } else {
                    warp::disc_to_square(x, y, r_max).expect("point projected onto the disc")
                }
            }
        };
        SphereHit {
            dir,
            uv,
            disc_radius,
            supported,
        }
    }

    pub fn accumulate_hit(&self, hit: &SphereHit, weight: f64, out: &mut [f64]) {
        self.grid.accumulate_bilinear(hit.uv, weight, out);
    }
}

pub fn sample_spherical(sp: &SphericalPlane, p: Vec3) -> Result<Vec<f64>> {
    let hit = sp.locate(p)?;
    let mut out = vec![0.0; sp.grid.channels()];
    sp.accumulate_hit(&hit, 1.0, &mut out);
    Ok(out)
}

pub const HYPL_MAGIC: &[u8; 4] = b"HYPL";
pub const HYPL_VERSION: u32 = 1;

/// Writes `grid` in the HYPL binary format: magic, version, H, W, C as
/// little-endian `u32`, then the values as little-endian `f32`.
pub fn write_hypl(grid: &FeatureGrid, mut w: impl Write) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 4 * grid.height * grid.width * grid.channels);
    buf.extend_from_slice(HYPL_MAGIC);
    for v in [HYPL_VERSION, dim_u32(grid.height)?, dim_u32(grid.width)?, dim_u32(grid.channels)?] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in grid.to_vec() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn dim_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Format(format!("dimension {n} exceeds u32")))
}

pub fn read_hypl(mut r: impl Read) -> Result<FeatureGrid> {
    let mut header = [0u8; 20];
    r.read_exact(&mut header)?;
    if &header[..4] != HYPL_MAGIC {
        return Err(Error::Format("bad magic, expected HYPL".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[4 * i..4 * i + 4].try_into().unwrap());
    let version = word(1);
    if version != HYPL_VERSION {
        return Err(Error::Format(format!("unsupported HYPL version {version}")));
    }
    let (h, w, c) = (word(2) as usize, word(3) as usize, word(4) as usize);
    let n = h
        .checked_mul(w)
        .and_then(|x| x.checked_mul(c))
        .ok_or_else(|| Error::Format("grid size overflows".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 4 * n {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            4 * n
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    FeatureGrid::new(h, w, c, data)
}

pub fn save_hypl(grid: &FeatureGrid, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_hypl(grid, &mut buf)?;
    crate::image::write_atomic(path, &buf)
}

pub fn load_hypl(path: &Path) -> Result<FeatureGrid> {
    read_hypl(std::io::BufReader::new(std::fs::File::open(path)?))
}
