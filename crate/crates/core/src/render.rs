//! Toy volume renderer: pinhole camera, equispaced ray marching through the
//! `[-1, 1]^3` cube, a fixed random decoder from features to density and
//! colour, and front-to-back emission-absorption compositing.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::image::{quantize, Raster};
use crate::repr::Representation;
use crate::rng::SplitMix64;

/// Query points closer than this to the origin are nudged along the ray,
/// since spherical planes have no direction there.
const ORIGIN_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    position: Vec3,
    look_at: Vec3,
    up: Vec3,
    vertical_fov: f64,
    width: usize,
    height: usize,
    forward: Vec3,
    right: Vec3,
    true_up: Vec3,
}

impl Camera {
    pub fn new(position: Vec3, look_at: Vec3, up: Vec3, vertical_fov: f64, width: usize, height: usize) -> Result<Self> {
        if !(position.is_finite() && look_at.is_finite() && up.is_finite()) {
            return Err(Error::InvalidCamera("non-finite vector".into()));
        }
        if !(vertical_fov > 0.0 && vertical_fov < std::f64::consts::PI) {
            return Err(Error::InvalidCamera(format!("field of view {vertical_fov} outside (0, pi)")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidCamera("empty image".into()));
        }
        let forward = (look_at - position)
            .normalized()
            .map_err(|_| Error::InvalidCamera("position equals look_at".into()))?;
        let right = forward
            .cross(up)
            .normalized()
            .map_err(|_| Error::InvalidCamera("up is parallel to the view direction".into()))?;
        let true_up = right.cross(forward);
        Ok(Self {
            position,
            look_at,
            up,
            vertical_fov,
            width,
            height,
            forward,
            right,
            true_up,
        })
    }

    /// Camera on a horizontal circle of `radius` around the origin, looking
    /// at it with +y up. Azimuth 0 sits on +z, in front of the face;
    /// positive azimuth turns toward +x.
    pub fn orbit(azimuth: f64, radius: f64, vertical_fov: f64, width: usize, height: usize) -> Result<Self> {
        let (s, c) = azimuth.sin_cos();
        Self::new(Vec3::new(radius * s, 0.0, radius * c), Vec3::ZERO, Vec3::Y, vertical_fov, width, height)
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    pub fn look_at(&self) -> Vec3 {
        self.look_at
    }

    pub fn up(&self) -> Vec3 {
        self.up
    }

    pub fn vertical_fov(&self) -> f64 {
        self.vertical_fov
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Unit direction through the centre of pixel (`col`, `row`), row 0 at
    /// the top.
    pub fn ray_dir(&self, col: usize, row: usize) -> Vec3 {
        let t = (0.5 * self.vertical_fov).tan();
        let aspect = self.width as f64 / self.height as f64;
        let x = (2.0 * (col as f64 + 0.5) / self.width as f64 - 1.0) * t * aspect;
        let y = (1.0 - 2.0 * (row as f64 + 0.5) / self.height as f64) * t;
        (self.forward + self.right * x + self.true_up * y)
            .normalized()
            .expect("forward is a unit vector")
    }
}

/// Parameter interval where the ray `o + t d` (`t >= 0`) is inside the
/// cube, if it has positive length.
pub fn cube_interval(origin: Vec3, dir: Vec3) -> Option<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for (o, d) in [(origin.x, dir.x), (origin.y, dir.y), (origin.z, dir.z)] {
        if d == 0.0 {
            if !(-1.0..=1.0).contains(&o) {
                return None;
            }
            continue;
        }
        let (a, b) = ((-1.0 - o) / d, (1.0 - o) / d);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (hi > lo).then_some((lo, hi))
}

/// Fixed linear maps from `[f; 1]` to density and colour.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyDecoder {
    seed: u64,
    channels: usize,
    /// `C + 1` weights, bias last.
    density: Vec<f64>,
    /// Red, green and blue rows of `C + 1` weights each, bias last.
    color: [Vec<f64>; 3],
}

impl ToyDecoder {
    /// Weights drawn from a splitmix64 stream seeded with `seed`, mapped to
    /// `[-1, 1]` and scaled by `1 / sqrt(C + 1)`: the density row first,
    /// then the red, green and blue rows.
    pub fn from_seed(seed: u64, channels: usize) -> Self {
        let mut rng = SplitMix64::new(seed);
        let scale = 1.0 / ((channels + 1) as f64).sqrt();
        let mut row = || (0..=channels).map(|_| rng.next_signed() * scale).collect::<Vec<_>>();
        let density = row();
        let color = [row(), row(), row()];
        Self {
            seed,
            channels,
            density,
            color,
        }
    }

    /// All-zero weights: density `ln 2` and grey everywhere.
    pub fn zeros(channels: usize) -> Self {
        Self {
            seed: 0,
            channels,
            density: vec![0.0; channels + 1],
            color: [vec![0.0; channels + 1], vec![0.0; channels + 1], vec![0.0; channels + 1]],
        }
    }

    /// Zero weights with a density bias so negative that the volume is empty.
    pub fn empty(channels: usize) -> Self {
        let mut d = Self::zeros(channels);
        d.density[channels] = -1000.0;
        d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Weights in generation order.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = self.density.clone();
        for row in &self.color {
            w.extend_from_slice(row);
        }
        w
    }

    pub fn decode(&self, f: &[f64]) -> (f64, [f64; 3]) {
        debug_assert_eq!(f.len(), self.channels);
        let affine = |w: &[f64]| w[..self.channels].iter().zip(f).map(|(a, b)| a * b).sum::<f64>() + w[self.channels];
        let sigma = softplus(affine(&self.density));
        let rgb = [
            logistic(affine(&self.color[0])),
            logistic(affine(&self.color[1])),
            logistic(affine(&self.color[2])),
        ];
        (sigma, rgb)
    }
}

pub fn make_decoder(seed: u64, channels: usize) -> ToyDecoder {
    ToyDecoder::from_seed(seed, channels)
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayResult {
    pub rgb: [f64; 3],
    pub alpha: f64,
    /// Compositing weight of each sample, front to back; empty on a miss.
    pub weights: Vec<f64>,
    /// Length of the ray inside the cube.
    pub chord: f64,
}

/// Marches `n_samples` midpoint samples along the ray's chord through the
/// cube. `dir` must be a unit vector.
pub fn trace_ray(rep: &Representation, dec: &ToyDecoder, origin: Vec3, dir: Vec3, n_samples: usize) -> Result<RayResult> {
    let Some((t0, t1)) = cube_interval(origin, dir) else {
        return Ok(RayResult {
            rgb: [0.0; 3],
            alpha: 0.0,
            weights: Vec::new(),
            chord: 0.0,
        });
    };
    let chord = t1 - t0;
    let dt = chord / n_samples as f64;
    let mut transmittance = 1.0;
    let mut rgb = [0.0; 3];
    let mut weights = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let t = t0 + (i as f64 + 0.5) * dt;
        let mut p = origin + dir * t;
        if p.norm() < ORIGIN_EPS {
            p = p + dir * (2.0 * ORIGIN_EPS);
        }
        let (sigma, c) = dec.decode(&rep.query(p)?);
        let a = 1.0 - (-sigma * dt).exp();
        let w = transmittance * a;
        for k in 0..3 {
            rgb[k] += w * c[k];
        }
        weights.push(w);
        transmittance *= 1.0 - a;
    }
    Ok(RayResult {
        rgb,
        alpha: 1.0 - transmittance,
        weights,
        chord,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderedImage {
    pub width: usize,
    pub height: usize,
    /// Row-major from the top-left pixel.
    pub rgb: Vec<[f64; 3]>,
    pub alpha: Vec<f64>,
}

impl RenderedImage {
    pub fn to_ppm(&self) -> Raster {
        let data = self.rgb.iter().flat_map(|c| c.map(quantize)).collect();
        Raster::new(self.width, self.height, 3, data).expect("sized from the image")
    }

    pub fn to_pgm(&self) -> Raster {
        let data = self.alpha.iter().map(|&a| quantize(a)).collect();
        Raster::new(self.width, self.height, 1, data).expect("sized from the image")
    }
}

pub fn render(rep: &Representation, cam: &Camera, dec: &ToyDecoder, n_samples: usize) -> Result<RenderedImage> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples per ray, got {n_samples}")));
    }
    if dec.channels() != rep.channels() {
        return Err(Error::InvalidArgument(format!(
            "decoder expects {} channels, representation has {}",
            dec.channels(),
            rep.channels()
        )));
    }
    let rows = (0..cam.height)
        .into_par_iter()
        .map(|row| {
            (0..cam.width)
                .map(|col| trace_ray(rep, dec, cam.position, cam.ray_dir(col, row), n_samples))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut img = RenderedImage {
        width: cam.width,
        height: cam.height,
        rgb: Vec::with_capacity(cam.width * cam.height),
        alpha: Vec::with_capacity(cam.width * cam.height),
    };
    for r in rows.into_iter().flatten() {
        img.rgb.push(r.rgb);
        img.alpha.push(r.alpha);
    }
    Ok(img)
}
