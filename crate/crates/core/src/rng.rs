//! SplitMix64 stream used for every random draw in the crate.
//!
//! All randomness (decoder weights, synthetic grids, Monte-Carlo samples)
//! comes from this generator so results are reproducible bit-for-bit on
//! any platform.

use std::f64::consts::PI;

use crate::geometry::SphericalDir;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream `index` derived from `seed`.
    ///
    /// Parallel samplers give each fixed-size chunk its own stream, so the
    /// result never depends on how chunks are scheduled across threads.
    pub fn stream(seed: u64, index: u64) -> Self {
        Self::new(mix64(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    #[inline]
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform direction on the unit sphere by inverse CDF: the cosine of the
    /// colatitude is uniform in [-1, 1] and the longitude uniform in [-pi, pi).
    pub fn sphere_dir(&mut self) -> SphericalDir {
        let cos_theta = 1.0 - 2.0 * self.next_f64();
        let phi = PI * self.next_signed();
        SphericalDir::new(cos_theta.clamp(-1.0, 1.0).acos(), phi)
    }

    /// Uniform direction restricted to colatitudes whose cosine lies in
    /// `[cos_lo, cos_hi]`.
    pub fn sphere_dir_in_band(&mut self, cos_lo: f64, cos_hi: f64) -> SphericalDir {
        let cos_theta = self.uniform(cos_lo, cos_hi);
        let phi = PI * self.next_signed();
        SphericalDir::new(cos_theta.clamp(-1.0, 1.0).acos(), phi)
    }
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
