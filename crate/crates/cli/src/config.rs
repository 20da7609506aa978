//! Run configuration: a JSON file, with command-line flags layered on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hyplane::layout::{layout_for, LayoutKind};
use hyplane::{Variant, WarpKind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub variant: Variant,
    /// Region layout of the unified map. Variants without one (tri-grid,
    /// dual spherical tri-plane) store their planes separately.
    pub layout: LayoutKind,
    /// Side of the unified map in texels.
    pub size: usize,
    pub channels: usize,
    pub warp: WarpKind,
    /// Grids per axis for the tri-grid.
    pub depth: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub orbit: OrbitConfig,
    pub pattern: PatternConfig,
    pub report: ReportConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            variant: Variant::HyPlane31,
            layout: LayoutKind::AreaBiased,
            size: 128,
            channels: 32,
            warp: WarpKind::LaeaElliptical,
            depth: 3,
            seed: 0,
            out: PathBuf::from("out"),
            orbit: OrbitConfig::default(),
            pattern: PatternConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Random weights drawn from the decoder seed.
    Random,
    /// Zero density everywhere.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitConfig {
    pub frames: usize,
    /// Camera distance from the origin.
    pub radius: f64,
    pub vfov_degrees: f64,
    pub width: usize,
    pub height: usize,
    /// Quadrature points per ray.
    pub ray_samples: usize,
    pub decoder: DecoderKind,
    /// Defaults to the run seed.
    pub decoder_seed: Option<u64>,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            frames: 8,
            radius: 3.0,
            vfov_degrees: 45.0,
            width: 64,
            height: 64,
            ray_samples: 64,
            decoder: DecoderKind::Random,
            decoder_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternConfig {
    /// `stripes`, `checker`, `polar-grid`, or a path to a P6 image.
    pub source: String,
    /// Side of builtin patterns; file patterns keep their own size.
    pub resolution: usize,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            source: "stripes".to_string(),
            resolution: 256,
        }
    }
}

/// One row of the ablation grid. `warp` is ignored for variants without a
/// sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowConfig {
    pub variant: Variant,
    pub layout: LayoutKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warp: Option<WarpKind>,
}

impl RowConfig {
    pub fn new(variant: Variant, layout: LayoutKind, warp: Option<WarpKind>) -> Self {
        Self { variant, layout, warp }
    }

    /// Warp actually in effect.
    pub fn effective_warp(&self) -> Option<WarpKind> {
        if self.variant.has_sphere() {
            Some(self.warp.unwrap_or(WarpKind::LaeaElliptical))
        } else {
            None
        }
    }

    pub fn label(&self) -> String {
        match self.effective_warp() {
            Some(w) => format!("{}/{}/{}", self.variant, self.layout, w),
            None => format!("{}/{}", self.variant, self.layout),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Density histogram bins per side.
    pub bins: usize,
    /// Directions drawn for the density histogram.
    pub samples: usize,
    pub utilization_resolution: usize,
    pub utilization_samples: usize,
    pub seam_pairs: usize,
    /// Angular separation of seam and control pairs, radians.
    pub seam_delta: f64,
    pub polar_samples: usize,
    pub mirror_points: usize,
    pub rows: Vec<RowConfig>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        use LayoutKind::{AreaBiased, Even};
        use WarpKind::{LaeaElliptical, NaiveThetaPhi};
        Self {
            bins: 64,
            samples: 1_000_000,
            utilization_resolution: 256,
            utilization_samples: 10_000_000,
            seam_pairs: 10_000,
            seam_delta: 1e-3,
            polar_samples: 20_000,
            mirror_points: 1_000,
            rows: vec![
                RowConfig::new(Variant::TriPlane, Even, None),
                RowConfig::new(Variant::SphericalTriPlane, Even, Some(NaiveThetaPhi)),
                RowConfig::new(Variant::HyPlane31, AreaBiased, Some(NaiveThetaPhi)),
                RowConfig::new(Variant::HyPlane31, AreaBiased, Some(LaeaElliptical)),
                RowConfig::new(Variant::HyPlane22, AreaBiased, Some(LaeaElliptical)),
            ],
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Whether the configured variant is stored as one unified map.
    pub fn uses_unified_map(&self) -> bool {
        !matches!(self.variant, Variant::TriGrid | Variant::DualSphericalTriPlane)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 {
            bail!("channels must be positive");
        }
        if self.depth == 0 {
            bail!("depth must be positive");
        }
        if self.uses_unified_map() {
            layout_for(self.variant, self.layout, self.size)?;
        } else if self.size < 4 {
            bail!("size {} too small", self.size);
        }
        let o = &self.orbit;
        if o.frames == 0 {
            bail!("orbit needs at least one frame");
        }
        if !(o.radius > 1.8 && o.radius.is_finite()) {
            bail!("orbit radius {} must exceed the cube's half-diagonal", o.radius);
        }
        if !(o.vfov_degrees > 0.0 && o.vfov_degrees < 180.0) {
            bail!("vertical field of view {} outside (0, 180)", o.vfov_degrees);
        }
        if o.width == 0 || o.height == 0 {
            bail!("empty frame size");
        }
        if o.ray_samples < 2 {
            bail!("need at least 2 samples per ray");
        }
        if self.pattern.resolution < 2 {
            bail!("pattern resolution must be at least 2");
        }
        let r = &self.report;
        if r.bins < 8 {
            bail!("report needs at least 8 bins");
        }
        if r.samples < 100_000 {
            bail!("report needs at least 1e5 density samples");
        }
        if r.utilization_resolution < 64 {
            bail!("utilization resolution must be at least 64");
        }
        if r.utilization_samples == 0 || r.seam_pairs == 0 || r.polar_samples == 0 {
            bail!("report sample counts must be positive");
        }
        if !(r.seam_delta > 0.0 && r.seam_delta <= 1e-2) {
            bail!("seam delta {} outside (0, 1e-2]", r.seam_delta);
        }
        if r.mirror_points < 100 {
            bail!("mirror check needs at least 100 points");
        }
        if r.rows.is_empty() {
            bail!("report has no rows");
        }
        for row in &r.rows {
            if matches!(row.variant, Variant::TriGrid | Variant::DualSphericalTriPlane) {
                bail!("report rows need a unified-map variant, got {}", row.variant);
            }
            layout_for(row.variant, row.layout, self.size).with_context(|| format!("row {}", row.label()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_round_trips() {
        let c = Config::default();
        c.validate().unwrap();
        let back: Config = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: Config = serde_json::from_str(r#"{"variant": "hy-plane-22", "orbit": {"frames": 2}}"#).unwrap();
        assert_eq!(c.variant, Variant::HyPlane22);
        assert_eq!(c.orbit.frames, 2);
        assert_eq!(c.orbit.width, 64);
        assert_eq!(c.channels, 32);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"chanels": 3}"#).is_err());
    }

    #[test]
    fn invalid_combinations_rejected() {
        let mut c = Config {
            variant: Variant::TriPlane,
            ..Config::default()
        };
        assert!(c.validate().is_err(), "tri-plane has no area-biased layout");
        c.layout = LayoutKind::Even;
        c.validate().unwrap();
        c.orbit.frames = 0;
        assert!(c.validate().is_err());
        let c = Config {
            size: 6,
            ..Config::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn row_labels() {
        let r = RowConfig::new(Variant::TriPlane, LayoutKind::Even, Some(WarpKind::NaiveThetaPhi));
        assert_eq!(r.effective_warp(), None);
        assert_eq!(r.label(), "tri-plane/even");
        let r = RowConfig::new(Variant::HyPlane31, LayoutKind::AreaBiased, None);
        assert_eq!(r.label(), "hy-plane-31/area-biased/elliptical");
    }
}
