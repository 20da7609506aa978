//! Hybrid planar/spherical feature fields for head-centric radiance fields.

pub mod bundle;
pub mod error;
pub mod geometry;
pub mod image;
pub mod layout;
pub mod metrics;
pub mod plane;
pub mod render;
pub mod repr;
pub mod rng;
pub mod warp;

pub use error::{Error, Result};
pub use geometry::{Vec3, SphericalDir, PolarPoint, SphereFrame, cartesian_to_dir, dir_to_cartesian};
pub use plane::{FeatureGrid, PlanarPlane, SphericalPlane, Axis, sample_bilinear, sample_planar, sample_spherical};
pub use rng::SplitMix64;
pub use warp::{Uv, WarpKind};
pub use repr::{Representation, Variant, ReprOptions, blend_dual_sphere, mirror_pair_features, primary_sphere};
pub use layout::{LayoutKind, RegionLayout, UnifiedMap};
pub use metrics::MetricReport;
