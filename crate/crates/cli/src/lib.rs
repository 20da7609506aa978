//! Commands behind the `hyplane` binary.

pub mod config;
pub mod pattern;
pub mod report;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use hyplane::bundle::{load_bundle, save_bundle, Manifest};
use hyplane::image::write_atomic;
use hyplane::layout::{layout_for, LayoutKind, UnifiedMap};
use hyplane::render::{render, Camera, ToyDecoder};
use hyplane::{ReprOptions, Representation, Variant, WarpKind};

use crate::config::{Config, DecoderKind};
use crate::pattern::{hemisphere_view, sphere_view, square_view, Pattern};
use crate::report::{run_report, Report};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HYPLANE_THREADS";
pub const REPORT_FILE: &str = "report.json";
/// Exit status when the report ran but a threshold failed.
pub const EXIT_CHECKS_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hyplane", version, about = "Hybrid planar/spherical feature fields: warps, bundles, renders, diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Push a test pattern through a warp; writes square, sphere and
    /// hemisphere views.
    WarpPattern(Flags),
    /// Write a random representation as a bundle directory.
    Generate(Flags),
    /// Render frames on a horizontal orbit.
    RenderOrbit {
        #[command(flatten)]
        flags: Flags,
        /// Render this bundle instead of generating one.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Run the diagnostics; exits nonzero if a pinned threshold fails.
    Report(Flags),
}

/// Overrides for the config file, which in turn overrides the defaults.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub layout: Option<LayoutKind>,
    /// Unified map side; pattern resolution for warp-pattern.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub channels: Option<usize>,
    #[arg(long)]
    pub warp: Option<WarpKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub frames: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// stripes, checker, polar-grid, or a PPM/PGM path.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
}

impl Flags {
    pub fn resolve(&self) -> Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        self.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn apply(&self, c: &mut Config) {
        if let Some(v) = self.variant {
            c.variant = v;
        }
        if let Some(v) = self.layout {
            c.layout = v;
        }
        if let Some(v) = self.size {
            c.size = v;
        }
        if let Some(v) = self.channels {
            c.channels = v;
        }
        if let Some(v) = self.warp {
            c.warp = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.frames {
            c.orbit.frames = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = &self.pattern {
            c.pattern.source = v.clone();
        }
        if let Some(v) = self.bins {
            c.report.bins = v;
        }
        if let Some(v) = self.samples {
            c.report.samples = v;
        }
    }
}

pub fn repr_options(c: &Config) -> ReprOptions {
    ReprOptions {
        warp: c.warp,
        depth: c.depth,
        cap: None,
    }
}

/// The representation `generate` writes. Layout-capable variants live in a
/// unified map, which is returned too.
pub fn build_representation(c: &Config) -> Result<(Representation, Option<UnifiedMap>)> {
    let opts = repr_options(c);
    if c.uses_unified_map() {
        let map = UnifiedMap::random(layout_for(c.variant, c.layout, c.size)?, c.channels, c.seed)?;
        let rep = map.build(c.variant, &opts)?;
        Ok((rep, Some(map)))
    } else {
        Ok((Representation::random(c.variant, &opts, c.size / 2, c.channels, c.seed)?, None))
    }
}

/// Writes `{pattern}-{warp}-square.ppm`, `-sphere.ppm` and
/// `-hemispheres.ppm`.
pub fn cmd_warp_pattern(c: &Config) -> Result<Vec<PathBuf>> {
    let pattern = Pattern::parse(&c.pattern.source);
    let src = pattern.raster(c.pattern.resolution)?;
    std::fs::create_dir_all(&c.out)?;
    let stem = format!("{}-{}", pattern.name(), c.warp);
    let sq = c.out.join(format!("{stem}-square.ppm"));
    let sp = c.out.join(format!("{stem}-sphere.ppm"));
    let hv = c.out.join(format!("{stem}-hemispheres.ppm"));
    square_view(&src, c.warp).save(&sq)?;
    sphere_view(&src, c.warp).save(&sp)?;
    hemisphere_view(&src, c.warp).save(&hv)?;
    Ok(vec![sq, sp, hv])
}

pub fn cmd_generate(c: &Config) -> Result<Manifest> {
    let (rep, map) = build_representation(c)?;
    Ok(save_bundle(&c.out, &rep, map.as_ref())?)
}

pub fn frame_name(k: usize, ext: &str) -> String {
    format!("frame_{k:04}.{ext}")
}

/// Renders `orbit.frames` views at azimuths `2 pi k / frames`, writing
/// `frame_%04d.ppm` colour and `frame_%04d.pgm` alpha.
pub fn cmd_render_orbit(c: &Config, bundle: Option<&Path>) -> Result<Vec<PathBuf>> {
    let rep = match bundle {
        Some(dir) => load_bundle(dir).with_context(|| format!("loading bundle {}", dir.display()))?.0,
        None => build_representation(c)?.0,
    };
    let o = &c.orbit;
    let dec = match o.decoder {
        DecoderKind::Random => ToyDecoder::from_seed(o.decoder_seed.unwrap_or(c.seed), rep.channels()),
        DecoderKind::Empty => ToyDecoder::empty(rep.channels()),
    };
    std::fs::create_dir_all(&c.out)?;
    let mut written = Vec::with_capacity(2 * o.frames);
    for k in 0..o.frames {
        let azimuth = std::f64::consts::TAU * k as f64 / o.frames as f64;
        let cam = Camera::orbit(azimuth, o.radius, o.vfov_degrees.to_radians(), o.width, o.height)?;
        let img = render(&rep, &cam, &dec, o.ray_samples)?;
        let ppm = c.out.join(frame_name(k, "ppm"));
        let pgm = c.out.join(frame_name(k, "pgm"));
        img.to_ppm().save(&ppm)?;
        img.to_pgm().save(&pgm)?;
        written.push(ppm);
        written.push(pgm);
    }
    Ok(written)
}

/// Runs the report and writes it to `report.json` in the output directory.
pub fn cmd_report(c: &Config) -> Result<Report> {
    let report = run_report(c)?;
    std::fs::create_dir_all(&c.out)?;
    write_atomic(&c.out.join(REPORT_FILE), &report.to_json())?;
    Ok(report)
}

/// Executes one invocation and returns the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::WarpPattern(flags) => {
            let mut c = flags.resolve()?;
            if let Some(s) = flags.size {
                c.pattern.resolution = s;
            }
            c.validate()?;
            for p in cmd_warp_pattern(&c)? {
                println!("{}", p.display());
            }
        }
        Command::Generate(flags) => {
            let c = flags.resolve()?;
            let m = cmd_generate(&c)?;
            println!("{} bundle with {} planes in {}", m.variant, m.planes.len(), c.out.display());
        }
        Command::RenderOrbit { flags, bundle } => {
            let c = flags.resolve()?;
            for p in cmd_render_orbit(&c, bundle.as_deref())? {
                println!("{}", p.display());
            }
        }
        Command::Report(flags) => {
            let c = flags.resolve()?;
            let r = cmd_report(&c)?;
            println!("{}", c.out.join(REPORT_FILE).display());
            for f in r.failures() {
                eprintln!(
                    "FAILED {}: {} = {} (want {} {})",
                    f.name,
                    f.metric,
                    f.value,
                    serde_json::to_value(f.op)?.as_str().unwrap_or("?"),
                    f.threshold
                );
            }
            if !r.passed {
                return Ok(EXIT_CHECKS_FAILED);
            }
        }
    }
    Ok(0)
}

/// Reads [`THREADS_ENV`]; unset or empty means the rayon default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => {
            let n: usize = s.trim().parse().with_context(|| format!("{THREADS_ENV}={s:?} is not a count"))?;
            anyhow::ensure!(n > 0, "{THREADS_ENV} must be positive");
            Ok(Some(n))
        }
        _ => Ok(None),
    }
}
