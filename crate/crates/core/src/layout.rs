//! Unify-split layouts: one unified feature map partitioned into named
//! rectangular regions, each becoming one plane of a representation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::FeatureGrid;
use crate::repr::{ReprOptions, Representation, Variant};

/// Region name for a quadrant that no plane uses.
pub const UNUSED: &str = "unused";

/// Map side at which the area-biased partitions use their nominal 384/128 split.
pub const REFERENCE_SIZE: usize = 512;

/// Texel rectangle; `x0` is the first column, `y0` the first row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub const fn new(x0: usize, y0: usize, w: usize, h: usize) -> Self {
        Self { x0, y0, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains(&self, col: usize, row: usize) -> bool {
        (self.x0..self.x0 + self.w).contains(&col) && (self.y0..self.y0 + self.h).contains(&row)
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x0 < o.x0 + o.w && o.x0 < self.x0 + self.w && self.y0 < o.y0 + o.h && o.y0 < self.y0 + self.h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub rect: Rect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutKind {
    Even,
    AreaBiased,
}

impl LayoutKind {
    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::Even => "even",
            LayoutKind::AreaBiased => "area-biased",
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayoutKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(LayoutKind::Even),
            "area-biased" | "area-bias" => Ok(LayoutKind::AreaBiased),
            _ => Err(Error::InvalidArgument(format!("unknown layout {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayoutSpec", into = "LayoutSpec")]
pub struct RegionLayout {
    height: usize,
    width: usize,
    regions: Vec<Region>,
    /// Angular support of a cap sphere region, if the layout has one.
    cap_colatitude: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct LayoutSpec {
    height: usize,
    width: usize,
    regions: Vec<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap_colatitude: Option<f64>,
}

impl TryFrom<LayoutSpec> for RegionLayout {
    type Error = Error;
    fn try_from(s: LayoutSpec) -> Result<Self> {
        RegionLayout::new(s.height, s.width, s.regions)?.with_cap(s.cap_colatitude)
    }
}

impl From<RegionLayout> for LayoutSpec {
    fn from(l: RegionLayout) -> Self {
        LayoutSpec {
            height: l.height,
            width: l.width,
            regions: l.regions,
            cap_colatitude: l.cap_colatitude,
        }
    }
}

/// Texel ownership tally from an exhaustive scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coverage {
    /// Texels owned by no region.
    pub gaps: usize,
    /// Texels owned by more than one region.
    pub overlaps: usize,
}

impl RegionLayout {
    /// Validates names and bounds and rejects overlapping regions. Gaps are
    /// allowed; see [`RegionLayout::coverage`].
    pub fn new(height: usize, width: usize, regions: Vec<Region>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for r in &regions {
            if !names.insert(r.name.as_str()) {
                return Err(Error::InvalidLayout(format!("duplicate region {:?}", r.name)));
            }
            let Rect { x0, y0, w, h } = r.rect;
            if w < 2 || h < 2 {
                return Err(Error::InvalidLayout(format!("region {:?} smaller than 2x2", r.name)));
            }
            if x0 + w > width || y0 + h > height {
                return Err(Error::InvalidLayout(format!(
                    "region {:?} exceeds the {height}x{width} map",
                    r.name
                )));
            }
        }
        for (i, a) in regions.iter().enumerate() {
            for b in &regions[i + 1..] {
                if a.rect.overlaps(&b.rect) {
                    return Err(Error::InvalidLayout(format!("regions {:?} and {:?} overlap", a.name, b.name)));
                }
            }
        }
        Ok(Self {
            height,
            width,
            regions,
            cap_colatitude: None,
        })
    }

    fn with_cap(mut self, cap: Option<f64>) -> Result<Self> {
        if let Some(c) = cap {
            if !(c > 0.0 && c <= std::f64::consts::PI) {
                return Err(Error::InvalidLayout(format!("cap colatitude {c} outside (0, pi]")));
            }
        }
        self.cap_colatitude = cap;
        Ok(self)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn cap_colatitude(&self) -> Option<f64> {
        self.cap_colatitude
    }

    pub fn rect(&self, name: &str) -> Option<Rect> {
        self.regions.iter().find(|r| r.name == name).map(|r| r.rect)
    }

    /// Counts, texel by texel, how many regions own each texel.
    pub fn coverage(&self) -> Coverage {
        let mut owners = vec![0u8; self.height * self.width];
        for r in &self.regions {
            for row in r.rect.y0..r.rect.y0 + r.rect.h {
                let line = &mut owners[row * self.width..(row + 1) * self.width];
                for o in &mut line[r.rect.x0..r.rect.x0 + r.rect.w] {
                    *o = o.saturating_add(1);
                }
            }
        }
        Coverage {
            gaps: owners.iter().filter(|&&o| o == 0).count(),
            overlaps: owners.iter().filter(|&&o| o > 1).count(),
        }
    }

    pub fn tiles_exactly(&self) -> bool {
        self.coverage() == Coverage { gaps: 0, overlaps: 0 }
    }
}

fn region(name: &str, rect: Rect) -> Region {
    Region {
        name: name.to_string(),
        rect,
    }
}

/// Quadrant names for the even split, in (bottom-left, bottom-right,
/// top-left, top-right) order.
fn quadrant_names(variant: Variant) -> Result<[&'static str; 4]> {
    Ok(match variant {
        Variant::TriPlane => ["xy", "xz", "yz", UNUSED],
        Variant::SphericalTriPlane => ["theta_phi", "r_theta", "r_phi", UNUSED],
        Variant::HyPlane31 => ["sphere", "xy", "yz", "xz"],
        Variant::HyPlane22 => ["sphere_a", "xy", "yz", "sphere_b"],
        Variant::TriGrid | Variant::DualSphericalTriPlane => {
            return Err(Error::InvalidLayout(format!("{variant} has more than four planes")))
        }
    })
}

/// Two-by-two split into equal quadrants.
pub fn even_layout(size: usize, variant: Variant) -> Result<RegionLayout> {
    if !size.is_multiple_of(2) || size < 4 {
        return Err(Error::InvalidLayout(format!("even split needs an even size >= 4, got {size}")));
    }
    let h = size / 2;
    let [a, b, c, d] = quadrant_names(variant)?;
    RegionLayout::new(
        size,
        size,
        vec![
            region(a, Rect::new(0, 0, h, h)),
            region(b, Rect::new(h, 0, h, h)),
            region(c, Rect::new(0, h, h, h)),
            region(d, Rect::new(h, h, h, h)),
        ],
    )
}

fn round_even(x: f64) -> usize {
    2 * (0.5 * x).round() as usize
}

/// Big/small split of `size` for the area-biased partitions.
fn biased_sides(size: usize, big_fraction: f64) -> Result<(usize, usize)> {
    if size < 8 {
        return Err(Error::InvalidLayout(format!("area-biased split needs size >= 8, got {size}")));
    }
    let big = round_even(big_fraction * size as f64);
    let small = size.saturating_sub(big);
    if big < 2 || small < 2 {
        return Err(Error::InvalidLayout(format!("no feasible tiling of {size} at fraction {big_fraction}")));
    }
    Ok((big, small))
}

/// Square sphere region of side `big`, the two planar strips elongated
/// along different axes, and a `small` square in the remaining corner.
fn biased_regions(big: usize, small: usize, names: [&str; 4]) -> Vec<Region> {
    vec![
        region(names[0], Rect::new(0, 0, big, big)),
        region(names[1], Rect::new(big, 0, small, big)),
        region(names[2], Rect::new(0, big, big, small)),
        region(names[3], Rect::new(big, big, small, small)),
    ]
}

/// (3+1) partition: 384x384 sphere, 128x384 and 384x128 planar strips and a
/// 128x128 planar square at size 512, scaled for other sizes.
pub fn area_biased_layout_31(size: usize) -> Result<RegionLayout> {
    let (big, small) = biased_sides(size, 384.0 / REFERENCE_SIZE as f64)?;
    RegionLayout::new(size, size, biased_regions(big, small, ["sphere", "xy", "yz", "xz"]))
}

pub const DEFAULT_CAP_FRACTION: f64 = 0.25;

/// (2+2) partition: a dominant sphere, two planar strips and a small sphere
/// of side `cap_fraction * size` that covers a cap around the dominant
/// sphere's South Pole.
///
/// The cap is sized so both sphere regions spend the same number of texels
/// per steradian: `1 - cos(cap) = 2 small^2 / big^2`.
pub fn area_biased_layout_22(size: usize, cap_fraction: f64) -> Result<RegionLayout> {
    if !(cap_fraction > 0.0 && cap_fraction <= 0.5) {
        return Err(Error::InvalidLayout(format!("cap fraction {cap_fraction} outside (0, 0.5]")));
    }
    let (big, small) = biased_sides(size, 1.0 - cap_fraction)?;
    let (big, small) = if small > big { (small, big) } else { (big, small) };
    let ratio = (small * small) as f64 / (big * big) as f64;
    let cap = (1.0 - 2.0 * ratio).clamp(-1.0, 1.0).acos();
    RegionLayout::new(size, size, biased_regions(big, small, ["sphere_a", "xy", "yz", "sphere_b"]))?.with_cap(Some(cap))
}

pub fn layout_for(variant: Variant, kind: LayoutKind, size: usize) -> Result<RegionLayout> {
    match (kind, variant) {
        (LayoutKind::Even, v) => even_layout(size, v),
        (LayoutKind::AreaBiased, Variant::HyPlane31) => area_biased_layout_31(size),
        (LayoutKind::AreaBiased, Variant::HyPlane22) => area_biased_layout_22(size, DEFAULT_CAP_FRACTION),
        (LayoutKind::AreaBiased, v) => Err(Error::InvalidLayout(format!("no area-biased layout for {v}"))),
    }
}

/// One feature map holding every plane of a representation in disjoint
/// regions.
///
/// Write texels first, then [`split`](UnifiedMap::split) or
/// [`build`](UnifiedMap::build): the views alias the unified storage, and
/// writes are refused while any view is alive.
#[derive(Clone, Debug)]
pub struct UnifiedMap {
    grid: FeatureGrid,
    layout: RegionLayout,
}

impl UnifiedMap {
    pub fn new(grid: FeatureGrid, layout: RegionLayout) -> Result<Self> {
        if grid.height() != layout.height || grid.width() != layout.width {
            return Err(Error::InvalidLayout(format!(
                "layout is {}x{} but the map is {}x{}",
                layout.height,
                layout.width,
                grid.height(),
                grid.width()
            )));
        }
        Ok(Self { grid, layout })
    }

    pub fn zeros(layout: RegionLayout, channels: usize) -> Result<Self> {
        let grid = FeatureGrid::zeros(layout.height, layout.width, channels)?;
        Self::new(grid, layout)
    }

    pub fn random(layout: RegionLayout, channels: usize, seed: u64) -> Result<Self> {
        let grid = FeatureGrid::random(layout.height, layout.width, channels, seed)?;
        Self::new(grid, layout)
    }

    pub fn grid(&self) -> &FeatureGrid {
        &self.grid
    }

    pub fn layout(&self) -> &RegionLayout {
        &self.layout
    }

    pub fn texel_mut(&mut self, row: usize, col: usize) -> Result<&mut [f32]> {
        self.grid.texel_mut(row, col)
    }

    /// One view per region, aliasing the unified storage.
    pub fn split(&self) -> Result<BTreeMap<String, FeatureGrid>> {
        self.layout
            .regions
            .iter()
            .map(|r| {
                let v = self.grid.view(r.rect.y0, r.rect.x0, r.rect.h, r.rect.w)?;
                Ok((r.name.clone(), v))
            })
            .collect()
    }

    /// Representation whose planes are views into this map. A cap recorded
    /// in the layout overrides `opts.cap`.
    pub fn build(&self, variant: Variant, opts: &ReprOptions) -> Result<Representation> {
        let mut views = self.split()?;
        views.remove(UNUSED);
        let mut opts = *opts;
        if variant == Variant::HyPlane22 {
            opts.cap = self.layout.cap_colatitude;
        }
        Representation::from_grids(variant, &opts, views)
    }
}
