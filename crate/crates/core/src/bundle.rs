//! Representations on disk: a directory with one HYPL file per plane (or a
//! single unified map) and a `manifest.json` describing how to rebuild it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::write_atomic;
use crate::layout::{Rect, RegionLayout, UnifiedMap};
use crate::plane::{load_hypl, save_hypl};
use crate::repr::{PlaneRole, ReprOptions, Representation, Variant};

pub const MANIFEST: &str = "manifest.json";
pub const UNIFIED_FILE: &str = "unified.hypl";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub variant: Variant,
    pub channels: usize,
    pub options: ReprOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unified: Option<UnifiedEntry>,
    pub planes: Vec<PlaneRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnifiedEntry {
    pub file: String,
    pub layout: RegionLayout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneRecord {
    pub name: String,
    /// Own HYPL file; absent when the plane is a region of the unified map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(flatten)]
    pub role: PlaneRole,
}

fn manifest_for(rep: &Representation, unified: Option<&UnifiedMap>) -> Manifest {
    let planes = rep
        .planes()
        .into_iter()
        .map(|e| {
            let rect = unified.and_then(|u| u.layout().rect(&e.name));
            PlaneRecord {
                file: rect.is_none().then(|| format!("{}.hypl", e.name)),
                name: e.name,
                rect,
                role: e.role,
            }
        })
        .collect();
    Manifest {
        version: BUNDLE_VERSION,
        variant: rep.variant(),
        channels: rep.channels(),
        options: rep.options(),
        unified: unified.map(|u| UnifiedEntry {
            file: UNIFIED_FILE.to_string(),
            layout: u.layout().clone(),
        }),
        planes,
    }
}

/// Writes `rep` into `dir`. With `unified`, planes whose names are regions
/// of the map are stored once, inside the map.
pub fn save_bundle(dir: &Path, rep: &Representation, unified: Option<&UnifiedMap>) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let manifest = manifest_for(rep, unified);
    if let Some(u) = unified {
        save_hypl(u.grid(), &dir.join(UNIFIED_FILE))?;
    }
    for (rec, entry) in manifest.planes.iter().zip(rep.planes()) {
        if let Some(file) = &rec.file {
            save_hypl(entry.grid, &dir.join(file))?;
        }
    }
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    write_atomic(&dir.join(MANIFEST), &json)?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let m: Manifest = serde_json::from_slice(&std::fs::read(dir.join(MANIFEST))?)?;
    if m.version != BUNDLE_VERSION {
        return Err(Error::Format(format!("unsupported bundle version {}", m.version)));
    }
    Ok(m)
}

/// Reads a bundle back. Planes stored in a unified map come back as views
/// of it; the map is returned alongside.
pub fn load_bundle(dir: &Path) -> Result<(Representation, Option<UnifiedMap>)> {
    let m = load_manifest(dir)?;
    let unified = match &m.unified {
        Some(u) => Some(UnifiedMap::new(load_hypl(&dir.join(&u.file))?, u.layout.clone())?),
        None => None,
    };
    let mut grids = std::collections::BTreeMap::new();
    for rec in &m.planes {
        let grid = match (&rec.file, &unified) {
            (Some(file), _) => load_hypl(&dir.join(file))?,
            (None, Some(u)) => {
                let r = u
                    .layout()
                    .rect(&rec.name)
                    .ok_or_else(|| Error::Format(format!("plane {:?} not in the unified layout", rec.name)))?;
                if rec.rect != Some(r) {
                    return Err(Error::Format(format!("plane {:?} rect disagrees with the layout", rec.name)));
                }
                u.grid().view(r.y0, r.x0, r.h, r.w)?
            }
            (None, None) => return Err(Error::Format(format!("plane {:?} has no storage", rec.name))),
        };
        grids.insert(rec.name.clone(), grid);
    }
    let rep = Representation::from_grids(m.variant, &m.options, grids)?;
    if rep.channels() != m.channels {
        return Err(Error::Format(format!(
            "manifest says {} channels, grids have {}",
            m.channels,
            rep.channels()
        )));
    }
    for (rec, entry) in m.planes.iter().zip(rep.planes()) {
        if rec.name != entry.name || rec.role != entry.role {
            return Err(Error::Format(format!("plane {:?} does not match the {} conventions", rec.name, m.variant)));
        }
    }
    Ok((rep, unified))
}
