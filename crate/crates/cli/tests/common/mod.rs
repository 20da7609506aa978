#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hyplane_cli::config::Config;
use hyplane_cli::{cmd_render_orbit, cmd_report, frame_name};
use serde_json::Value;

/// Set to `1` to rewrite fixtures instead of comparing against them.
pub const BLESS_ENV: &str = "HYPLANE_BLESS";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn blessing() -> bool {
    std::env::var(BLESS_ENV).is_ok_and(|v| v == "1")
}

/// Compares `bytes` with the committed fixture, or rewrites it when blessing.
pub fn check_fixture(name: &str, bytes: &[u8]) -> Result<(), String> {
    let path = fixture(name);
    if blessing() {
        std::fs::write(&path, bytes).map_err(|e| format!("writing {}: {e}", path.display()))?;
        return Ok(());
    }
    let want = std::fs::read(&path).map_err(|e| format!("reading {}: {e} (bless with {BLESS_ENV}=1)", path.display()))?;
    if want == bytes {
        return Ok(());
    }
    let first = want.iter().zip(bytes).position(|(a, b)| a != b).unwrap_or(want.len().min(bytes.len()));
    Err(format!(
        "{name}: {} bytes vs {} committed, first difference at byte {first}",
        bytes.len(),
        want.len()
    ))
}

pub fn load_config(name: &str, out: &Path) -> Config {
    let mut c = Config::load(&fixture(name)).unwrap();
    c.out = out.to_path_buf();
    c
}

/// Colour and alpha of the single golden frame.
pub fn golden_frame() -> (Vec<u8>, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let c = load_config("golden_frame.config.json", dir.path());
    cmd_render_orbit(&c, None).unwrap();
    let read = |ext| std::fs::read(dir.path().join(frame_name(0, ext))).unwrap();
    (read("ppm"), read("pgm"))
}

pub fn small_report_json() -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let c = load_config("report_small.config.json", dir.path());
    cmd_report(&c).unwrap();
    std::fs::read(dir.path().join(hyplane_cli::REPORT_FILE)).unwrap()
}

fn merge(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Object(a), Value::Object(b)) => {
            let mut out = serde_json::Map::new();
            let keys: std::collections::BTreeSet<String> = a
                .keys()
                .chain(b.keys())
                .map(|k| k.trim_end_matches('?').to_string())
                .collect();
            for k in keys {
                let opt = format!("{k}?");
                let va = a.get(&k).or_else(|| a.get(&opt)).cloned();
                let vb = b.get(&k).or_else(|| b.get(&opt)).cloned();
                let optional = a.contains_key(&opt) || b.contains_key(&opt) || va.is_none() || vb.is_none();
                let v = match (va, vb) {
                    (Some(x), Some(y)) => merge(x, y),
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => unreachable!(),
                };
                out.insert(if optional { format!("{k}?") } else { k }, v);
            }
            Value::Object(out)
        }
        (a, b) if a == b => a,
        (Value::String(a), Value::String(b)) => {
            let mut parts: Vec<&str> = a.split('|').chain(b.split('|')).collect();
            parts.sort_unstable();
            parts.dedup();
            Value::String(parts.join("|"))
        }
        (a, _) => a,
    }
}

/// Structure of a report with the data stripped: object keys (a `?` suffix
/// marks keys some array elements lack), leaf types, and free-form maps
/// collapsed to their value type.
pub fn schema(v: &Value) -> Value {
    schema_at(v, "")
}

fn schema_at(v: &Value, key: &str) -> Value {
    match v {
        Value::Object(_) if matches!(key, "scalars" | "metadata") => Value::String("map<string, number>".into()),
        Value::Object(m) if key == "histograms" => {
            let inner = m.values().map(|h| schema_at(h, "")).fold(None, |acc: Option<Value>, s| {
                Some(match acc {
                    Some(a) => merge(a, s),
                    None => s,
                })
            });
            let mut out = serde_json::Map::new();
            out.insert("<name>".into(), inner.unwrap_or(Value::Null));
            Value::Object(out)
        }
        Value::Object(m) => {
            let out: BTreeMap<String, Value> = m.iter().map(|(k, v)| (k.clone(), schema_at(v, k))).collect();
            Value::Object(out.into_iter().collect())
        }
        Value::Array(a) => {
            let merged = a.iter().map(|x| schema_at(x, "")).fold(None, |acc: Option<Value>, s| {
                Some(match acc {
                    Some(m) => merge(m, s),
                    None => s,
                })
            });
            Value::Array(merged.into_iter().collect())
        }
        Value::Null => Value::String("null".into()),
        Value::Bool(_) => Value::String("bool".into()),
        Value::Number(_) => Value::String("number".into()),
        Value::String(_) => Value::String("string".into()),
    }
}
