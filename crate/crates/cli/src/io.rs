use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use relsmooth::trace::IterateTrace;
use serde_json::json;

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().with_context(|| format!("{} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> Result<()> {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn meta_path(trace_path: &Path) -> PathBuf {
    let mut s = trace_path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the CSV and its metadata sidecar `<path>.meta.json`.
pub fn write_trace(path: &Path, trace: &IterateTrace<f64>, extra: serde_json::Value) -> Result<()> {
    write_atomic(path, trace.to_csv().as_bytes())?;
    let m = &trace.meta;
    let mut meta = json!({
        "algorithm": m.algorithm,
        "L": m.l,
        "mu": m.mu,
        "seed": m.seed,
        "prng": m.prng,
        "objective": m.objective,
        "reference": m.reference,
        "f_star": m.f_star,
        "iterations": m.iterations,
        "rows": trace.records.len(),
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (meta.as_object_mut(), extra) {
        obj.extend(more);
    }
    let text = serde_json::to_string_pretty(&meta)? + "\n";
    write_atomic(&meta_path(path), text.as_bytes())
}
