use std::fs;
use std::io::BufWriter;
use std::path::Path;

use inls_core::dynamics::TrajectoryRecord;
use inls_core::radial::RadialField;
use serde::Serialize;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    write_atomic(path, text.as_bytes())
}

/// Write to a sibling temp file and rename, so a reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| format!("{}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))
}

pub const TRAJECTORY_COLUMNS: [&str; 10] = [
    "t", "mass", "energy", "h1a", "kinetic", "linf", "V", "Vp", "Vpp", "status",
];

pub fn write_trajectory(path: &Path, records: &[TrajectoryRecord]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let err = |e: csv::Error| e.to_string();
    w.write_record(TRAJECTORY_COLUMNS).map_err(err)?;
    for r in records {
        let nums = [
            r.t, r.mass, r.energy, r.h1a, r.kinetic, r.linf, r.v, r.vp, r.vpp,
        ]
        .map(float);
        w.write_record(nums.iter().map(String::as_str).chain([r.status.as_str()]))
            .map_err(err)?;
    }
    w.flush().map_err(|e| e.to_string())
}

pub fn write_field(path: &Path, u: &RadialField) -> Result<(), String> {
    let f = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    u.write_text(BufWriter::new(f))
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))
}
