use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cone::PlusVector;
use crate::error::{Error, Result};
use crate::path::PathTable;

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Long-format table: header `r,component,sigma`, one row per grid point
/// (including `r = 0`) per component.
pub fn path_csv(table: &PathTable) -> String {
    let mut out = String::from("r,component,sigma\n");
    for (r, s) in table.grid().iter().zip(table.sigma()) {
        for (i, v) in s.iter().enumerate() {
            let _ = writeln!(out, "{},{i},{}", fmt_f64(*r), fmt_f64(*v));
        }
    }
    out
}

/// `k,component,value` rows for a discrete trajectory.
pub fn trajectory_csv(states: &[PlusVector]) -> String {
    let mut out = String::from("k,component,value\n");
    for (k, s) in states.iter().enumerate() {
        for (i, v) in s.iter().enumerate() {
            let _ = writeln!(out, "{k},{i},{}", fmt_f64(*v));
        }
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| Error::Io(e.to_string()))
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
