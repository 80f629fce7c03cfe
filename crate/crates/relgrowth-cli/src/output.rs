//! Deterministic file output: atomic writes and fixed-width float
//! rendering so identical runs produce byte-identical artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Floats are printed with 12 significant digits in scientific notation;
/// integers print exactly elsewhere.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write via a temp file in the same directory, then rename over the
/// target.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = PathBuf::from(path);
    let name = tmp
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    tmp.set_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)
}
