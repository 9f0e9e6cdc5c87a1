use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Writes `contents` to a temporary file beside `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// CSV plus a JSON sidecar carrying the resolved configuration. Everything
/// but `created_unix` is a function of the configuration alone.
pub fn write_run<C: Serialize>(
    csv_path: &Path,
    csv: &str,
    subcommand: &str,
    config: &C,
    results: Value,
) -> Result<PathBuf, CliError> {
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": central_spin_version(),
        "subcommand": subcommand,
        "config": config,
        "csv": csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
        "results": results,
        "created_unix": created,
    });
    let sidecar = sidecar_path(csv_path);
    write_atomic(csv_path, csv.as_bytes())?;
    let mut text = serde_json::to_string_pretty(&meta).map_err(CliError::internal)?;
    text.push('\n');
    write_atomic(&sidecar, text.as_bytes())?;
    Ok(sidecar)
}

fn central_spin_version() -> &'static str {
    central_spin::VERSION
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        let leftovers = std::fs::read_dir(p.parent().unwrap()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
