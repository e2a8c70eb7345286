//! Metadata headers and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use san_core::demand::PRNG_ID;

use crate::{CliError, ScenarioConfig, VERSION};

/// `#`-prefixed header that records everything needed to re-run: tool
/// version, scenario, seed, PRNG and the effective configuration.
pub fn metadata(cfg: &ScenarioConfig, seed: Option<u64>) -> String {
    let mut s = format!("# san-workbench {VERSION}\n# scenario={}\n", cfg.scenario.id);
    if let Some(seed) = seed {
        s.push_str(&format!("# seed={seed}\n"));
    }
    s.push_str(&format!("# prng={PRNG_ID}\n# config:\n"));
    for line in cfg.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            s.push_str(&format!("#   {line}\n"));
        }
    }
    s
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(path.to_path_buf())
}
