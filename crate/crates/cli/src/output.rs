//! Deterministic file emission: CSV/report rendering, float formatting, and
//! the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Shortest representation that parses back to the identical f64 (Rust's
/// Debug float formatting), so CSV round trips are bit-exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A file to be written, named relative to the output directory.
#[derive(Debug, Clone)]
pub struct OutputFile {
    pub name: String,
    pub content: String,
}

impl OutputFile {
    pub fn new(name: impl Into<String>, content: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            content: content.into(),
        }
    }
}

/// Everything a subcommand produces; files are written only after the whole
/// computation succeeded, so failures leave no partial outputs behind.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<OutputFile>,
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    tool_version: &'a str,
    config_hash: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    outputs: Vec<&'a str>,
}

/// Write the output files plus `manifest.toml`. On any write failure the
/// files already written by this run are removed.
pub fn commit(
    out_dir: &Path,
    subcommand: &str,
    config_hash: &str,
    output: &CommandOutput,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Domain(format!("cannot create {}: {e}", out_dir.display())))?;

    let manifest = Manifest {
        subcommand,
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash,
        seed: output.seed,
        outputs: output.files.iter().map(|f| f.name.as_str()).collect(),
    };
    let manifest_text = toml::to_string(&manifest)
        .map_err(|e| CliError::Domain(format!("manifest serialization: {e}")))?;

    let mut written = Vec::new();
    let mut write_one = |name: &str, content: &str| -> Result<(), CliError> {
        let path = out_dir.join(name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };

    for file in &output.files {
        if let Err(e) = write_one(&file.name, &file.content) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e);
        }
    }
    if let Err(e) = write_one("manifest.toml", &manifest_text) {
        for p in &written {
            let _ = std::fs::remove_file(p);
        }
        return Err(e);
    }
    Ok(written)
}

/// Build a CSV from a header and row-rendering closure.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut text = String::new();
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                text.push(',');
            }
            let _ = write!(text, "{}", fmt_f64(v));
            first = false;
        }
        text.push('\n');
    }
    text
}
