//! Artifact writing: CSV and JSON files written atomically, each recorded
//! with its hash for the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// SHA-256 of the effective config text.
    pub config_hash: String,
    pub seed: u64,
    /// Probability of each conditioned step, in order.
    pub step_probabilities: Vec<f64>,
    pub wall_clock_seconds: f64,
    /// Every file of the run except this manifest.
    pub outputs: Vec<OutputFile>,
    /// Config after defaults and overrides; re-running from it reproduces
    /// the outputs.
    pub effective_config: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Write through a temporary sibling and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Output directory of one run.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    /// Prepare `root`. A directory holding only an earlier run's artifacts
    /// is cleared; any other content is refused so that the manifest can
    /// list everything present.
    pub fn prepare(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        let previous: Vec<String> = match fs::read(root.join(MANIFEST)) {
            Ok(bytes) => serde_json::from_slice::<RunManifest>(&bytes)
                .map(|m| m.outputs.into_iter().map(|o| o.file).collect())
                .map_err(|e| CliError::Io(format!("{}: unreadable manifest: {e}", root.display())))?,
            Err(_) => Vec::new(),
        };
        let mut foreign = Vec::new();
        for entry in fs::read_dir(root).map_err(|e| io_err(root, e))? {
            let name = entry.map_err(|e| io_err(root, e))?.file_name().to_string_lossy().into_owned();
            if name != MANIFEST && !previous.contains(&name) {
                foreign.push(name);
            }
        }
        if !foreign.is_empty() {
            foreign.sort();
            return Err(CliError::Io(format!(
                "{}: output directory holds files not written by a previous run: {}",
                root.display(),
                foreign.join(", ")
            )));
        }
        for name in previous.iter().chain(std::iter::once(&MANIFEST.to_string())) {
            let path = root.join(name);
            if path.exists() {
                fs::remove_file(&path).map_err(|e| io_err(&path, e))?;
            }
        }
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.root.join(name), bytes)?;
        self.files.push(OutputFile {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest, CliError> {
        manifest.outputs = self.files;
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.root.join(MANIFEST), text.as_bytes())?;
        Ok(manifest)
    }
}

/// 17 significant digits, enough to round-trip an f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column table with a header row.
pub fn table_csv(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..rows {
        let line: Vec<String> = columns
            .iter()
            .map(|c| c.get(i).map_or_else(String::new, |&v| fmt_f64(v)))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Row-major grid: the header row carries the column axis, the first
/// column the row axis.
pub fn grid_csv(row_axis: &str, col_axis: &str, rows: &[f64], cols: &[f64], values: &[f64]) -> String {
    debug_assert_eq!(values.len(), rows.len() * cols.len());
    let mut out = format!("{row_axis}\\{col_axis}");
    for &c in cols {
        out.push(',');
        out.push_str(&fmt_f64(c));
    }
    out.push('\n');
    for (i, &r) in rows.iter().enumerate() {
        out.push_str(&fmt_f64(r));
        for v in &values[i * cols.len()..(i + 1) * cols.len()] {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}
