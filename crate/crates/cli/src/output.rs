//! Output directory with atomic writes, CSV tables, plot sidecars and the
//! run manifest.

use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A header and string-formatted rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Index of column `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column `name` parsed as numbers.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let c = self.column(name).expect("column exists");
        self.rows
            .iter()
            .map(|r| r[c].parse().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Formats a float so that it parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// How an external tool should draw one CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub data: String,
    pub kind: String,
    pub title: String,
    pub x: String,
    pub y: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facet: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of `config.toml` in the same directory.
    pub config_sha256: String,
    pub seed: u64,
    pub stages: Vec<StageTiming>,
    pub outputs: Vec<OutputFile>,
}

/// Every write lands in a temporary file first and is renamed into place.
/// Paths are relative and may not leave the directory.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn resolve(&self, name: &str) -> Result<PathBuf> {
        let rel = Path::new(name);
        let ok = !name.is_empty() && rel.components().all(|c| matches!(c, Component::Normal(_)));
        if !ok {
            return Err(CliError::Config(format!(
                "output name `{name}` escapes the output directory"
            )));
        }
        Ok(self.root.join(rel))
    }

    /// Writes `bytes` to `name` without recording it in the manifest.
    pub fn write_unlisted(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.resolve(name)?;
        let dir = path.parent().expect("joined path has a parent");
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let file_name = path
            .file_name()
            .expect("normal component")
            .to_string_lossy();
        let tmp = dir.join(format!(".{file_name}.tmp"));
        fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.write_unlisted(name, bytes)?;
        self.files.retain(|f| f.path != name);
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> Result<()> {
        self.write(name, &table.to_csv())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// `<stem>.plot.json` next to the data file named in `spec`.
    pub fn write_plot(&mut self, spec: &PlotSpec) -> Result<()> {
        let stem = spec.data.strip_suffix(".csv").unwrap_or(&spec.data);
        self.write_json(&format!("{stem}.plot.json"), spec)
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    /// Writes `manifest.json` listing every file written so far, sorted by
    /// path.
    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest> {
        let mut files = self.files.clone();
        files.sort_by(|a, b| a.path.cmp(&b.path));
        manifest.outputs = files;
        let mut s = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        s.push('\n');
        self.write_unlisted("manifest.json", s.as_bytes())?;
        Ok(manifest)
    }
}
