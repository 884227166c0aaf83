//! CSV tables, per-run histories and the output manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use relaxproj::RunRecord;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// A rectangular table of pre-formatted cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r.records().map(|rec| Ok(rec?.iter().map(str::to_string).collect())).collect::<Result<_>>()?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

/// Iteration count, or `fail` when the run hit its cap.
pub fn fmt_count(v: Option<usize>) -> String {
    v.map_or_else(|| "fail".to_string(), |n| n.to_string())
}

/// `γ, θ, η` cells, blank when the method has no such triple.
pub fn fmt_params(p: Option<[f64; 3]>) -> [String; 3] {
    match p {
        Some([g, th, et]) => [fmt_real(g), fmt_real(th), fmt_real(et)],
        None => Default::default(),
    }
}

/// History table with header `k,fpr,feas,support`; row `k` holds the
/// residuals of the step from `z^k` to `z^{k+1}`.
pub fn history_table(rec: &RunRecord) -> Table {
    let mut t = Table::new(["k", "fpr", "feas", "support"]);
    for k in 0..rec.fpr.len() {
        let support = rec.support.as_ref().map_or_else(String::new, |s| s[k].to_string());
        t.push(vec![k.to_string(), fmt_real(rec.fpr[k]), fmt_real(rec.feas[k]), support]);
    }
    t
}

#[derive(Debug, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub config_hash: String,
    pub files: Vec<ManifestEntry>,
}

/// Writes files below one output directory and records them for the
/// manifest.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(ManifestEntry { path: rel.to_string(), sha256: hex::encode(Sha256::digest(contents.as_bytes())) });
        Ok(path)
    }

    pub fn write_table(&mut self, rel: &str, table: &Table) -> Result<PathBuf> {
        self.write(rel, &table.to_csv()?)
    }

    /// Writes `manifest.json` listing everything written so far, sorted by path.
    pub fn finish(mut self, experiment: &str, config_hash: &str) -> Result<PathBuf> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let m = Manifest { experiment: experiment.to_string(), config_hash: config_hash.to_string(), files: self.files };
        let path = self.root.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1e-13, 2.0 / 3.0, 1.0, 12345.678e10, f64::MIN_POSITIVE] {
            assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn table_round_trip() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), fmt_real(0.3)]);
        t.push(vec!["fail".into(), "x,y".into()]);
        assert_eq!(Table::from_csv(&t.to_csv().unwrap()).unwrap(), t);
    }
}
