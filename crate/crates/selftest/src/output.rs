//! CSV tables, metadata sidecars and run manifests.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use selftest_core::swap::FidelityCurve;
use selftest_core::synth::ScanPoint;

pub const SCAN_HEADER: [&str; 2] = ["phi", "Q_over_L"];
pub const CURVE_HEADER: [&str; 3] = ["Q", "f", "status"];

/// Floats are written in shortest round-trip form.
pub fn scan_csv(points: &[ScanPoint]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCAN_HEADER)?;
    for p in points {
        w.serialize((p.phi, p.q_over_l))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv writes utf-8"))
}

pub fn curve_csv(curve: &FidelityCurve) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CURVE_HEADER)?;
    for r in &curve.rows {
        w.serialize((r.q, r.f, r.status.as_str()))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv writes utf-8"))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CurveRow {
    #[serde(rename = "Q")]
    pub q: f64,
    pub f: f64,
    pub status: String,
}

pub fn read_curve_csv(text: &str) -> Result<Vec<CurveRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

/// Every numeric cell of a CSV table, row by row, header skipped.
pub fn csv_numbers(text: &str) -> Result<Vec<Vec<Option<f64>>>, csv::Error> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.map(|rec| rec.iter().map(|c| c.parse::<f64>().ok()).collect()))
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Stable name relative to the output directory.
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, exactly as given.
    pub argv: Vec<String>,
    pub params: Value,
    pub version: String,
    pub tolerances: Value,
    pub wall_clock_seconds: f64,
    pub exit_code: i32,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// Writes files under one directory and remembers their digests.
pub struct OutputSet {
    dir: PathBuf,
    digests: Vec<OutputDigest>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), digests: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.digests.push(OutputDigest { name: name.to_string(), sha256: sha256_hex(contents) });
        Ok(path)
    }

    /// Writes outside the output directory; the digest is listed as `sdpa/<name>`.
    pub fn write_at(&mut self, dir: &Path, name: &str, contents: &[u8]) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, contents)?;
        self.digests.push(OutputDigest { name: format!("sdpa/{name}"), sha256: sha256_hex(contents) });
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, v: &Value) -> io::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(v).expect("plain data");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn digests(&self) -> &[OutputDigest] {
        &self.digests
    }

    /// The manifest itself is not listed among the digests.
    pub fn finish(self, mut manifest: RunManifest) -> io::Result<PathBuf> {
        manifest.outputs = self.digests;
        let path = self.dir.join(RunManifest::file_name(&manifest.command));
        let mut text = serde_json::to_string_pretty(&manifest).expect("plain data");
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
