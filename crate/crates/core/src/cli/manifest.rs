//! Run manifests: config echo, version, timing and output checksums.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ZkError};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    /// The effective configuration after overrides, as TOML.
    pub config: String,
    pub jobs: usize,
    pub exit_code: i32,
    pub message: Option<String>,
    pub wall_clock_seconds: f64,
    pub summary: serde_json::Value,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = r.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
        bytes += n as u64;
    }
    let hex = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok((hex, bytes))
}

pub fn file_entry(dir: &Path, rel: &str) -> Result<FileEntry> {
    let (sha256, bytes) = sha256_file(&dir.join(rel))?;
    Ok(FileEntry {
        path: rel.to_string(),
        bytes,
        sha256,
    })
}

pub fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(m).map_err(|e| ZkError::Format(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST_NAME), text + "\n")?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_NAME))?;
    serde_json::from_str(&text).map_err(|e| ZkError::Format(e.to_string()))
}

/// Recomputes every checksum; returns one message per missing or altered
/// file (empty when the directory matches its manifest).
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let m = read_manifest(dir)?;
    let mut problems = Vec::new();
    for f in &m.files {
        match sha256_file(&dir.join(&f.path)) {
            Ok((sha, bytes)) => {
                if sha != f.sha256 || bytes != f.bytes {
                    problems.push(format!("{}: checksum mismatch", f.path));
                }
            }
            Err(_) => problems.push(format!("{}: missing", f.path)),
        }
    }
    Ok(problems)
}
