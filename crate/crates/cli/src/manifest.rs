//! Run manifests and atomic output.
//!
//! Results are staged in a temporary directory next to the destination and
//! renamed into place one by one; the manifest goes last. If anything fails,
//! files already moved are deleted and the staging directory is dropped, so
//! a manifest never lists a file that is missing or differs from its digest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use quartic_nls::experiments::acceptance::{hex_digest, Artifact};
use quartic_nls::experiments::workers;
use serde::Serialize;

use crate::config::{Config, Override};

pub const MANIFEST: &str = "manifest.json";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Host {
    pub os: &'static str,
    pub arch: &'static str,
    pub workers: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Config,
    pub overrides: Vec<Override>,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub host: Host,
    pub files: Vec<FileEntry>,
    /// SHA-256 over the `name  digest` lines of `files`, in order.
    pub digest: String,
}

impl RunManifest {
    pub fn new(command: &str, config: &Config, overrides: &[Override]) -> Self {
        Self {
            artifact_version: ARTIFACT_VERSION,
            command: command.to_string(),
            seed: config.seed,
            config: config.clone(),
            overrides: overrides.to_vec(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            elapsed_seconds: 0.0,
            host: Host {
                os: std::env::consts::OS,
                arch: std::env::consts::ARCH,
                workers: workers(),
            },
            files: Vec::new(),
            digest: String::new(),
        }
    }
}

/// Digest lines in the form `sha256sum` prints.
pub fn digest_listing(files: &[FileEntry]) -> String {
    files.iter().map(|f| format!("{}  {}\n", f.sha256, f.name)).collect()
}

/// Writes `artifacts` and then the manifest into `dir`.
pub fn commit(dir: &Path, artifacts: &[Artifact], mut manifest: RunManifest, started: std::time::Instant) -> std::io::Result<RunManifest> {
    fs::create_dir_all(dir)?;
    let staging = tempfile::Builder::new().prefix(".qnls-staging").tempdir_in(dir)?;
    manifest.files = artifacts
        .iter()
        .map(|a| FileEntry {
            name: a.name.clone(),
            bytes: a.bytes.len(),
            sha256: a.digest(),
        })
        .collect();
    manifest.digest = hex_digest(digest_listing(&manifest.files).as_bytes());
    for a in artifacts {
        if a.name.contains(['/', '\\']) || a.name == MANIFEST {
            return Err(std::io::Error::other(format!("bad artifact name {}", a.name)));
        }
        let mut f = fs::File::create(staging.path().join(&a.name))?;
        f.write_all(&a.bytes)?;
        f.sync_all()?;
    }
    manifest.elapsed_seconds = started.elapsed().as_secs_f64();
    let mut text = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
    text.push(b'\n');
    fs::write(staging.path().join(MANIFEST), text)?;

    // A stale manifest from an earlier run must not describe the new files.
    let old = dir.join(MANIFEST);
    if old.exists() {
        fs::remove_file(&old)?;
    }
    let mut moved: Vec<PathBuf> = Vec::new();
    let names = artifacts.iter().map(|a| a.name.as_str()).chain([MANIFEST]);
    for name in names {
        let target = dir.join(name);
        if let Err(e) = fs::rename(staging.path().join(name), &target) {
            for p in &moved {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        moved.push(target);
    }
    Ok(manifest)
}

/// Re-hashes the files a manifest lists; returns the names that do not match.
pub fn verify(dir: &Path) -> std::io::Result<Vec<String>> {
    let text = fs::read(dir.join(MANIFEST))?;
    let value: serde_json::Value = serde_json::from_slice(&text).map_err(std::io::Error::other)?;
    let mut bad = Vec::new();
    for f in value["files"].as_array().into_iter().flatten() {
        let name = f["name"].as_str().unwrap_or_default();
        let ok = fs::read(dir.join(name)).is_ok_and(|b| f["sha256"].as_str() == Some(hex_digest(&b).as_str()));
        if !ok {
            bad.push(name.to_string());
        }
    }
    Ok(bad)
}
