//! Report files. Floats are written with Rust's shortest round-trip formatting
//! so a CSV read back reproduces every bit.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the files of one run so the manifest can list their digests.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<(String, String)>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Io(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, &bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push((name.to_string(), sha256_hex(&bytes)));
        Ok(())
    }

    /// Writes a CSV with a fixed header; every row must match its width.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.put(name, bytes)
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.put(name, bytes)
    }

    /// Writes `manifest.json` last: the resolved config, its digest, the seed,
    /// crate versions and the digest of every file above. No timestamps.
    pub fn finish(mut self, subcommand: &str, config: &Value, seed: u64) -> Result<Vec<String>, CliError> {
        // where the files land does not change them, so the digest skips output.dir
        let mut hashed = config.clone();
        if let Some(out) = hashed.get_mut("output").and_then(Value::as_object_mut) {
            out.remove("dir");
        }
        let canonical = serde_json::to_vec(&hashed).map_err(|e| CliError::Io(e.to_string()))?;
        let files: serde_json::Map<String, Value> =
            self.written.iter().map(|(n, h)| (n.clone(), Value::String(h.clone()))).collect();
        let manifest = json!({
            "tool": "tzlab",
            "subcommand": subcommand,
            "versions": {"tzlab-cli": env!("CARGO_PKG_VERSION"), "tzlab": tzlab::VERSION},
            "seed": seed,
            "config_sha256": sha256_hex(&canonical),
            "config": config,
            "files": files,
        });
        self.json("manifest.json", &manifest)?;
        Ok(self.written.into_iter().map(|(n, _)| n).collect())
    }
}
