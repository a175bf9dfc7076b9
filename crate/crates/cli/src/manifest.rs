//! Output directory writer and run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use statqpe::Error;

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub statqpe: &'static str,
    pub rustc_target: &'static str,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub versions: Versions,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileRecord>,
    pub failures: serde_json::Value,
    pub summary: serde_json::Value,
}

/// Every output goes through here so the manifest sees all of it.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileRecord>,
    started: Instant,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, Error> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Error> {
        std::fs::write(self.root.join(name), contents)?;
        self.files.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Error> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Writes `<command>.manifest.json` last; it lists every file the
    /// command wrote.
    pub fn finish(
        self,
        command: &str,
        config: serde_json::Value,
        seed: u64,
        failures: serde_json::Value,
        summary: serde_json::Value,
    ) -> Result<(), Error> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            seed,
            versions: Versions {
                statqpe: env!("CARGO_PKG_VERSION"),
                rustc_target: std::env::consts::ARCH,
            },
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            files: self.files,
            failures,
            summary,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(self.root.join(format!("{command}.manifest.json")), text + "\n")?;
        Ok(())
    }
}
