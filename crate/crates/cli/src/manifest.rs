//! Plain-text run manifest: command, configuration, seed, version, and
//! SHA-256 digests of every input and output file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

pub const FILE_NAME: &str = "manifest.txt";

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Unix time, or `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

pub struct Manifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            args: std::env::args().collect(),
            seed,
            config: Vec::new(),
            notes: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> std::io::Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "tool = mr-hetero {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "invocation = {}", self.args.join(" "));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "timestamp = {}", timestamp());
        let _ = writeln!(s, "\n[config]");
        for (k, v) in &self.config {
            let _ = writeln!(s, "{k} = {v}");
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\n[notes]");
            for n in &self.notes {
                let _ = writeln!(s, "{n}");
            }
        }
        let _ = writeln!(s, "\n[inputs]");
        for p in &self.inputs {
            let _ = writeln!(s, "sha256:{}  {}", sha256_file(p)?, p.display());
        }
        let _ = writeln!(s, "\n[outputs]");
        for p in &self.outputs {
            let name = p.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
            let _ = writeln!(s, "sha256:{}  {}", sha256_file(p)?, name);
        }
        Ok(s)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join(FILE_NAME);
        fs::write(&path, self.render()?)?;
        Ok(path)
    }
}
