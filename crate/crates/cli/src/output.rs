use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Command;

pub const MANIFEST_SUFFIX: &str = ".manifest.json";

/// 17 significant digits, enough to round-trip any `f64`. Negative zero prints as zero.
pub fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A CSV table with a checksum comment line ahead of the header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(config_digest: &str, header: &[&str]) -> Self {
        let mut text = format!("# manifest-sha256: {config_digest}\n");
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to run a command again, plus checksums of what it wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub out_dir: PathBuf,
    /// Digest of `tool`, `version` and `command`; embedded in every CSV.
    pub config_sha256: String,
    pub outputs: Vec<OutputFile>,
}

pub fn config_digest(command: &Command) -> Result<String> {
    let config = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
    });
    Ok(sha256_hex(serde_json::to_string(&config)?.as_bytes()))
}

/// Collects artifacts for one run and writes them with the manifest.
pub struct Run {
    pub out_dir: PathBuf,
    pub digest: String,
    command: Command,
    files: Vec<(String, Vec<u8>)>,
}

impl Run {
    pub fn new(command: Command, out_dir: PathBuf) -> Result<Self> {
        let digest = config_digest(&command)?;
        Ok(Self { out_dir, digest, command, files: Vec::new() })
    }

    pub fn csv(&self, header: &[&str]) -> Csv {
        Csv::new(&self.digest, header)
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    /// Writes every artifact and `<first artifact><MANIFEST_SUFFIX>`; returns the written paths.
    pub fn finish(self) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.out_dir).with_context(|| format!("creating {}", self.out_dir.display()))?;
        let mut written = Vec::new();
        let mut outputs = Vec::new();
        for (name, bytes) in &self.files {
            let path = self.out_dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            outputs.push(OutputFile { path: name.clone(), sha256: sha256_hex(bytes) });
            written.push(path);
        }
        let stem = self.files.first().map(|(n, _)| n.clone()).unwrap_or_else(|| "run".into());
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            out_dir: self.out_dir.clone(),
            config_sha256: self.digest,
            outputs,
        };
        let path = self.out_dir.join(format!("{stem}{MANIFEST_SUFFIX}"));
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(written)
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

/// Rows of a CSV written by this tool: comment lines skipped, header split off.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines
        .next()
        .with_context(|| format!("{} has no header row", path.display()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines.map(|l| l.split(',').map(|s| s.trim().to_string()).collect()).collect();
    Ok((header, rows))
}
