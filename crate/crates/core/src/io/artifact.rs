use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped into every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub command: String,
    /// SHA-256 of the canonical JSON of the command's parameters.
    pub config_hash: String,
    /// SHA-256 of every input file, keyed by the name it was given under.
    pub input_digests: BTreeMap<String, String>,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    /// Not covered by determinism guarantees.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Result<Self> {
        Ok(RunManifest {
            toolkit_version: TOOLKIT_VERSION.to_string(),
            command: command.to_string(),
            config_hash: config_hash(config)?,
            input_digests: BTreeMap::new(),
            timestamp: now(),
        })
    }

    pub fn with_input(mut self, name: &str, path: &Path) -> Result<Self> {
        self.input_digests.insert(name.to_string(), file_digest(path)?);
        Ok(self)
    }

    pub fn with_input_bytes(mut self, name: &str, bytes: &[u8]) -> Self {
        self.input_digests.insert(name.to_string(), hex::encode(Sha256::digest(bytes)));
        self
    }
}

fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    let value = serde_json::to_value(config)?;
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(&value)?)))
}

pub fn file_digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// JSON envelope of every analysis output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Artifact<T> {
    pub format_version: u32,
    pub kind: String,
    pub manifest: RunManifest,
    pub data: T,
}

impl<T> Artifact<T> {
    pub fn new(kind: &str, manifest: RunManifest, data: T) -> Self {
        Artifact {
            format_version: super::FORMAT_VERSION,
            kind: kind.to_string(),
            manifest,
            data,
        }
    }
}

pub fn write_artifact<T: Serialize>(path: &Path, artifact: &Artifact<T>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(artifact)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads an artifact and checks its kind.
pub fn read_artifact<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Artifact<T>> {
    let text = fs::read_to_string(path)?;
    let a: Artifact<T> = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path.display().to_string(), e.line(), e.to_string()))?;
    if a.kind != kind {
        return Err(Error::Input(format!(
            "{} holds a `{}` artifact, expected `{kind}`",
            path.display(),
            a.kind
        )));
    }
    if a.format_version != super::FORMAT_VERSION {
        return Err(Error::Input(format!(
            "{}: unsupported format_version {}",
            path.display(),
            a.format_version
        )));
    }
    Ok(a)
}
