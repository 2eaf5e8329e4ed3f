//! Run manifests: the checksum record binding a run's outputs to its
//! resolved config. Re-running with the same config and seed must
//! reproduce every checksum bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const RESOLVED_FILE: &str = "resolved.cfg";

/// What a completed run wrote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    /// SHA-256 of the resolved config text.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// `(file name, sha256 hex)` sorted by name; includes `resolved.cfg`.
    pub outputs: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn to_csv(&self) -> String {
        let mut csv = String::from("key,value\n");
        let _ = writeln!(csv, "config_hash,{}", self.config_hash);
        let _ = writeln!(csv, "seed,{}", self.seed);
        let _ = writeln!(csv, "version,{}", self.version);
        for (name, hash) in &self.outputs {
            let _ = writeln!(csv, "output:{name},{hash}");
        }
        csv
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let broken = |msg: String| CliError::Integrity(msg);
        let mut lines = text.lines();
        if lines.next() != Some("key,value") {
            return Err(broken("manifest is missing the key,value header".into()));
        }
        let mut config_hash = None;
        let mut seed = None;
        let mut version = None;
        let mut outputs = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(',')
                .ok_or_else(|| broken(format!("malformed manifest row {line:?}")))?;
            if let Some(name) = key.strip_prefix("output:") {
                outputs.push((name.to_string(), value.to_string()));
            } else {
                match key {
                    "config_hash" => config_hash = Some(value.to_string()),
                    "seed" => {
                        seed = Some(value.parse::<u64>().map_err(|_| {
                            broken(format!("manifest seed is not an integer: {value:?}"))
                        })?)
                    }
                    "version" => version = Some(value.to_string()),
                    other => return Err(broken(format!("unknown manifest key {other:?}"))),
                }
            }
        }
        Ok(Self {
            config_hash: config_hash.ok_or_else(|| broken("manifest lacks config_hash".into()))?,
            seed: seed.ok_or_else(|| broken("manifest lacks seed".into()))?,
            version: version.ok_or_else(|| broken("manifest lacks version".into()))?,
            outputs,
        })
    }
}

/// Writes the output files, the resolved config, and the manifest into
/// the config's output directory (created if missing), then re-reads the
/// manifest and verifies every checksum against the bytes on disk.
pub fn write_run(cfg: &ExperimentConfig, files: &[(String, String)]) -> Result<RunManifest, CliError> {
    let dir = &cfg.out;
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Config(format!("cannot create output directory {}: {e}", dir.display()))
    })?;
    let resolved = cfg.resolved_text();
    let mut all: Vec<(String, String)> = files.to_vec();
    all.push((RESOLVED_FILE.to_string(), resolved.clone()));
    all.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in all.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(CliError::Numerical(format!("duplicate output name {:?}", pair[0].0)));
        }
    }
    let outputs: Vec<(String, String)> =
        all.iter().map(|(name, content)| (name.clone(), sha256_hex(content.as_bytes()))).collect();
    let manifest = RunManifest {
        config_hash: sha256_hex(resolved.as_bytes()),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
    };
    for (name, content) in &all {
        let path = dir.join(name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_csv())
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    // proves the bytes that landed on disk are the bytes that were hashed
    let reread = load_and_verify(dir)?;
    if reread != manifest {
        return Err(CliError::Integrity("manifest round-trip mismatch".into()));
    }
    Ok(manifest)
}

/// Reads `manifest.csv` in `dir` and verifies every listed checksum.
pub fn load_and_verify(dir: &Path) -> Result<RunManifest, CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Integrity(format!("cannot read {}: {e}", path.display())))?;
    let manifest = RunManifest::parse(&text)?;
    for (name, expected) in &manifest.outputs {
        let file = dir.join(name);
        let bytes = std::fs::read(&file)
            .map_err(|e| CliError::Integrity(format!("missing output {}: {e}", file.display())))?;
        let got = sha256_hex(&bytes);
        if got != *expected {
            return Err(CliError::Integrity(format!(
                "checksum mismatch for {name}: manifest has {expected}, file has {got}"
            )));
        }
    }
    Ok(manifest)
}
