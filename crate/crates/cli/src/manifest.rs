use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// Record of one command run, written next to its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, exactly as given.
    pub argv: Vec<String>,
    /// Working directory the arguments are relative to.
    pub cwd: PathBuf,
    pub params: Value,
    pub seeds: BTreeMap<String, u64>,
    pub workers: usize,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub notes: BTreeMap<String, Value>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn hash_files(paths: &[PathBuf]) -> Result<Vec<FileHash>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileHash {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, workers: usize) -> Result<Self> {
        Ok(RunManifest {
            tool: "pbit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv,
            cwd: std::env::current_dir()?,
            params: Value::Null,
            seeds: BTreeMap::new(),
            workers,
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: BTreeMap::new(),
            started_unix: unix_now(),
            finished_unix: 0,
        })
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.notes
            .insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    /// Hashes every regular file in `dir` (except the manifest) and writes
    /// the manifest there.
    pub fn finish(mut self, dir: &Path) -> Result<()> {
        let mut outputs: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != MANIFEST))
            .collect();
        outputs.sort();
        self.outputs = outputs
            .iter()
            .map(|p| {
                Ok(FileHash {
                    path: p.file_name().unwrap().to_string_lossy().into_owned(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_>>()?;
        self.finished_unix = unix_now();
        fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Errors if any recorded input changed since the run.
    pub fn check_inputs(&self) -> Result<()> {
        for input in &self.inputs {
            let path = self.cwd.join(&input.path);
            let now = sha256_file(&path)?;
            if now != input.sha256 {
                bail!("input {} changed since the recorded run", path.display());
            }
        }
        Ok(())
    }
}

/// Creates `dir`, refusing a non-empty one unless `force` is set.
pub fn prepare_out_dir(dir: &Path, force: bool) -> Result<()> {
    if dir.exists() {
        if !dir.is_dir() {
            bail!("{} exists and is not a directory", dir.display());
        }
        if !force && fs::read_dir(dir)?.next().is_some() {
            bail!("{} is not empty (use --force to write into it)", dir.display());
        }
    }
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}
