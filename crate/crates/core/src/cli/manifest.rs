use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Record of one invocation. Contains nothing time- or host-dependent, so an
/// identical configuration yields an identical manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run_id: String,
    pub config_hash: String,
    pub version: String,
    pub command: String,
    pub overrides: Vec<String>,
    pub inputs: Vec<FileEntry>,
    pub files: Vec<FileEntry>,
    pub summary: BTreeMap<String, String>,
}

/// Collects the files a command writes into its output directory.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn finish(
        mut self,
        command: &str,
        canonical_config: &str,
        overrides: &[String],
        inputs: Vec<FileEntry>,
        summary: BTreeMap<String, String>,
    ) -> Result<Manifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let config_hash = sha256_hex(canonical_config.as_bytes());
        let mut seed = format!("{command}\n{config_hash}\n");
        for i in &inputs {
            seed.push_str(&i.sha256);
            seed.push('\n');
        }
        let run_id = sha256_hex(seed.as_bytes())[..16].to_string();
        let manifest = Manifest {
            run_id,
            config_hash,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            overrides: overrides.to_vec(),
            inputs,
            files: self.files,
            summary,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(self.dir.join(MANIFEST_NAME), text)?;
        Ok(manifest)
    }
}

pub fn input_entry(path: &Path, bytes: &[u8]) -> FileEntry {
    FileEntry {
        path: path.display().to_string(),
        sha256: sha256_hex(bytes),
        bytes: bytes.len() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_files_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::create(dir.path()).unwrap();
        out.write("b.csv", b"x\n1\n").unwrap();
        out.write("a.csv", b"y\n").unwrap();
        let m = out.finish("flux", "", &[], Vec::new(), BTreeMap::new()).unwrap();
        let names: Vec<_> = m.files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(names, ["a.csv", "b.csv"]);
        assert_eq!(m.files[1].bytes, 4);
        let text = fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap();
        let back: Manifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
