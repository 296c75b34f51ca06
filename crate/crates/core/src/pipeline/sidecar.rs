//! `key=value` metadata files written next to every artifact.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Ordered key/value metadata. Keys keep insertion order on disk.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sidecar {
    entries: Vec<(String, String)>,
}

impl Sidecar {
    pub fn new(stage: &str) -> Self {
        let mut s = Sidecar::default();
        s.set("stage", stage);
        s
    }

    /// Sets `key`, replacing an earlier value.
    pub fn set(&mut self, key: &str, value: impl Display) {
        let value = value.to_string();
        debug_assert!(!key.contains('=') && !key.contains('\n') && !value.contains('\n'));
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut s = Sidecar::default();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            s.set(k.trim(), v.trim());
        }
        Ok(s)
    }

    /// Path of the sidecar belonging to `artifact`.
    pub fn path_for(artifact: &Path) -> PathBuf {
        let mut name = artifact.as_os_str().to_owned();
        name.push(".meta");
        PathBuf::from(name)
    }

    pub fn write_for(&self, artifact: &Path) -> Result<()> {
        let path = Self::path_for(artifact);
        std::fs::write(&path, self.render()).map_err(|e| Error::io(&path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|reason| Error::Format {
            path: path.to_path_buf(),
            reason,
        })
    }
}
