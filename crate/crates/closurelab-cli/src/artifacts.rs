//! Artifact output: deterministic JSON/CSV payloads written atomically via
//! temp-and-rename, with timestamps and runtimes segregated into a `.meta.json`
//! sidecar so payload files are byte-comparable across reruns.

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub struct ArtifactWriter {
    dir: PathBuf,
    started: Instant,
    written: Vec<String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            written: Vec::new(),
        })
    }

    fn write_atomic(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = tempfile::NamedTempFile::new_in(&self.dir).context("creating temp file")?;
        std::fs::write(tmp.path(), bytes).with_context(|| format!("writing artifact {name}"))?;
        tmp.persist(&path)
            .with_context(|| format!("renaming into place: {name}"))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    /// Deterministic JSON payload (no timestamps).
    pub fn json(&mut self, name: &str, value: &Value) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_atomic(name, text.as_bytes())
    }

    pub fn text(&mut self, name: &str, content: &str) -> Result<PathBuf> {
        self.write_atomic(name, content.as_bytes())
    }

    /// Sidecar with wall-clock data, excluded from byte comparison.
    pub fn finish_meta(&mut self, name: &str, extra: Value) -> Result<PathBuf> {
        let unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        let meta = json!({
            "created_unix_ms": unix_ms as u64,
            "runtime_ms": self.started.elapsed().as_millis() as u64,
            "artifacts": self.written,
            "extra": extra,
        });
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        let path = self.dir.join(name);
        let tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        std::fs::write(tmp.path(), text.as_bytes())?;
        tmp.persist(&path)?;
        Ok(path)
    }
}

/// Stable hash of a config value: sha256 over its canonical (sorted-key)
/// JSON encoding.
pub fn config_hash(value: &Value) -> String {
    fn canonical(v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                out.push('{');
                let mut keys: Vec<&String> = map.keys().collect();
                keys.sort();
                for (i, k) in keys.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&serde_json::to_string(k).expect("string key"));
                    out.push(':');
                    canonical(&map[*k], out);
                }
                out.push('}');
            }
            Value::Array(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    canonical(item, out);
                }
                out.push(']');
            }
            other => out.push_str(&other.to_string()),
        }
    }
    let mut text = String::new();
    canonical(value, &mut text);
    hex::encode(Sha256::digest(text.as_bytes()))
}
