//! On-disk cache of classification results.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fqlat_core::classify::candidate_classes;
use fqlat_core::CandidateClass;

/// Bumped whenever the serialized form of a class changes.
pub const SCHEMA: u32 = 1;

const CLASSES: &str = "classes.json";

#[derive(Debug)]
pub enum CacheError {
    Io(String),
    Corrupt(PathBuf),
}

#[derive(Serialize, Deserialize)]
struct Stamped<T> {
    schema: u32,
    data: T,
}

pub struct Cache {
    dir: Option<PathBuf>,
    rebuild: bool,
}

pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

impl Cache {
    pub fn new(dir: Option<PathBuf>, rebuild: bool) -> Self {
        Cache { dir, rebuild }
    }

    pub fn classes(&self) -> Result<Vec<CandidateClass>, CacheError> {
        let Some(dir) = &self.dir else {
            return candidate_classes().map_err(|e| CacheError::Io(e.to_string()));
        };
        let path = dir.join(CLASSES);
        if !self.rebuild && path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| CacheError::Io(e.to_string()))?;
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|_| CacheError::Corrupt(path.clone()))?;
            // an older schema is stale rather than corrupt
            if v.get("schema").and_then(|s| s.as_u64()) == Some(SCHEMA as u64) {
                let s: Stamped<Vec<CandidateClass>> = serde_json::from_value(v).map_err(|_| CacheError::Corrupt(path.clone()))?;
                return Ok(s.data);
            } else if v.get("schema").is_none() {
                return Err(CacheError::Corrupt(path));
            }
        }
        let classes = candidate_classes().map_err(|e| CacheError::Io(e.to_string()))?;
        let text = serde_json::to_string(&Stamped { schema: SCHEMA, data: &classes }).expect("json");
        write_atomic(&path, &text).map_err(|e| CacheError::Io(e.to_string()))?;
        Ok(classes)
    }
}
