//! Class numbers and Frobenius charpolys persisted between runs.
//!
//! One JSON file per cache directory. A file with another schema version is
//! ignored and overwritten on the next save.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use x0star::classnum::ClassNumberCache;
use x0star::frobenius::FrobeniusCache;
use x0star::nfdata::OrbitId;

use crate::error::{CliError, Result};

pub const CACHE_SCHEMA: u32 = 1;
pub const CACHE_FILE: &str = "x0star-cache.json";

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct CacheFile {
    pub schema: u32,
    pub class_numbers: Vec<(i64, u64)>,
    pub frobenius: Vec<(Vec<OrbitId>, u64, Vec<String>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub class_numbers: usize,
    pub frobenius: usize,
}

pub fn path(dir: &Path) -> PathBuf {
    dir.join(CACHE_FILE)
}

/// Reads the file, if present and of the current schema.
pub fn read(dir: &Path) -> Result<Option<CacheFile>> {
    let p = path(dir);
    let text = match fs::read_to_string(&p) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    parse(&text).map_err(|source| CliError::Cache { path: p, source })
}

/// Decodes a cache file; `None` for another schema version.
pub fn parse(text: &str) -> std::result::Result<Option<CacheFile>, serde_json::Error> {
    let file: CacheFile = serde_json::from_str(text)?;
    Ok((file.schema == CACHE_SCHEMA).then_some(file))
}

/// Seeds the process-wide caches from `dir`.
pub fn load(dir: &Path) -> Result<CacheStats> {
    let Some(file) = read(dir)? else {
        return Ok(CacheStats { class_numbers: 0, frobenius: 0 });
    };
    let stats = CacheStats { class_numbers: file.class_numbers.len(), frobenius: file.frobenius.len() };
    ClassNumberCache::global().extend(file.class_numbers);
    FrobeniusCache::global().extend(file.frobenius);
    Ok(stats)
}

/// Writes the process-wide caches to `dir`. Called once, at the end of a run.
pub fn save(dir: &Path) -> Result<CacheStats> {
    let file = CacheFile {
        schema: CACHE_SCHEMA,
        class_numbers: ClassNumberCache::global().snapshot(),
        frobenius: FrobeniusCache::global().snapshot(),
    };
    let stats = CacheStats { class_numbers: file.class_numbers.len(), frobenius: file.frobenius.len() };
    fs::create_dir_all(dir)?;
    let p = path(dir);
    let tmp = p.with_extension("json.tmp");
    let text = serde_json::to_string(&file).map_err(|source| CliError::Cache { path: p.clone(), source })?;
    fs::write(&tmp, text)?;
    fs::rename(&tmp, &p)?;
    Ok(stats)
}

pub fn clear(dir: &Path) -> Result<bool> {
    ClassNumberCache::global().clear();
    FrobeniusCache::global().clear();
    match fs::remove_file(path(dir)) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stale_schema_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(path(dir.path()), r#"{"schema":0,"class_numbers":[[-4,1]],"frobenius":[]}"#).unwrap();
        assert!(read(dir.path()).unwrap().is_none());
        fs::write(path(dir.path()), "not json").unwrap();
        assert!(matches!(read(dir.path()), Err(CliError::Cache { .. })));
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        x0star::classnum::class_number(x0star::classnum::Discriminant::new(-23).unwrap());
        let saved = save(dir.path()).unwrap();
        assert!(saved.class_numbers >= 1);
        let file = read(dir.path()).unwrap().unwrap();
        assert!(file.class_numbers.contains(&(-23, 3)));
        assert!(clear(dir.path()).unwrap());
        assert!(!clear(dir.path()).unwrap());
    }
}
