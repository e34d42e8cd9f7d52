//! JSON-lines scan cache: one `ScanRecord` per line, appended a whole line at a time.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// One conductor's character-sum maximum. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub conductor: u64,
    pub family: String,
    pub max_abs: u64,
    pub argmax: u64,
    pub ratio_log: f64,
    pub ratio_loglog: Option<f64>,
    pub timestamp: u64,
}

impl ScanRecord {
    pub fn key(&self) -> (u64, String) {
        (self.conductor, self.family.clone())
    }
}

pub const CACHE_ENV: &str = "CHARSCAN_CACHE";
pub const DEFAULT_CACHE: &str = "charscan-cache.jsonl";

pub fn cache_path(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from(DEFAULT_CACHE),
    }
}

/// Exclusive hold on a cache file, released on drop.
#[derive(Debug)]
pub struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    pub fn acquire(cache: &Path) -> std::io::Result<Self> {
        let mut name = cache.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        let mut f = OpenOptions::new().write(true).create_new(true).open(&path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::AlreadyExists {
                std::io::Error::new(
                    e.kind(),
                    format!("cache is locked by another run ({} exists)", path.display()),
                )
            } else {
                e
            }
        })?;
        writeln!(f, "{}", std::process::id())?;
        Ok(CacheLock { path })
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Reads every whole record; an unparsable line (a torn final write) is skipped.
pub fn read_records(path: &Path) -> std::io::Result<Vec<ScanRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(r) => out.push(r),
            Err(e) => eprintln!("warning: skipping cache line {} of {}: {e}", i + 1, path.display()),
        }
    }
    Ok(out)
}

pub fn keys(records: &[ScanRecord]) -> HashSet<(u64, String)> {
    records.iter().map(ScanRecord::key).collect()
}

/// Appends each record as one `write_all` of a complete line.
pub fn append_records(path: &Path, records: &[ScanRecord]) -> std::io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    for r in records {
        let mut line = serde_json::to_string(r).map_err(std::io::Error::other)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
    }
    file.flush()
}

/// Rewrites the cache with `records`, via a sibling temp file and rename.
pub fn rewrite_records(path: &Path, records: &[ScanRecord]) -> std::io::Result<()> {
    let mut name = path.as_os_str().to_owned();
    name.push(".tmp");
    let tmp = PathBuf::from(name);
    {
        let mut file = File::create(&tmp)?;
        for r in records {
            let line = serde_json::to_string(r).map_err(std::io::Error::other)?;
            writeln!(file, "{line}")?;
        }
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}
