//! JSON-lines cache of search results.
//!
//! Each line is one [`CacheRecord`]. On load, records from another engine
//! version are dropped (so they get recomputed) and every certificate is
//! checked again; a record that fails the check is discarded.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rado_core::search::verify_certificate;
use rado_core::{Coloring, ColorSystem, RadoResult, ENGINE_VERSION};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable naming the cache file.
pub const CACHE_ENV: &str = "RADO_CACHE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    /// Canonical system text, e.g. `x1 + x2 = x3 | 3*x1 = x2`.
    pub system: String,
    pub n_max: u32,
    /// The Rado number, or `">N"` when every `n <= N` is colorable.
    pub result: String,
    /// Run-length certificate (or witness for unresolved results).
    pub certificate: String,
    pub engine_version: String,
    pub seconds: f64,
    /// Unix seconds.
    pub timestamp: u64,
}

impl CacheRecord {
    pub fn new(sys: &ColorSystem, n_max: u32, res: &RadoResult, seconds: f64) -> Self {
        let (result, cert) = match res {
            RadoResult::Found { value, certificate } => (value.to_string(), certificate),
            RadoResult::Unresolved { searched_up_to, witness } => (format!(">{searched_up_to}"), witness),
        };
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            system: sys.to_string(),
            n_max,
            result,
            certificate: cert.to_runs(),
            engine_version: ENGINE_VERSION.to_string(),
            seconds,
            timestamp,
        }
    }

    /// Rebuilds the result, checking the certificate against the system.
    pub fn to_result(&self) -> Result<(ColorSystem, RadoResult)> {
        let sys = ColorSystem::parse(&self.system, None)?;
        let cert = Coloring::parse_runs(&self.certificate, sys.num_colors())?;
        let bad = |why: &str| CliError::Input(format!("cache record for {}: {why}", self.system));
        if !verify_certificate(&sys, &cert)? {
            return Err(bad("certificate has a monochromatic solution"));
        }
        let res = match self.result.strip_prefix('>') {
            Some(n) => {
                let n: u32 = n.parse().map_err(|_| bad("bad result"))?;
                if cert.len() != n as usize {
                    return Err(bad("witness length"));
                }
                RadoResult::Unresolved { searched_up_to: n, witness: cert }
            }
            None => {
                let v: u32 = self.result.parse().map_err(|_| bad("bad result"))?;
                if v == 0 || cert.len() != v as usize - 1 {
                    return Err(bad("certificate length"));
                }
                RadoResult::Found { value: v, certificate: cert }
            }
        };
        Ok((sys, res))
    }
}

/// Result lookup for one run. Found values answer any query whose `n_max`
/// reaches them; unresolved records only answer the same `n_max`.
#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: HashMap<String, Vec<(CacheRecord, RadoResult)>>,
    pub stale: usize,
    pub rejected: usize,
}

impl Cache {
    pub fn disabled() -> Self {
        Self::default()
    }

    /// Opens the file named by `path`, or by `RADO_CACHE` when `path` is
    /// `None`; with neither, the cache is disabled.
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let path = match path {
            Some(p) => p.to_path_buf(),
            None => match std::env::var_os(CACHE_ENV) {
                Some(p) if !p.is_empty() => PathBuf::from(p),
                _ => return Ok(Self::disabled()),
            },
        };
        let mut cache = Self { path: Some(path.clone()), ..Self::default() };
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(CliError::io(format!("opening {}", path.display()), e)),
        };
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| CliError::io("reading cache", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let Ok(rec) = serde_json::from_str::<CacheRecord>(&line) else {
                cache.rejected += 1;
                continue;
            };
            if rec.engine_version != ENGINE_VERSION {
                cache.stale += 1;
                continue;
            }
            match rec.to_result() {
                Ok((sys, res)) => cache.entries.entry(sys.to_string()).or_default().push((rec, res)),
                Err(_) => cache.rejected += 1,
            }
        }
        Ok(cache)
    }

    pub fn is_enabled(&self) -> bool {
        self.path.is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, sys: &ColorSystem, n_max: u32) -> Option<(&CacheRecord, &RadoResult)> {
        self.entries.get(&sys.to_string())?.iter().map(|(r, res)| (r, res)).find(|(rec, res)| match res {
            RadoResult::Found { value, .. } => *value <= n_max,
            RadoResult::Unresolved { .. } => rec.n_max == n_max,
        })
    }

    /// Appends records to the file and the in-memory index.
    pub fn store(&mut self, records: &[CacheRecord]) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        if records.is_empty() {
            return Ok(());
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
        for rec in records {
            let line = serde_json::to_string(rec)?;
            writeln!(file, "{line}").map_err(|e| CliError::io("writing cache", e))?;
            let (sys, res) = rec.to_result()?;
            self.entries.entry(sys.to_string()).or_default().push((rec.clone(), res));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rado_core::search::rado_number;
    use rado_core::SearchConfig;

    fn schur() -> ColorSystem {
        ColorSystem::uniform("x+y=z".parse().unwrap(), 2).unwrap()
    }

    #[test]
    fn round_trip_and_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let res = rado_number(&schur(), 20, &SearchConfig::default()).unwrap();
        let mut cache = Cache::open(Some(&path)).unwrap();
        cache.store(&[CacheRecord::new(&schur(), 20, &res, 0.5)]).unwrap();

        let cache = Cache::open(Some(&path)).unwrap();
        assert_eq!(cache.len(), 1);
        assert_eq!(cache.lookup(&schur(), 10).map(|(_, r)| r), Some(&res));
        assert!(cache.lookup(&schur(), 4).is_none());
    }

    #[test]
    fn stale_and_forged_records_are_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let res = rado_number(&schur(), 20, &SearchConfig::default()).unwrap();
        let mut old = CacheRecord::new(&schur(), 20, &res, 0.1);
        old.engine_version = "rado-core 0.0.0".into();
        let mut forged = CacheRecord::new(&schur(), 20, &res, 0.1);
        forged.certificate = "1-4:r".into();
        let lines = [serde_json::to_string(&old).unwrap(), serde_json::to_string(&forged).unwrap(), "{".into()];
        std::fs::write(&path, lines.join("\n")).unwrap();
        let cache = Cache::open(Some(&path)).unwrap();
        assert!(cache.is_empty());
        assert_eq!((cache.stale, cache.rejected), (1, 2));
    }
}
