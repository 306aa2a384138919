//! On-disk resolution cache keyed by the content of the algebra, the module
//! and the requested length.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use torfib::fdmodule::FdModule;
use torfib::resolution::{MinimalResolution, ResolutionSnapshot};
use torfib::Result;

pub const CACHE_ENV: &str = "TORFIB_CACHE_DIR";

#[derive(Debug, Clone, Default)]
pub struct ResolutionCache {
    dir: Option<PathBuf>,
}

impl ResolutionCache {
    pub fn disabled() -> Self {
        ResolutionCache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        ResolutionCache { dir: Some(dir.into()) }
    }

    /// Uses `TORFIB_CACHE_DIR` when it is set and nonempty.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Self::at(d),
            _ => Self::disabled(),
        }
    }

    pub fn dir(&self) -> Option<&PathBuf> {
        self.dir.as_ref()
    }

    pub fn key(module: &FdModule, length: usize) -> String {
        let a = module.algebra();
        let content = serde_json::json!({
            "format": 1,
            "p": a.field().modulus(),
            "algebra": a.mult_tables(),
            "module": module.actions(),
            "length": length,
        });
        let mut h = Sha256::new();
        h.update(content.to_string().as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// A stored resolution, if one exists and matches the module. Unreadable
    /// or inconsistent entries count as misses.
    pub fn load(&self, module: &FdModule, length: usize, limit: usize) -> Option<MinimalResolution> {
        let path = self.path(&Self::key(module, length))?;
        let text = fs::read_to_string(path).ok()?;
        let snap: ResolutionSnapshot = serde_json::from_str(&text).ok()?;
        let res = MinimalResolution::from_snapshot(module, limit, snap).ok()?;
        (res.length() == length || res.terminated()).then_some(res)
    }

    /// Writes through a temporary file in the cache directory and renames it
    /// into place. Failures are ignored.
    pub fn store(&self, res: &MinimalResolution, length: usize) {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(&Self::key(res.module(), length))) else {
            return;
        };
        let write = || -> std::io::Result<()> {
            fs::create_dir_all(dir)?;
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(serde_json::to_string(&res.snapshot())?.as_bytes())?;
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        };
        let _ = write();
    }

    pub fn resolve(&self, module: &FdModule, length: usize, limit: usize) -> Result<MinimalResolution> {
        if let Some(r) = self.load(module, length, limit) {
            return Ok(r);
        }
        let r = MinimalResolution::with_limit(module, length, limit)?;
        self.store(&r, length);
        Ok(r)
    }
}
