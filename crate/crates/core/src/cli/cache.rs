//! Disk cache for Bernoulli numbers, generalized Bernoulli numbers and Cohen's H values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{parse_rational, rational_to_string, CyclotomicNumber};
use crate::error::{Error, Result};
use crate::lvalues::{
    cohen_memo, gen_bernoulli_memo, global_bernoulli_cache, seed_cohen, seed_gen_bernoulli,
};

pub const CACHE_SCHEMA_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "PADIC_SIEGEL_CACHE_DIR";
const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Bernoulli,
    Genbernoulli,
    #[serde(rename = "cohenH")]
    CohenH,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub kind: EntryKind,
    pub key: String,
    pub value: String,
    pub checksum: String,
}

impl CacheEntry {
    pub fn new(kind: EntryKind, key: String, value: String) -> Self {
        let checksum = checksum(kind, &key, &value);
        Self {
            kind,
            key,
            value,
            checksum,
        }
    }

    pub fn is_valid(&self) -> bool {
        checksum(self.kind, &self.key, &self.value) == self.checksum
    }
}

fn checksum(kind: EntryKind, key: &str, value: &str) -> String {
    let tag = serde_json::to_string(&kind).expect("plain enum");
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update(b"|");
    h.update(key.as_bytes());
    h.update(b"|");
    h.update(value.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheManifest {
    pub version: u32,
    pub entries: Vec<CacheEntry>,
}

/// Cache directory from the flag, else the environment; `None` disables the disk cache.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

impl CacheManifest {
    /// Snapshot of every in-memory table, in a fixed order.
    pub fn capture() -> Self {
        let mut entries = Vec::new();
        for (k, b) in global_bernoulli_cache().snapshot().iter().enumerate() {
            entries.push(CacheEntry::new(EntryKind::Bernoulli, k.to_string(), rational_to_string(b)));
        }
        let mut gen = gen_bernoulli_memo();
        gen.sort_by_key(|(k, _)| *k);
        for ((k, p, t), v) in gen {
            entries.push(CacheEntry::new(EntryKind::Genbernoulli, format!("{k}:{p}:{t}"), v.encode()));
        }
        let mut h = cohen_memo();
        h.sort_by_key(|(k, _)| *k);
        for ((r, n), v) in h {
            entries.push(CacheEntry::new(EntryKind::CohenH, format!("{r}:{n}"), rational_to_string(&v)));
        }
        Self {
            version: CACHE_SCHEMA_VERSION,
            entries,
        }
    }

    /// Reads the manifest, dropping entries whose checksum or encoding is bad.
    pub fn load(dir: &Path) -> Result<Option<Self>> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        let mut manifest: CacheManifest = match serde_json::from_str(&text) {
            Ok(m) => m,
            Err(e) => {
                log::warn!("ignoring unreadable cache {}: {e}", path.display());
                return Ok(None);
            }
        };
        if manifest.version != CACHE_SCHEMA_VERSION {
            log::warn!("ignoring cache schema version {}", manifest.version);
            return Ok(None);
        }
        let before = manifest.entries.len();
        manifest.entries.retain(CacheEntry::is_valid);
        if manifest.entries.len() < before {
            log::warn!(
                "dropped {} corrupt cache entries from {}",
                before - manifest.entries.len(),
                path.display()
            );
        }
        Ok(Some(manifest))
    }

    /// Installs the entries into the in-memory tables.
    pub fn apply(&self) {
        let mut bern = Vec::new();
        for e in &self.entries {
            let ok = match e.kind {
                EntryKind::Bernoulli => match (e.key.parse::<usize>(), parse_rational(&e.value)) {
                    (Ok(k), Ok(v)) => {
                        bern.push((k, v));
                        true
                    }
                    _ => false,
                },
                EntryKind::Genbernoulli => parse_gen_key(&e.key)
                    .and_then(|(k, p, t)| {
                        let v = CyclotomicNumber::parse((p - 1) as u32, &e.value).ok()?;
                        seed_gen_bernoulli((k, p, t), v);
                        Some(())
                    })
                    .is_some(),
                EntryKind::CohenH => e
                    .key
                    .split_once(':')
                    .and_then(|(r, n)| Some((r.parse().ok()?, n.parse().ok()?)))
                    .zip(parse_rational(&e.value).ok())
                    .map(|(key, v)| seed_cohen(key, v))
                    .is_some(),
            };
            if !ok {
                log::warn!("skipping malformed cache entry {:?} {}", e.kind, e.key);
            }
        }
        // only a gap-free prefix B_0..B_{n-1} can seed the table
        bern.sort_by_key(|(k, _)| *k);
        let prefix: Vec<_> = bern
            .into_iter()
            .enumerate()
            .take_while(|(i, (k, _))| i == k)
            .map(|(_, (_, v))| v)
            .collect();
        if !prefix.is_empty() {
            global_bernoulli_cache().seed(prefix);
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        fs::write(&tmp, serde_json::to_vec(self)?)?;
        fs::rename(&tmp, dir.join(MANIFEST_FILE)).map_err(|e| Error::Io(e.to_string()))
    }
}

fn parse_gen_key(key: &str) -> Option<(usize, u64, u64)> {
    let mut it = key.split(':');
    let k = it.next()?.parse().ok()?;
    let p: u64 = it.next()?.parse().ok()?;
    let t = it.next()?.parse().ok()?;
    (it.next().is_none() && p >= 3).then_some((k, p, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_detect_tampering() {
        let e = CacheEntry::new(EntryKind::Bernoulli, "12".into(), "-691/2730".into());
        assert!(e.is_valid());
        let mut bad = e.clone();
        bad.value = "-691/2731".into();
        assert!(!bad.is_valid());
        assert_eq!(serde_json::to_string(&EntryKind::CohenH).unwrap(), "\"cohenH\"");
    }

    #[test]
    fn corrupt_entries_are_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let good = CacheEntry::new(EntryKind::CohenH, "3:4".into(), "-1/2".into());
        let mut bad = CacheEntry::new(EntryKind::CohenH, "3:3".into(), "-2/9".into());
        bad.value = "5".into();
        let m = CacheManifest {
            version: CACHE_SCHEMA_VERSION,
            entries: vec![good.clone(), bad],
        };
        m.save(dir.path()).unwrap();
        let back = CacheManifest::load(dir.path()).unwrap().unwrap();
        assert_eq!(back.entries, vec![good]);
        fs::write(dir.path().join(MANIFEST_FILE), "{not json").unwrap();
        assert!(CacheManifest::load(dir.path()).unwrap().is_none());
    }

    #[test]
    fn gen_keys() {
        assert_eq!(parse_gen_key("15:5:1"), Some((15, 5, 1)));
        assert_eq!(parse_gen_key("15:5"), None);
        assert_eq!(parse_gen_key("15:1:0"), None);
    }
}
