//! Content-addressed result cache.
//!
//! An entry is `<root>/<key>.json` holding the payload, its metadata
//! (verification flags and renderings) and the SHA-256 of both. Writes go
//! through a temporary file and a rename. Entries whose digest or key does not
//! match are deleted and reported as corrupt.

use std::fs;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "KOSZUL_CACHE_DIR";
pub const DEFAULT_ROOT: &str = ".koszul-cache";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest(payload: &Value, meta: &Value) -> io::Result<String> {
    Ok(sha256_hex(serde_json::to_string(&(payload, meta))?.as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    sha256: String,
    meta: Value,
    payload: Value,
}

#[derive(Debug, PartialEq)]
pub enum Lookup {
    Hit {
        payload: Value,
        meta: Value,
    },
    Miss,
    /// The entry existed but failed validation and has been removed.
    Evicted(String),
}

pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// Root from [`CACHE_ENV`], else [`DEFAULT_ROOT`] in the working directory.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_ROOT), PathBuf::from))
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.root.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> io::Result<Lookup> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Lookup::Miss),
            Err(e) => return Err(e),
        };
        let reason = match serde_json::from_str::<Entry>(&text) {
            Err(e) => format!("unreadable entry: {e}"),
            Ok(entry) if entry.key != key => format!("entry is stored under the wrong key {}", entry.key),
            Ok(entry) => {
                let digest = digest(&entry.payload, &entry.meta)?;
                if digest == entry.sha256 {
                    return Ok(Lookup::Hit {
                        payload: entry.payload,
                        meta: entry.meta,
                    });
                }
                format!("digest {digest} does not match {}", entry.sha256)
            }
        };
        self.evict(key)?;
        Ok(Lookup::Evicted(reason))
    }

    pub fn put(&self, key: &str, payload: &Value, meta: &Value) -> io::Result<()> {
        fs::create_dir_all(&self.root)?;
        let entry = Entry {
            key: key.to_string(),
            sha256: digest(payload, meta)?,
            meta: meta.clone(),
            payload: payload.clone(),
        };
        let tmp = self.root.join(format!(".{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, self.path(key))
    }

    pub fn evict(&self, key: &str) -> io::Result<()> {
        match fs::remove_file(self.path(key)) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => Err(e),
            _ => Ok(()),
        }
    }
}

/// Whether a hit is re-verified under `--audit`: one key in ten, chosen by
/// the key digest so the choice is reproducible.
pub fn audited(key: &str) -> bool {
    u8::from_str_radix(&key[..2], 16).map_or(true, |b| b % 10 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_eviction() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = sha256_hex(b"job");
        assert_eq!(cache.get(&key).unwrap(), Lookup::Miss);
        cache.put(&key, &json!({"a": [1, 2]}), &json!({"ok": true})).unwrap();
        assert_eq!(
            cache.get(&key).unwrap(),
            Lookup::Hit {
                payload: json!({"a": [1, 2]}),
                meta: json!({"ok": true})
            }
        );
        let text = fs::read_to_string(cache.path(&key)).unwrap().replace("[1,2]", "[1,3]");
        fs::write(cache.path(&key), text).unwrap();
        assert!(matches!(cache.get(&key).unwrap(), Lookup::Evicted(_)));
        assert!(!cache.path(&key).exists());
        fs::write(cache.path(&key), "not json").unwrap();
        assert!(matches!(cache.get(&key).unwrap(), Lookup::Evicted(_)));
    }

    #[test]
    fn audit_sampling_is_about_one_in_ten() {
        let n = (0..1000)
            .filter(|i| audited(&sha256_hex(format!("{i}").as_bytes())))
            .count();
        assert!((60..=140).contains(&n), "{n}");
    }
}
