//! Remote fetch of eigenvalue records with an on-disk cache.
//!
//! The endpoint serves the same JSON-lines fixture format that
//! `load_newform` reads, at `{base_url}/{label}.jsonl`.  Fetched
//! bytes are validated before being cached; cache hits never touch
//! the network, and the cached file is byte-for-byte the server
//! response.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::{parse_newform, HmfError, NewformRecord};

#[derive(Debug, Clone)]
pub struct FetchConfig {
    /// Endpoint prefix, e.g. `http://host:port/hmf`.
    pub base_url: String,
    pub cache_dir: PathBuf,
    /// Total request attempts before giving up.
    pub retries: u32,
    /// Base of the exponential backoff between attempts.
    pub backoff_ms: u64,
}

impl FetchConfig {
    pub fn new(base_url: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        FetchConfig {
            base_url: base_url.into(),
            cache_dir: cache_dir.into(),
            retries: 3,
            backoff_ms: 250,
        }
    }
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_'))
}

/// Best-effort advisory lock file, removed on drop.
struct LockGuard {
    path: PathBuf,
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

fn acquire_lock(path: &Path) -> Option<LockGuard> {
    for _ in 0..100 {
        match std::fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(path)
        {
            Ok(_) => {
                return Some(LockGuard {
                    path: path.to_path_buf(),
                })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                std::thread::sleep(Duration::from_millis(50));
            }
            Err(_) => return None,
        }
    }
    // stale lock: proceed unguarded, the atomic rename keeps writes safe
    None
}

/// Fetch a record by label, caching the response under the cache
/// directory.  A cached label is loaded from disk without any network
/// traffic.
pub fn lmfdb_fetch(cfg: &FetchConfig, label: &str) -> Result<NewformRecord, HmfError> {
    if !valid_label(label) {
        return Err(HmfError::BadLabel(label.into()));
    }
    let cache_path = cfg.cache_dir.join(format!("{label}.jsonl"));
    if cache_path.exists() {
        return crate::load_newform(&cache_path);
    }
    std::fs::create_dir_all(&cfg.cache_dir)?;
    let _lock = acquire_lock(&cfg.cache_dir.join(format!("{label}.lock")));
    if cache_path.exists() {
        return crate::load_newform(&cache_path);
    }

    let url = format!("{}/{label}.jsonl", cfg.base_url.trim_end_matches('/'));
    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(60))
        .build();
    let attempts = cfg.retries.max(1);
    let mut body: Option<Vec<u8>> = None;
    let mut last_err = String::new();
    for attempt in 0..attempts {
        match agent.get(&url).call() {
            Ok(resp) => {
                let mut buf = Vec::new();
                resp.into_reader()
                    .take(1 << 26)
                    .read_to_end(&mut buf)
                    .map_err(|e| HmfError::Network(format!("reading body: {e}")))?;
                body = Some(buf);
                break;
            }
            Err(ureq::Error::Status(404, _)) => {
                return Err(HmfError::LabelNotFound(label.into()));
            }
            Err(ureq::Error::Status(code, _)) => {
                last_err = format!("status {code} from {url}");
                if code < 500 {
                    return Err(HmfError::Network(last_err));
                }
            }
            Err(ureq::Error::Transport(t)) => {
                last_err = format!("transport error from {url}: {t}");
            }
        }
        if attempt + 1 < attempts {
            std::thread::sleep(Duration::from_millis(cfg.backoff_ms << attempt));
        }
    }
    let body = body.ok_or(HmfError::Network(last_err))?;

    let record = parse_newform(std::io::BufReader::new(body.as_slice()), label)?;

    let tmp = cfg
        .cache_dir
        .join(format!(".{label}.tmp.{}", std::process::id()));
    std::fs::write(&tmp, &body)?;
    std::fs::rename(&tmp, &cache_path)?;
    Ok(record)
}
