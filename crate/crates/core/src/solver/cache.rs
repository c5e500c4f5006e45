//! Append-only JSONL store of decided instances.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::{Certificate, SearchMode, Verdict};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "TRASDIM_CACHE_DIR";

const FILE_NAME: &str = "certificates.jsonl";

pub struct ResultCache {
    path: PathBuf,
    entries: HashMap<(String, SearchMode), Certificate>,
}

impl ResultCache {
    /// Opens (creating if needed) the cache in `dir`. A damaged trailing line
    /// from an interrupted write is dropped and truncated away.
    pub fn open(dir: &Path) -> Result<ResultCache> {
        fs::create_dir_all(dir)?;
        let path = dir.join(FILE_NAME);
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            let mut good_len = 0u64;
            let mut lines = Vec::new();
            for line in reader.split(b'\n') {
                lines.push(line?);
            }
            let total = lines.len();
            for (k, line) in lines.into_iter().enumerate() {
                if line.iter().all(u8::is_ascii_whitespace) {
                    good_len += line.len() as u64 + 1;
                    continue;
                }
                match serde_json::from_slice::<Certificate>(&line) {
                    Ok(cert) => {
                        good_len += line.len() as u64 + 1;
                        entries.insert((cert.instance_hash.clone(), cert.mode), cert);
                    }
                    Err(e) if k + 1 == total => {
                        log::warn!("dropping damaged trailing cache line: {e}");
                        let f = OpenOptions::new().write(true).open(&path)?;
                        f.set_len(good_len)?;
                    }
                    Err(e) => {
                        return Err(Error::Cache(format!(
                            "{}: line {}: {e}",
                            path.display(),
                            k + 1
                        )))
                    }
                }
            }
        }
        Ok(ResultCache { path, entries })
    }

    /// Opens the cache named by [`CACHE_ENV`], if set.
    pub fn from_env() -> Result<Option<ResultCache>> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => ResultCache::open(Path::new(&dir)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn get(&self, hash: &str, mode: SearchMode) -> Option<&Certificate> {
        self.entries.get(&(hash.to_string(), mode))
    }

    pub fn put(&mut self, cert: &Certificate) -> Result<()> {
        if matches!(cert.verdict, Verdict::Unknown) {
            return Ok(());
        }
        let key = (cert.instance_hash.clone(), cert.mode);
        if self.entries.contains_key(&key) {
            return Ok(());
        }
        let mut line = serde_json::to_vec(cert)?;
        line.push(b'\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        f.write_all(&line)?;
        self.entries.insert(key, cert.clone());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{decide_cached, DecisionInstance, SolverConfig};
    use crate::spaces::{Window, WindowSpec};

    #[test]
    fn round_trip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let w = Window::from_spec(&WindowSpec::Zn { dims: 1, side: 4 }).unwrap();
        let inst = DecisionInstance::new(w, vec![3, 3], 1).unwrap();
        let cfg = SolverConfig::default();
        let first = {
            let mut cache = ResultCache::open(dir.path()).unwrap();
            let c = decide_cached(&inst, &cfg, Some(&mut cache)).unwrap();
            assert_eq!(cache.len(), 1);
            c
        };
        let path = dir.path().join(FILE_NAME);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"instance_hash\": \"abc").unwrap();
        drop(f);
        let mut cache = ResultCache::open(dir.path()).unwrap();
        assert_eq!(cache.len(), 1);
        assert_eq!(cache.get(&inst.hash(), cfg.mode), Some(&first));
        let again = decide_cached(&inst, &cfg, Some(&mut cache)).unwrap();
        assert_eq!(again, first);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }
}
