use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::histogram::{det_valuation_histogram, HistMode, ValHistogram};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "IGUSA_CACHE_DIR";

/// On-disk form of a histogram; integer counts are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramFile {
    pub schema_version: u32,
    pub n: usize,
    pub p: u64,
    pub k: u32,
    pub mode: HistMode,
    pub counts: Vec<String>,
    pub n_geq_k: String,
    pub total: String,
}

impl From<&ValHistogram> for HistogramFile {
    fn from(h: &ValHistogram) -> Self {
        HistogramFile {
            schema_version: SCHEMA_VERSION,
            n: h.n,
            p: h.p,
            k: h.k,
            mode: h.mode,
            counts: h.counts.iter().map(u64::to_string).collect(),
            n_geq_k: h.n_geq_k.to_string(),
            total: h.total.to_string(),
        }
    }
}

impl HistogramFile {
    pub fn to_histogram(&self) -> Option<ValHistogram> {
        if self.schema_version != SCHEMA_VERSION || self.counts.len() != self.k as usize {
            return None;
        }
        let h = ValHistogram {
            n: self.n,
            p: self.p,
            k: self.k,
            mode: self.mode,
            counts: self.counts.iter().map(|c| c.parse().ok()).collect::<Option<Vec<u64>>>()?,
            n_geq_k: self.n_geq_k.parse().ok()?,
            total: self.total.parse().ok()?,
        };
        h.is_consistent().then_some(h)
    }
}

pub fn to_json_bytes(h: &ValHistogram) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(&HistogramFile::from(h)).expect("histogram serializes");
    v.push(b'\n');
    v
}

pub fn cache_path(dir: &Path, n: usize, p: u64, k: u32, mode: HistMode) -> PathBuf {
    dir.join(format!("dethist-v{SCHEMA_VERSION}-n{n}-p{p}-k{k}-{}.json", mode.tag()))
}

/// Look up `(n, p, k, mode)` in `dir`, computing and storing on a miss or on
/// a schema mismatch.
pub fn cached_histogram(
    dir: Option<&Path>,
    n: usize,
    p: u64,
    k: u32,
    mode: HistMode,
    budget: u64,
) -> Result<ValHistogram> {
    let Some(dir) = dir else {
        return det_valuation_histogram(n, p, k, mode, budget);
    };
    let path = cache_path(dir, n, p, k, mode);
    if let Ok(bytes) = fs::read(&path) {
        if let Ok(file) = serde_json::from_slice::<HistogramFile>(&bytes) {
            if let Some(h) = file.to_histogram() {
                if h.n == n && h.p == p && h.k == k && h.mode == mode {
                    return Ok(h);
                }
            }
        }
    }
    let h = det_valuation_histogram(n, p, k, mode, budget)?;
    fs::create_dir_all(dir)?;
    fs::write(&path, to_json_bytes(&h))?;
    Ok(h)
}
