use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `p^{n²k}` for exhaustive enumeration.
pub const DEFAULT_BUDGET: u64 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HistMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

impl HistMode {
    pub fn tag(&self) -> String {
        match self {
            HistMode::Exhaustive => "exhaustive".into(),
            HistMode::Sampled { seed, trials } => format!("sampled-s{seed}-t{trials}"),
        }
    }
}

/// Counts of `n×n` matrices over `Z/p^k` by `val_p(det)`.
///
/// `counts[j]` counts valuation exactly `j < k`; `n_geq_k` counts `det ≡ 0 mod p^k`.
/// In exhaustive mode `total = p^{n²k}`; in sampled mode it is the number of draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValHistogram {
    pub n: usize,
    pub p: u64,
    pub k: u32,
    pub mode: HistMode,
    pub counts: Vec<u64>,
    pub n_geq_k: u64,
    pub total: u64,
}

impl ValHistogram {
    fn empty(n: usize, p: u64, k: u32, mode: HistMode) -> Self {
        ValHistogram { n, p, k, mode, counts: vec![0; k as usize], n_geq_k: 0, total: 0 }
    }

    fn record(&mut self, v: Option<u32>) {
        match v {
            Some(j) => self.counts[j as usize] += 1,
            None => self.n_geq_k += 1,
        }
        self.total += 1;
    }

    /// Associative, commutative merge of shard histograms.
    pub fn merge(mut self, other: &ValHistogram) -> ValHistogram {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_geq_k += other.n_geq_k;
        self.total += other.total;
        self
    }

    /// `Σ_j N_j + n_geq_k = total`.
    pub fn is_consistent(&self) -> bool {
        self.counts.iter().sum::<u64>() + self.n_geq_k == self.total
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub(crate) fn det_i128(mut a: Vec<i128>, n: usize) -> i128 {
    match n {
        0 => return 1,
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        3 => {
            return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {}
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for col in 0..n - 1 {
        if a[col * n + col] == 0 {
            let Some(row) = (col + 1..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            for j in 0..n {
                a.swap(col * n + j, row * n + j);
            }
            sign = -sign;
        }
        let pivot = a[col * n + col];
        for i in col + 1..n {
            for j in col + 1..n {
                a[i * n + j] = (a[i * n + j] * pivot - a[i * n + col] * a[col * n + j]) / prev;
            }
        }
        prev = pivot;
    }
    sign * a[n * n - 1]
}

/// `val_p(det)` when it is below `k`, `None` when `det ≡ 0 mod p^k`.
fn det_valuation(entries: &[u64], n: usize, p: u64, k: u32) -> Option<u32> {
    let det = det_i128(entries.iter().map(|&x| x as i128).collect(), n);
    let modulus = (p as i128).pow(k);
    let mut r = det.rem_euclid(modulus);
    if r == 0 {
        return None;
    }
    let mut v = 0;
    while r % p as i128 == 0 {
        r /= p as i128;
        v += 1;
    }
    Some(v)
}

/// Enumerate one shard: the leading `prefix.len()` entries are fixed, the
/// rest run through an odometer in row-major order.
fn enumerate_shard(n: usize, p: u64, k: u32, modulus: u64, prefix: &[u64]) -> ValHistogram {
    let mut h = ValHistogram::empty(n, p, k, HistMode::Exhaustive);
    let mut entries = vec![0u64; n * n];
    entries[..prefix.len()].copy_from_slice(prefix);
    let free = prefix.len();
    loop {
        h.record(det_valuation(&entries, n, p, k));
        // odometer over entries[free..], last entry fastest
        let mut i = n * n;
        loop {
            if i == free {
                return h;
            }
            i -= 1;
            entries[i] += 1;
            if entries[i] < modulus {
                break;
            }
            entries[i] = 0;
        }
    }
}

pub fn det_valuation_histogram(n: usize, p: u64, k: u32, mode: HistMode, budget: u64) -> Result<ValHistogram> {
    if n == 0 || k == 0 {
        return Err(Error::Precondition("matrix size and level must be positive".into()));
    }
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let modulus = checked_pow(p, k as u64).ok_or_else(|| Error::Resource("p^k overflows".into()))?;
    if modulus > (1 << 40) {
        return Err(Error::Resource("p^k too large for exact determinants".into()));
    }
    match mode {
        HistMode::Exhaustive => {
            let cells = (n * n) as u64;
            let total = checked_pow(modulus, cells).filter(|&t| t <= budget).ok_or_else(|| {
                Error::Resource(format!(
                    "exhaustive enumeration of {p}^{} matrices exceeds the budget of {budget}; use sampled mode",
                    cells * k as u64
                ))
            })?;
            // Fix enough leading entries to get a few hundred shards.
            let mut lead = 0usize;
            let mut shards = 1u64;
            while lead < n * n && shards < 256 && total / shards > 1 {
                lead += 1;
                shards *= modulus;
            }
            let prefixes: Vec<Vec<u64>> = (0..shards)
                .map(|mut s| {
                    let mut pre = vec![0u64; lead];
                    for slot in pre.iter_mut().rev() {
                        *slot = s % modulus;
                        s /= modulus;
                    }
                    pre
                })
                .collect();
            let merged = prefixes
                .par_iter()
                .map(|pre| enumerate_shard(n, p, k, modulus, pre))
                .reduce(|| ValHistogram::empty(n, p, k, HistMode::Exhaustive), |a, b| a.merge(&b));
            debug_assert_eq!(merged.total, total);
            Ok(merged)
        }
        HistMode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut h = ValHistogram::empty(n, p, k, mode);
            let mut entries = vec![0u64; n * n];
            for _ in 0..trials {
                entries.iter_mut().for_each(|e| *e = rng.gen_range(0..modulus));
                h.record(det_valuation(&entries, n, p, k));
            }
            Ok(h)
        }
    }
}

/// Sharded enumeration with an explicit shard order, for determinism checks.
pub fn det_valuation_histogram_shards(n: usize, p: u64, k: u32, lead: usize, order: &[usize]) -> ValHistogram {
    let modulus = p.pow(k);
    let shards = modulus.pow(lead as u32) as usize;
    let prefix = |mut s: usize| {
        let mut pre = vec![0u64; lead];
        for slot in pre.iter_mut().rev() {
            *slot = s as u64 % modulus;
            s /= modulus as usize;
        }
        pre
    };
    order
        .iter()
        .filter(|&&s| s < shards)
        .map(|&s| enumerate_shard(n, p, k, modulus, &prefix(s)))
        .fold(ValHistogram::empty(n, p, k, HistMode::Exhaustive), |a, b| a.merge(&b))
}
