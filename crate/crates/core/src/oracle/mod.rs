//! Ground truth by enumeration: determinant valuations over `Z/p^k` and
//! brute-force lattice sums.

mod cache;
mod histogram;
mod lattice_sum;

use std::path::Path;

use serde::Serialize;

pub use cache::{cache_path, cached_histogram, to_json_bytes, HistogramFile, CACHE_ENV, SCHEMA_VERSION};
pub use histogram::{
    det_valuation_histogram, det_valuation_histogram_shards, is_prime, HistMode, ValHistogram, DEFAULT_BUDGET,
};
pub use lattice_sum::{infinite_sum, truncated_lattice_sum, SumMode, SumResult};

use crate::distributions::igusa_det_product;
use crate::error::{Error, Result};
use crate::scalar::{Ctx, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCheckEntry {
    pub j: u32,
    /// `N_j / total`.
    pub enumerated: String,
    /// Coefficient of `t^j` in the product formula.
    pub symbolic: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCheckReport {
    pub n: usize,
    pub p: u64,
    pub k: u32,
    pub entries: Vec<SeriesCheckEntry>,
    pub pass: bool,
}

/// Compare `N_j / p^{n²k}` with the `t^j` coefficient of
/// `Π_{i=1}^n (1 - p^{-i}) / (1 - p^{-i}·t)` for every `j < k`.
pub fn det_zeta_series_check(
    n: usize,
    p: u64,
    k: u32,
    cache_dir: Option<&Path>,
    budget: u64,
) -> Result<SeriesCheckReport> {
    let h = cached_histogram(cache_dir, n, p, k, HistMode::Exhaustive, budget)?;
    series_check_from_histogram(&h)
}

pub fn series_check_from_histogram(h: &ValHistogram) -> Result<SeriesCheckReport> {
    if h.mode != HistMode::Exhaustive {
        return Err(Error::Precondition("exact comparison needs an exhaustive histogram".into()));
    }
    let ctx = Ctx::new(h.p, 1)?;
    let coeffs = igusa_det_product(&ctx, h.n as u32)?.series_coeffs(h.k as usize)?;
    let entries: Vec<_> = (0..h.k)
        .map(|j| {
            let enumerated = Rational::new(h.counts[j as usize].into(), h.total.into());
            let symbolic = coeffs[j as usize].as_rational().expect("rational context").clone();
            SeriesCheckEntry {
                j,
                pass: enumerated == symbolic,
                enumerated: enumerated.to_string(),
                symbolic: symbolic.to_string(),
            }
        })
        .collect();
    Ok(SeriesCheckReport { n: h.n, p: h.p, k: h.k, pass: entries.iter().all(|e| e.pass), entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_formula_examples() {
        for (n, p, k, want) in
            [(1, 2, 3, vec!["1/2", "1/4", "1/8"]), (2, 2, 1, vec!["3/8"]), (2, 3, 2, vec!["16/27", "64/243"])]
        {
            let rep = det_zeta_series_check(n, p, k, None, DEFAULT_BUDGET).unwrap();
            assert!(rep.pass, "{rep:?}");
            let got: Vec<_> = rep.entries.iter().map(|e| e.symbolic.as_str()).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn tampered_histogram_fails() {
        let mut h = det_valuation_histogram(1, 2, 3, HistMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        h.counts[1] -= 1;
        h.n_geq_k += 1;
        let rep = series_check_from_histogram(&h).unwrap();
        assert!(!rep.pass);
        assert!(rep.entries[0].pass && !rep.entries[1].pass);
        assert_eq!(rep.entries[1].enumerated, "1/8");
    }

    #[test]
    fn sampled_histograms_are_refused() {
        let h = det_valuation_histogram(1, 2, 3, HistMode::Sampled { seed: 3, trials: 10 }, DEFAULT_BUDGET).unwrap();
        assert!(matches!(series_check_from_histogram(&h), Err(Error::Precondition(_))));
    }
}
