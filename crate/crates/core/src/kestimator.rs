//! Number-of-clusters estimation from the normalized-Laplacian spectrum.
//!
//! The spectrum is scanned for the point where it starts to flatten: each
//! consecutive gap is normalized by the mean of the `w` preceding eigenvalues,
//! and the last index in the first half of the spectrum whose normalized gap
//! exceeds an adaptive threshold marks the cluster count. Large inputs are
//! handled by averaging estimates over random subsets of at most `tau` points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EmbeddingSet;
use crate::error::{Error, Result};
use crate::seed;
use crate::spectral::{compute_eigenvalues, Spectrum};

/// Estimator settings. Defaults: `tau = 1000`, `w = 3`, `k_default = 5`,
/// `epsilon = 1e-12`, no z-scoring, seed 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Maximum subset size; inputs larger than this are subsampled.
    pub tau: usize,
    /// Moving-average window.
    pub w: usize,
    /// Returned when no spectral jump clears the threshold.
    pub k_default: usize,
    pub epsilon: f64,
    pub use_zscore: bool,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { tau: 1000, w: 3, k_default: 5, epsilon: 1e-12, use_zscore: false, seed: 0 }
    }
}

impl EstimatorConfig {
    /// Smallest spectrum length the scan accepts for window `w`.
    pub fn min_points(&self) -> usize {
        2 * self.w + 4
    }

    pub fn validate(&self) -> Result<()> {
        if self.w < 1 {
            return Err(Error::InvalidConfig("w must be at least 1".into()));
        }
        if self.k_default < 1 {
            return Err(Error::InvalidConfig("k_default must be at least 1".into()));
        }
        if self.tau < self.min_points() {
            return Err(Error::InvalidConfig(format!(
                "tau = {} is below 2w + 4 = {}",
                self.tau,
                self.min_points()
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Normalized spectral differences
/// `delta_i = |lambda_i - lambda_{i-1}| / (mean(lambda_{i-w} .. lambda_{i-1}) + epsilon)`
/// for 1-based `i = w+1 ..= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSeries {
    w: usize,
    epsilon: f64,
    deltas: Vec<f64>,
}

impl DeltaSeries {
    pub fn window(&self) -> usize {
        self.w
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// First defined index (1-based).
    pub fn first_index(&self) -> usize {
        self.w + 1
    }

    /// Last defined index, equal to the spectrum length.
    pub fn last_index(&self) -> usize {
        self.w + self.deltas.len()
    }

    /// `delta_i` for 1-based `i`, or `None` outside `w+1 ..= n`.
    pub fn get(&self, i: usize) -> Option<f64> {
        if i < self.first_index() {
            return None;
        }
        self.deltas.get(i - self.first_index()).copied()
    }

    /// `(i, delta_i)` pairs in increasing `i`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.deltas.iter().enumerate().map(move |(t, &d)| (t + self.w + 1, d))
    }
}

/// Eigenvalue gaps at or below this are round-off from the eigensolver and
/// count as zero.
pub const GAP_FLOOR: f64 = 1e-10;

pub fn spectral_deltas(sp: &Spectrum, w: usize, epsilon: f64) -> Result<DeltaSeries> {
    let n = sp.len();
    if w < 1 || n < w + 2 {
        return Err(Error::SpectrumTooShort { len: n, window: w });
    }
    let lam = sp.values();
    let deltas = (w + 1..=n)
        .map(|i| {
            // 0-based: gap between lam[i-1] and lam[i-2]; window lam[i-1-w .. i-1].
            let gap = (lam[i - 1] - lam[i - 2]).abs();
            let gap = if gap <= GAP_FLOOR { 0.0 } else { gap };
            let window = &lam[i - 1 - w..i - 1];
            let mean = window.iter().sum::<f64>() / w as f64;
            gap / (mean + epsilon)
        })
        .collect();
    Ok(DeltaSeries { w, epsilon, deltas })
}

/// Candidate indices `w+1 ..= floor(n/2)`: the cluster count is not expected to
/// exceed half the points.
fn candidate_range(ds: &DeltaSeries, n: usize) -> std::ops::RangeInclusive<usize> {
    ds.first_index()..=(n / 2).min(ds.last_index())
}

/// Adaptive threshold `T = E[delta] * (1 + sd[delta] / (E[delta] + epsilon))`.
///
/// Mean and population standard deviation are taken over the candidate
/// indices `w+1 ..= floor(n/2)`, the same region the scan searches.
pub fn adaptive_threshold(ds: &DeltaSeries, n: usize) -> Result<f64> {
    let region: Vec<f64> = candidate_range(ds, n).filter_map(|i| ds.get(i)).collect();
    if region.len() < 2 {
        return Err(Error::InsufficientStatistics);
    }
    let count = region.len() as f64;
    let mean = region.iter().sum::<f64>() / count;
    let var = region.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / count;
    let sd = var.sqrt();
    Ok(mean * (1.0 + sd / (mean + ds.epsilon)))
}

/// Everything the scan derives from one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumAnalysis {
    pub deltas: DeltaSeries,
    pub threshold: f64,
    /// First over-threshold index met scanning from `floor(n/2)` down to `w+1`.
    pub jump_index: Option<usize>,
    pub k: usize,
}

impl SpectrumAnalysis {
    pub fn fell_back(&self) -> bool {
        self.jump_index.is_none()
    }
}

pub fn analyze_spectrum(sp: &Spectrum, cfg: &EstimatorConfig) -> Result<SpectrumAnalysis> {
    let n = sp.len();
    if n < cfg.min_points() {
        return Err(Error::SpectrumTooShort { len: n, window: cfg.w });
    }
    let deltas = spectral_deltas(sp, cfg.w, cfg.epsilon)?;
    let threshold = adaptive_threshold(&deltas, n)?;
    let jump_index = candidate_range(&deltas, n)
        .rev()
        .find(|&i| deltas.get(i).is_some_and(|d| d > threshold));
    // The jump at i separates lambda_{i-1} from lambda_i: i - 1 eigenvalues precede it.
    let k = jump_index.map_or(cfg.k_default, |i| (i - 1).max(1));
    Ok(SpectrumAnalysis { deltas, threshold, jump_index, k })
}

pub fn estimate_k_from_spectrum(sp: &Spectrum, cfg: &EstimatorConfig) -> Result<usize> {
    analyze_spectrum(sp, cfg).map(|a| a.k)
}

/// Result of [`estimate_k`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub k_hat: usize,
    /// Mean of the replicate estimates before rounding.
    pub k_raw_mean: f64,
    pub replicate_estimates: Vec<usize>,
    /// Share of replicates where no jump cleared the threshold.
    pub fallback_fraction: f64,
    pub subsampled: bool,
}

/// `round(log2(n) * 10)`, at least 1.
pub fn replicate_count(n: usize) -> usize {
    (((n as f64).log2() * 10.0).round() as usize).max(1)
}

/// The point subset used by replicate `r`: `tau` distinct indices drawn
/// uniformly, in ascending order.
pub fn replicate_subset(n: usize, tau: usize, seed_value: u64, r: usize) -> Vec<usize> {
    let mut rng = seed::rng_for(seed_value, r as u64);
    let mut idx = rand::seq::index::sample(&mut rng, n, tau).into_vec();
    idx.sort_unstable();
    idx
}

/// Spectra the estimator analyzes: the full data when `n <= tau`, otherwise
/// one per replicate subset, in replicate order.
pub fn replicate_spectra(e: &EmbeddingSet, cfg: &EstimatorConfig) -> Result<Vec<Spectrum>> {
    cfg.validate()?;
    let n = e.n();
    if n < cfg.min_points() {
        return Err(Error::TooFewPoints { n, required: cfg.min_points() });
    }
    if n <= cfg.tau {
        return Ok(vec![compute_eigenvalues(e, cfg.use_zscore)?]);
    }
    (0..replicate_count(n))
        .into_par_iter()
        .map(|r| {
            let subset = e.select(&replicate_subset(n, cfg.tau, cfg.seed, r))?;
            compute_eigenvalues(&subset, cfg.use_zscore)
        })
        .collect()
}

/// Combine per-replicate analyses into a [`KEstimate`].
pub fn aggregate(spectra: &[Spectrum], cfg: &EstimatorConfig, subsampled: bool) -> Result<KEstimate> {
    if spectra.is_empty() {
        return Err(Error::InvalidConfig("no spectra to aggregate".into()));
    }
    let analyses = spectra
        .par_iter()
        .map(|sp| analyze_spectrum(sp, cfg))
        .collect::<Result<Vec<_>>>()?;
    let replicate_estimates: Vec<usize> = analyses.iter().map(|a| a.k).collect();
    let fallbacks = analyses.iter().filter(|a| a.fell_back()).count();
    let r = replicate_estimates.len() as f64;
    // Replicate order, so the sum is independent of scheduling.
    let k_raw_mean = replicate_estimates.iter().map(|&k| k as f64).sum::<f64>() / r;
    let k_hat = (k_raw_mean.round() as usize).max(1);
    Ok(KEstimate {
        k_hat,
        k_raw_mean,
        replicate_estimates,
        fallback_fraction: fallbacks as f64 / r,
        subsampled,
    })
}

/// Estimate the number of clusters in `e`.
pub fn estimate_k(e: &EmbeddingSet, cfg: &EstimatorConfig) -> Result<KEstimate> {
    let spectra = replicate_spectra(e, cfg)?;
    aggregate(&spectra, cfg, e.n() > cfg.tau)
}
