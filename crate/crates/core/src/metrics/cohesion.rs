use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Clustering;
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Below this global mean the similarity background is treated as empty.
pub const MIN_GLOBAL_MEAN: f64 = 1e-15;

/// Intermediate quantities of the Cohesion Ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohesionComponents {
    /// Mean similarity over intra-cluster pairs, singletons counted at `mu_g`.
    pub mu_i: f64,
    /// Mean similarity over all unordered pairs.
    pub mu_g: f64,
    pub intra_pairs: u64,
    pub singletons: u64,
    pub ratio: f64,
}

/// Compute `mu_i`, `mu_g` and their ratio in one pass over the upper triangle.
pub fn cohesion_components(s: &SimilarityMatrix, c: &Clustering) -> Result<CohesionComponents> {
    let n = s.n();
    if c.n() != n {
        return Err(Error::LengthMismatch { expected: n, found: c.n() });
    }
    if n < 2 {
        return Err(Error::TooFewPoints { n, required: 2 });
    }
    let m = s.matrix();
    let assign = c.assignment();
    // Per-row partials in parallel, folded in row order.
    let rows: Vec<(f64, f64)> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let (mut all, mut intra) = (0.0, 0.0);
            for j in (i + 1)..n {
                let v = m[[i, j]];
                all += v;
                if assign[i] == assign[j] {
                    intra += v;
                }
            }
            (all, intra)
        })
        .collect();
    let (mut all, mut intra) = (0.0, 0.0);
    for (a, b) in rows {
        all += a;
        intra += b;
    }
    let total_pairs = (n * (n - 1) / 2) as u64;
    let intra_pairs: u64 = c.sizes().iter().map(|&k| (k * (k - 1) / 2) as u64).sum();
    let singletons = c.sizes().iter().filter(|&&k| k == 1).count() as u64;
    let mu_g = all / total_pairs as f64;
    let p = (intra_pairs + singletons) as f64;
    let mu_i = intra / p + (singletons as f64 / p) * mu_g;
    let ratio = if mu_g < MIN_GLOBAL_MEAN { 1.0 } else { mu_i / mu_g };
    Ok(CohesionComponents { mu_i, mu_g, intra_pairs, singletons, ratio })
}

/// Cohesion Ratio `mu_i / mu_g`.
pub fn cohesion_ratio(s: &SimilarityMatrix, c: &Clustering) -> Result<f64> {
    Ok(cohesion_components(s, c)?.ratio)
}

/// Pointwise mutual information `ln(mu_i / mu_g)` and the Bernoulli KL
/// divergence `KL(Bern(mu_i) || Bern(mu_g))`.
pub fn cohesion_information(mu_i: f64, mu_g: f64) -> Result<(f64, f64)> {
    for v in [mu_i, mu_g] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfRange { value: v });
        }
    }
    let pmi = (mu_i / mu_g).ln();
    let kl = mu_i * pmi + (1.0 - mu_i) * ((1.0 - mu_i) / (1.0 - mu_g)).ln();
    Ok((pmi, kl))
}
