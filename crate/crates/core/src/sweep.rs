//! Grid of clusterings scored by every metric, and the rank correlations
//! between intrinsic and extrinsic scores across the grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{dendrogram, distance_matrix, kmeans, Distance, KMeansConfig, Linkage};
use crate::data::{l2_normalize, Clustering, EmbeddingSet, LabelVector};
use crate::error::{Error, Result};
use crate::metrics::{
    calinski_harabasz, cohesion_ratio, davies_bouldin, extrinsic_scores, relative_error_k, silhouette_from_distances,
    spearman, MetricReport,
};
use crate::seed;
use crate::spectral::similarity_for;
use crate::synth::degrade_clustering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Kmeans,
    Hac,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Kmeans => "kmeans",
            Algo::Hac => "hac",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub algos: Vec<Algo>,
    pub k_min: usize,
    pub k_max: usize,
    pub noise_rates: Vec<f64>,
    pub kmeans_n_init: usize,
    pub linkage: Linkage,
    pub hac_distance: Distance,
    pub silhouette_distance: Distance,
    pub use_zscore: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            algos: vec![Algo::Kmeans, Algo::Hac],
            k_min: 2,
            k_max: 8,
            noise_rates: vec![0.0, 0.1, 0.2, 0.3, 0.5],
            kmeans_n_init: 10,
            linkage: Linkage::Average,
            hac_distance: Distance::Cosine,
            silhouette_distance: Distance::Euclidean,
            use_zscore: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algo: Algo,
    pub k: usize,
    pub noise: f64,
    pub metrics: MetricReport,
}

pub const INTRINSIC: [&str; 4] = ["silhouette", "neg_dbi", "chi", "cohesion_ratio"];
pub const EXTRINSIC: [&str; 5] = ["ari", "nmi", "homogeneity", "completeness", "fmi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub intrinsic: Vec<String>,
    pub extrinsic: Vec<String>,
    /// `spearman[i][j]` pairs `intrinsic[i]` with `extrinsic[j]`; empty when
    /// either column is constant or has too few finite values.
    pub spearman: Vec<Vec<Option<f64>>>,
}

impl SweepResult {
    pub fn correlation(&self, intrinsic: &str, extrinsic: &str) -> Option<f64> {
        let i = self.intrinsic.iter().position(|x| x == intrinsic)?;
        let j = self.extrinsic.iter().position(|x| x == extrinsic)?;
        self.spearman[i][j]
    }
}

fn intrinsic_value(m: &MetricReport, name: &str) -> Option<f64> {
    match name {
        "silhouette" => m.silhouette,
        "neg_dbi" => m.dbi.map(|x| -x),
        "chi" => m.chi,
        "cohesion_ratio" => m.cohesion_ratio,
        _ => None,
    }
}

fn extrinsic_value(m: &MetricReport, name: &str) -> Option<f64> {
    match name {
        "ari" => m.ari,
        "nmi" => m.nmi,
        "homogeneity" => m.homogeneity,
        "completeness" => m.completeness,
        "fmi" => m.fmi,
        _ => None,
    }
}

/// Spearman correlation over rows where both values are present. Infinite
/// values (degenerate DBI/CHI) rank as extremes.
pub fn column_correlation(rows: &[SweepRow], intrinsic: &str, extrinsic: &str) -> Option<f64> {
    let (mut x, mut y) = (vec![], vec![]);
    for r in rows {
        if let (Some(a), Some(b)) = (intrinsic_value(&r.metrics, intrinsic), extrinsic_value(&r.metrics, extrinsic)) {
            if !a.is_nan() && !b.is_nan() {
                x.push(a);
                y.push(b);
            }
        }
    }
    spearman(&x, &y).ok()
}

pub fn correlation_matrix(rows: &[SweepRow]) -> Vec<Vec<Option<f64>>> {
    INTRINSIC
        .iter()
        .map(|i| EXTRINSIC.iter().map(|e| column_correlation(rows, i, e)).collect())
        .collect()
}

pub fn sweep(e: &EmbeddingSet, labels: &LabelVector, cfg: &SweepConfig) -> Result<SweepResult> {
    let n = e.n();
    if labels.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: labels.len() });
    }
    if cfg.k_min < 2 || cfg.k_max < cfg.k_min || cfg.k_max > n {
        return Err(Error::InvalidConfig(format!("k range {}..={} invalid for {n} points", cfg.k_min, cfg.k_max)));
    }
    if cfg.noise_rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::InvalidConfig("noise rates must lie in [0, 1]".into()));
    }
    let normalized = l2_normalize(e)?;
    let distances = distance_matrix(e, cfg.silhouette_distance);
    let similarity = similarity_for(e, cfg.use_zscore)?;
    let tree = if cfg.algos.contains(&Algo::Hac) { Some(dendrogram(e, cfg.linkage, cfg.hac_distance)) } else { None };

    let mut bases: Vec<(usize, Algo, usize)> = vec![];
    for (ai, &algo) in cfg.algos.iter().enumerate() {
        for k in cfg.k_min..=cfg.k_max {
            bases.push((ai, algo, k));
        }
    }
    let clusterings: Vec<Clustering> = bases
        .par_iter()
        .map(|&(ai, algo, k)| match algo {
            Algo::Kmeans => kmeans(
                &normalized,
                &KMeansConfig {
                    n_init: cfg.kmeans_n_init,
                    seed: seed::derive(cfg.seed, (ai * 10_000 + k) as u64),
                    ..KMeansConfig::new(k)
                },
            ),
            Algo::Hac => tree.as_ref().expect("dendrogram built").cut(k),
        })
        .collect::<Result<_>>()?;

    let mut cells = vec![];
    for (b, &(ai, algo, k)) in bases.iter().enumerate() {
        for (ni, &noise) in cfg.noise_rates.iter().enumerate() {
            cells.push((b, ai, algo, k, ni, noise));
        }
    }
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(b, ai, algo, k, ni, noise)| {
            let stream = ((ai * 10_000 + k) * 1_000 + ni) as u64;
            let c = if noise == 0.0 {
                clusterings[b].clone()
            } else {
                degrade_clustering(&clusterings[b], noise, seed::derive(cfg.seed ^ 0x5eed, stream))?
            };
            let mut m = MetricReport { k_pred: c.k(), k_true: Some(labels.classes()), ..Default::default() };
            extrinsic_scores(labels, &c, &mut m)?;
            m.re_k = Some(relative_error_k(c.k(), labels.classes())?);
            m.silhouette = silhouette_from_distances(&distances, n, &c).ok();
            m.dbi = davies_bouldin(e, &c).ok();
            m.chi = calinski_harabasz(e, &c).ok();
            m.cohesion_ratio = Some(cohesion_ratio(&similarity, &c)?);
            Ok(SweepRow { algo, k, noise, metrics: m })
        })
        .collect::<Result<_>>()?;

    let spearman = correlation_matrix(&rows);
    Ok(SweepResult {
        rows,
        intrinsic: INTRINSIC.iter().map(|s| s.to_string()).collect(),
        extrinsic: EXTRINSIC.iter().map(|s| s.to_string()).collect(),
        spearman,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_spherical_mixture, MixtureSpec};

    #[test]
    fn one_row_per_cell_and_cohesion_tracks_nmi() {
        let ds = generate_spherical_mixture(&MixtureSpec::new(5, 300, 16, 0.15, 11)).unwrap();
        let cfg = SweepConfig { kmeans_n_init: 3, ..SweepConfig::default() };
        let res = sweep(&ds.embeddings, ds.labels.as_ref().unwrap(), &cfg).unwrap();
        assert_eq!(res.rows.len(), 2 * 7 * 5);
        assert_eq!(res.spearman.len(), 4);
        let rho = res.correlation("cohesion_ratio", "nmi").unwrap();
        assert!(rho >= 0.6, "{rho}");
    }

    #[test]
    fn deterministic() {
        let ds = generate_spherical_mixture(&MixtureSpec::new(3, 90, 8, 0.2, 2)).unwrap();
        let cfg = SweepConfig { k_max: 4, noise_rates: vec![0.0, 0.3], kmeans_n_init: 2, ..SweepConfig::default() };
        let a = sweep(&ds.embeddings, ds.labels.as_ref().unwrap(), &cfg).unwrap();
        let b = sweep(&ds.embeddings, ds.labels.as_ref().unwrap(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_grid() {
        let ds = generate_spherical_mixture(&MixtureSpec::new(3, 30, 8, 0.2, 2)).unwrap();
        let cfg = SweepConfig { k_min: 1, ..SweepConfig::default() };
        assert!(sweep(&ds.embeddings, ds.labels.as_ref().unwrap(), &cfg).is_err());
    }
}
