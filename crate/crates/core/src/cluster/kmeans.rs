use ndarray::{Array2, ArrayView1, Axis};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Clustering, EmbeddingSet};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub n_init: usize,
    pub max_iter: usize,
    /// Stop when the total squared centroid shift falls below
    /// `tol * mean per-feature variance * d`.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self { k, n_init: 10, max_iter: 300, tol: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub clustering: Clustering,
    pub centroids: Array2<f64>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after each assignment step of the winning restart.
    pub inertia_history: Vec<f64>,
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding; duplicate-heavy data falls back to the lowest unused index.
fn plus_plus<R: Rng>(x: &Array2<f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let n = x.nrows();
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                if target < d {
                    pick = Some(i);
                    break;
                }
                target -= d;
            }
            // Rounding can leave `target` past the end: take the last positive weight.
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("positive mass"))
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(x.row(i), x.row(next)));
        }
    }
    x.select(Axis(0), &chosen)
}

/// Nearest centroid (lowest index on ties) and squared distance for every point.
fn assign(x: &Array2<f64>, c: &Array2<f64>) -> Vec<(usize, f64)> {
    (0..x.nrows())
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            let mut best = (0, f64::INFINITY);
            for (j, cj) in c.rows().into_iter().enumerate() {
                let d = sq_dist(xi, cj);
                if d < best.1 {
                    best = (j, d);
                }
            }
            best
        })
        .collect()
}

/// Move points into empty clusters. Each empty cluster takes the point farthest
/// from its own centroid among clusters that keep at least one member.
fn repair_empty(labels: &mut [(usize, f64)], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &(l, _) in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        let mut far: Option<(usize, f64)> = None;
        for (i, &(l, d)) in labels.iter().enumerate() {
            if sizes[l] > 1 && far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let (i, _) = far.expect("k <= n guarantees a donor");
        labels[i] = (empty, 0.0);
    }
}

fn centroids_of(x: &Array2<f64>, labels: &[(usize, f64)], k: usize) -> Array2<f64> {
    let mut c = Array2::<f64>::zeros((k, x.ncols()));
    let mut counts = vec![0usize; k];
    for (i, &(l, _)) in labels.iter().enumerate() {
        let mut row = c.row_mut(l);
        row += &x.row(i);
        counts[l] += 1;
    }
    for (mut row, &cnt) in c.rows_mut().into_iter().zip(&counts) {
        row /= cnt as f64;
    }
    c
}

fn single_run<R: Rng>(x: &Array2<f64>, cfg: &KMeansConfig, shift_tol: f64, rng: &mut R) -> KMeansFit {
    let k = cfg.k;
    let mut centroids = plus_plus(x, k, rng);
    let mut history = Vec::new();
    let mut labels;
    let mut iterations = 0;
    loop {
        labels = assign(x, &centroids);
        repair_empty(&mut labels, k);
        history.push(labels.iter().map(|&(_, d)| d).sum::<f64>());
        iterations += 1;
        let next = centroids_of(x, &labels, k);
        let shift: f64 = next
            .rows()
            .into_iter()
            .zip(centroids.rows())
            .map(|(a, b)| sq_dist(a, b))
            .sum();
        centroids = next;
        if shift <= shift_tol || iterations >= cfg.max_iter {
            break;
        }
    }
    // Final inertia against the final centroids, keeping the last assignment.
    let inertia: f64 = labels
        .iter()
        .enumerate()
        .map(|(i, &(l, _))| sq_dist(x.row(i), centroids.row(l)))
        .sum();
    let assignment: Vec<usize> = labels.iter().map(|&(l, _)| l).collect();
    KMeansFit {
        clustering: Clustering::new(assignment).expect("repaired clusters are non-empty"),
        centroids,
        inertia,
        iterations,
        inertia_history: history,
    }
}

/// Lloyd's algorithm with k-means++ seeding; keeps the restart with the lowest inertia
/// (earliest restart on ties).
pub fn kmeans_fit(e: &EmbeddingSet, cfg: &KMeansConfig) -> Result<KMeansFit> {
    let n = e.n();
    if cfg.k == 0 || cfg.n_init == 0 {
        return Err(Error::InvalidConfig("k and n_init must be at least 1".into()));
    }
    if cfg.k > n {
        return Err(Error::KTooLarge { k: cfg.k, n });
    }
    let x = e.data();
    let mean_var = x.var_axis(Axis(0), 0.0).mean().unwrap_or(0.0);
    let shift_tol = cfg.tol * mean_var * x.ncols() as f64;
    let mut best: Option<KMeansFit> = None;
    for run in 0..cfg.n_init {
        let mut rng = seed::rng_for(cfg.seed, run as u64);
        let fit = single_run(x, cfg, shift_tol, &mut rng);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

pub fn kmeans(e: &EmbeddingSet, cfg: &KMeansConfig) -> Result<Clustering> {
    kmeans_fit(e, cfg).map(|f| f.clustering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn blobs() -> EmbeddingSet {
        let mut rng = seed::rng_for(1, 0);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let c = if i < 20 { 0.0 } else { 10.0 };
                vec![c + rng.gen_range(-0.5..0.5), 1.0 + rng.gen_range(-0.5..0.5)]
            })
            .collect();
        EmbeddingSet::from_rows(&rows).unwrap()
    }

    #[test]
    fn single_cluster_centroid_is_mean() {
        let e = EmbeddingSet::new(array![[1.0, 2.0], [3.0, 4.0], [5.0, 9.0]]).unwrap();
        let fit = kmeans_fit(&e, &KMeansConfig::new(1)).unwrap();
        assert_eq!(fit.clustering.sizes(), &[3]);
        assert!((fit.centroids[[0, 0]] - 3.0).abs() < 1e-15);
        assert!((fit.centroids[[0, 1]] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let e = EmbeddingSet::new(array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]]).unwrap();
        let fit = kmeans_fit(&e, &KMeansConfig::new(4)).unwrap();
        assert_eq!(fit.clustering.k(), 4);
        assert!(fit.clustering.sizes().iter().all(|&s| s == 1));
        assert_eq!(fit.inertia, 0.0);
    }

    #[test]
    fn separates_two_blobs() {
        let fit = kmeans_fit(&blobs(), &KMeansConfig::new(2)).unwrap();
        let a = fit.clustering.assignment();
        assert!(a[..20].iter().all(|&l| l == a[0]));
        assert!(a[20..].iter().all(|&l| l == a[20]));
        assert_ne!(a[0], a[20]);
    }

    #[test]
    fn inertia_never_increases() {
        let e = blobs();
        for seed_value in 0..5 {
            let cfg = KMeansConfig { seed: seed_value, n_init: 1, ..KMeansConfig::new(5) };
            let fit = kmeans_fit(&e, &cfg).unwrap();
            for w in fit.inertia_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", fit.inertia_history);
            }
            assert!(fit.inertia <= *fit.inertia_history.last().unwrap() + 1e-12);
        }
    }

    #[test]
    fn duplicates_still_fill_every_cluster() {
        let e = EmbeddingSet::new(Array2::from_elem((6, 2), 1.0)).unwrap();
        let fit = kmeans_fit(&e, &KMeansConfig::new(3)).unwrap();
        assert_eq!(fit.clustering.k(), 3);
    }

    #[test]
    fn deterministic_given_seed() {
        let e = blobs();
        let cfg = KMeansConfig { seed: 42, ..KMeansConfig::new(4) };
        assert_eq!(kmeans(&e, &cfg).unwrap(), kmeans(&e, &cfg).unwrap());
    }

    #[test]
    fn too_many_clusters() {
        let e = EmbeddingSet::new(array![[1.0], [2.0]]).unwrap();
        assert_eq!(kmeans(&e, &KMeansConfig::new(3)).unwrap_err(), Error::KTooLarge { k: 3, n: 2 });
    }
}
