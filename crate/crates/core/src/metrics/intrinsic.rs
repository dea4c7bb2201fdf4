use rayon::prelude::*;

use crate::cluster::{distance_matrix, Distance};
use crate::data::{Clustering, EmbeddingSet};
use crate::error::{Error, Result};

fn check(n: usize, c: &Clustering) -> Result<()> {
    if c.n() != n {
        return Err(Error::LengthMismatch { expected: n, found: c.n() });
    }
    if c.k() < 2 {
        return Err(Error::SingleCluster);
    }
    Ok(())
}

/// Mean silhouette width.
pub fn silhouette(e: &EmbeddingSet, c: &Clustering, distance: Distance) -> Result<f64> {
    check(e.n(), c)?;
    silhouette_from_distances(&distance_matrix(e, distance), e.n(), c)
}

/// Mean silhouette width over a precomputed row-major `n x n` distance matrix.
///
/// Points in singleton clusters score 0, as do points with `a = b = 0`.
pub fn silhouette_from_distances(d: &[f64], n: usize, c: &Clustering) -> Result<f64> {
    check(n, c)?;
    if n < 3 {
        return Err(Error::TooFewPoints { n, required: 3 });
    }
    if d.len() != n * n {
        return Err(Error::LengthMismatch { expected: n * n, found: d.len() });
    }
    let k = c.k();
    let sizes = c.sizes();
    let assign = c.assignment();
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = assign[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for (j, &dij) in d[i * n..(i + 1) * n].iter().enumerate() {
                sums[assign[j]] += dij;
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&q| q != own)
                .map(|q| sums[q] / sizes[q] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect();
    Ok(scores.iter().sum::<f64>() / n as f64)
}

fn centroids(e: &EmbeddingSet, c: &Clustering) -> Vec<Vec<f64>> {
    let d = e.d();
    let mut cent = vec![vec![0.0; d]; c.k()];
    for (i, &a) in c.assignment().iter().enumerate() {
        for (acc, &x) in cent[a].iter_mut().zip(e.row(i).iter()) {
            *acc += x;
        }
    }
    for (row, &s) in cent.iter_mut().zip(c.sizes()) {
        for v in row.iter_mut() {
            *v /= s as f64;
        }
    }
    cent
}

fn sq(a: &[f64], b: impl Iterator<Item = f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Davies-Bouldin index (Euclidean). Two clusters sharing a centroid with
/// positive combined scatter make the index `+inf`.
pub fn davies_bouldin(e: &EmbeddingSet, c: &Clustering) -> Result<f64> {
    check(e.n(), c)?;
    let k = c.k();
    let cent = centroids(e, c);
    let mut scatter = vec![0.0; k];
    for (i, &a) in c.assignment().iter().enumerate() {
        scatter[a] += sq(&cent[a], e.row(i).iter().copied()).sqrt();
    }
    for (s, &size) in scatter.iter_mut().zip(c.sizes()) {
        *s /= size as f64;
    }
    let mut total = 0.0;
    for p in 0..k {
        let mut worst: f64 = 0.0;
        for q in 0..k {
            if q == p {
                continue;
            }
            let spread = scatter[p] + scatter[q];
            let sep = sq(&cent[p], cent[q].iter().copied()).sqrt();
            let r = if sep > 0.0 {
                spread / sep
            } else if spread > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst = worst.max(r);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

/// Calinski-Harabasz variance ratio. Zero within-cluster dispersion gives
/// `+inf`, or 1 when the between-cluster dispersion is zero as well.
pub fn calinski_harabasz(e: &EmbeddingSet, c: &Clustering) -> Result<f64> {
    check(e.n(), c)?;
    let (n, k) = (e.n(), c.k());
    if n == k {
        return Err(Error::Saturated);
    }
    let cent = centroids(e, c);
    let d = e.d();
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, &x) in mean.iter_mut().zip(e.row(i).iter()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let between: f64 = cent
        .iter()
        .zip(c.sizes())
        .map(|(ck, &s)| s as f64 * sq(ck, mean.iter().copied()))
        .sum();
    let within: f64 = c
        .assignment()
        .iter()
        .enumerate()
        .map(|(i, &a)| sq(&cent[a], e.row(i).iter().copied()))
        .sum();
    if within == 0.0 {
        return Ok(if between == 0.0 { 1.0 } else { f64::INFINITY });
    }
    Ok(between * (n - k) as f64 / (within * (k - 1) as f64))
}
