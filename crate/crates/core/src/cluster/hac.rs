//! Agglomerative clustering with Lance-Williams distance updates.
//!
//! Each active cluster caches its nearest neighbour among active clusters with
//! a larger slot index, so the closest pair is found with one pass over the
//! cache. Ties are broken by the lexicographically smallest `(i, j)` slot pair;
//! a merged cluster keeps the smaller slot.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Clustering, EmbeddingSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    /// `1 - cos(x_i, x_j)` on the raw (unrectified) cosine.
    #[default]
    Cosine,
    Euclidean,
}

impl Distance {
    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Distance::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                (1.0 - dot / (na * nb)).max(0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HacConfig {
    pub k: usize,
    pub linkage: Linkage,
    pub distance: Distance,
}

impl HacConfig {
    pub fn new(k: usize) -> Self {
        Self { k, linkage: Linkage::default(), distance: Distance::default() }
    }
}

/// One agglomeration step: slots `a < b` merge into slot `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

/// Full merge sequence over `n` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Replay the first `n - k` merges. Cluster ids follow the smallest member index.
    pub fn cut(&self, k: usize) -> Result<Clustering> {
        if k == 0 || k > self.n {
            return Err(Error::KTooLarge { k, n: self.n });
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for m in &self.merges[..self.n - k] {
            let (ra, rb) = (find(&mut parent, m.a), find(&mut parent, m.b));
            parent[rb] = ra;
        }
        let roots: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Clustering::from_raw(&roots)
    }
}

/// Pairwise distances, row-major `n x n`. Rows are filled in parallel; each
/// entry is computed identically from either side, so the result is symmetric.
pub fn distance_matrix(e: &EmbeddingSet, distance: Distance) -> Vec<f64> {
    let n = e.n();
    let rows: Vec<Vec<f64>> = e.data().rows().into_iter().map(|r| r.to_vec()).collect();
    let mut d = vec![0.0; n * n];
    d.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        for (j, o) in out.iter_mut().enumerate() {
            if j != i {
                *o = distance.between(&rows[i], &rows[j]);
            }
        }
    });
    d
}

/// Build the complete dendrogram from a precomputed distance matrix.
pub fn dendrogram_from_distances(mut d: Vec<f64>, n: usize, linkage: Linkage) -> Dendrogram {
    assert_eq!(d.len(), n * n);
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    // nn[i]: nearest active j > i with its distance.
    let mut nn: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); n];
    let scan = |d: &[f64], active: &[bool], i: usize| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (i + 1)..n {
            if active[j] && d[i * n + j] < best.0 {
                best = (d[i * n + j], j);
            }
        }
        best
    };
    for (i, slot) in nn.iter_mut().enumerate() {
        *slot = scan(&d, &active, i);
    }
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut a = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if active[i] && nn[i].1 != usize::MAX && nn[i].0 < best {
                best = nn[i].0;
                a = i;
            }
        }
        if a == usize::MAX {
            // Only infinite distances remain: merge the two lowest active slots.
            let mut it = (0..n).filter(|&i| active[i]);
            let (x, y) = (it.next().unwrap(), it.next().unwrap());
            a = x;
            nn[x] = (f64::INFINITY, y);
        }
        let (height, b) = nn[a];
        let (sa, sb) = (size[a], size[b]);
        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let (da, db) = (d[a * n + k], d[b * n + k]);
            let v = match linkage {
                Linkage::Average => (sa as f64 * da + sb as f64 * db) / (sa + sb) as f64,
                Linkage::Complete => da.max(db),
                Linkage::Single => da.min(db),
            };
            d[a * n + k] = v;
            d[k * n + a] = v;
        }
        active[b] = false;
        size[a] = sa + sb;
        merges.push(Merge { a, b, height, size: sa + sb });

        nn[a] = scan(&d, &active, a);
        for i in 0..a {
            if !active[i] {
                continue;
            }
            if nn[i].1 == a || nn[i].1 == b {
                nn[i] = scan(&d, &active, i);
            } else {
                let v = d[i * n + a];
                if v < nn[i].0 || (v == nn[i].0 && a < nn[i].1) {
                    nn[i] = (v, a);
                }
            }
        }
        for i in (a + 1)..n {
            // Rows between a and b that pointed at b need a rescan; rows past b are unaffected.
            if active[i] && nn[i].1 == b {
                nn[i] = scan(&d, &active, i);
            }
        }
    }
    Dendrogram { n, merges }
}

pub fn dendrogram(e: &EmbeddingSet, linkage: Linkage, distance: Distance) -> Dendrogram {
    dendrogram_from_distances(distance_matrix(e, distance), e.n(), linkage)
}

pub fn hac(e: &EmbeddingSet, cfg: &HacConfig) -> Result<Clustering> {
    if cfg.k == 0 || cfg.k > e.n() {
        return Err(Error::KTooLarge { k: cfg.k, n: e.n() });
    }
    dendrogram(e, cfg.linkage, cfg.distance).cut(cfg.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn points(v: &[f64]) -> EmbeddingSet {
        let rows: Vec<Vec<f64>> = v.iter().map(|&x| vec![x, 1.0]).collect();
        EmbeddingSet::from_rows(&rows).unwrap()
    }

    /// Global-minimum search over all active pairs each step; the slow reference.
    fn naive(d0: &[f64], n: usize, linkage: Linkage) -> Vec<(usize, usize, f64)> {
        let mut d = d0.to_vec();
        let mut active = vec![true; n];
        let mut size = vec![1usize; n];
        let mut out = vec![];
        for _ in 1..n {
            let mut best = (f64::INFINITY, 0, 0);
            for i in 0..n {
                for j in (i + 1)..n {
                    if active[i] && active[j] && d[i * n + j] < best.0 {
                        best = (d[i * n + j], i, j);
                    }
                }
            }
            let (h, a, b) = best;
            for k in 0..n {
                if active[k] && k != a && k != b {
                    let v = match linkage {
                        Linkage::Average => {
                            (size[a] as f64 * d[a * n + k] + size[b] as f64 * d[b * n + k])
                                / (size[a] + size[b]) as f64
                        }
                        Linkage::Complete => d[a * n + k].max(d[b * n + k]),
                        Linkage::Single => d[a * n + k].min(d[b * n + k]),
                    };
                    d[a * n + k] = v;
                    d[k * n + a] = v;
                }
            }
            active[b] = false;
            size[a] += size[b];
            out.push((a, b, h));
        }
        out
    }

    #[test]
    fn matches_naive_search() {
        let mut rng = crate::seed::rng_for(2, 0);
        for case in 0..30 {
            let n = rng.gen_range(2..25);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
            let e = EmbeddingSet::from_rows(&rows).unwrap();
            let linkage = [Linkage::Average, Linkage::Complete, Linkage::Single][case % 3];
            let dm = distance_matrix(&e, Distance::Euclidean);
            let fast = dendrogram_from_distances(dm.clone(), n, linkage);
            let slow = naive(&dm, n, linkage);
            for (m, s) in fast.merges().iter().zip(&slow) {
                assert_eq!((m.a, m.b), (s.0, s.1));
                assert_eq!(m.height, s.2);
            }
        }
    }

    #[test]
    fn ties_merge_smallest_pair_first() {
        // Equally spaced points: every adjacent pair ties at distance 1.
        let d = dendrogram(&points(&[0.0, 1.0, 2.0, 3.0]), Linkage::Single, Distance::Euclidean);
        assert_eq!((d.merges()[0].a, d.merges()[0].b), (0, 1));
    }

    #[test]
    fn extremes() {
        let e = points(&[0.0, 1.0, 5.0, 6.5]);
        let all = hac(&e, &HacConfig { k: 4, linkage: Linkage::Average, distance: Distance::Euclidean }).unwrap();
        assert_eq!(all.k(), 4);
        let one = hac(&e, &HacConfig { k: 1, linkage: Linkage::Average, distance: Distance::Euclidean }).unwrap();
        assert_eq!(one.sizes(), &[4]);
        let two = hac(&e, &HacConfig { k: 2, linkage: Linkage::Average, distance: Distance::Euclidean }).unwrap();
        assert_eq!(two.assignment(), &[0, 0, 1, 1]);
        assert!(hac(&e, &HacConfig::new(5)).is_err());
    }

    #[test]
    fn monotone_heights() {
        let mut rng = crate::seed::rng_for(8, 0);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let e = EmbeddingSet::from_rows(&rows).unwrap();
        for linkage in [Linkage::Average, Linkage::Complete] {
            for distance in [Distance::Euclidean, Distance::Cosine] {
                let d = dendrogram(&e, linkage, distance);
                for w in d.merges().windows(2) {
                    assert!(w[1].height >= w[0].height - 1e-12);
                }
            }
        }
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = crate::seed::rng_for(9, 0);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let e = EmbeddingSet::from_rows(&rows).unwrap();
        let perm: Vec<usize> = (0..30).map(|i| (i * 7) % 30).collect();
        let pe = e.select(&perm).unwrap();
        let cfg = HacConfig::new(4);
        let a = hac(&e, &cfg).unwrap();
        let b = hac(&pe, &cfg).unwrap();
        // Same partition up to relabeling.
        for i in 0..30 {
            for j in 0..30 {
                let same_a = a.cluster_of(perm[i]) == a.cluster_of(perm[j]);
                let same_b = b.cluster_of(i) == b.cluster_of(j);
                assert_eq!(same_a, same_b);
            }
        }
    }
}
