use crate::data::{Clustering, LabelVector};
use crate::error::{Error, Result};

/// Class-by-cluster co-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    classes: usize,
    clusters: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

/// Pair counts over all unordered point pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn comb2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

impl ContingencyTable {
    /// Build from raw parallel id slices (ids need not be dense).
    pub fn from_ids(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
        }
        let (a, classes) = crate::data::dense_reindex(a);
        let (b, clusters) = crate::data::dense_reindex(b);
        let mut counts = vec![0u64; classes * clusters];
        for (&x, &y) in a.iter().zip(&b) {
            counts[x * clusters + y] += 1;
        }
        let mut row_sums = vec![0u64; classes];
        let mut col_sums = vec![0u64; clusters];
        for r in 0..classes {
            for c in 0..clusters {
                row_sums[r] += counts[r * clusters + c];
                col_sums[c] += counts[r * clusters + c];
            }
        }
        Ok(Self { classes, clusters, counts, row_sums, col_sums, n: a.len() as u64 })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn get(&self, class: usize, cluster: usize) -> u64 {
        self.counts[class * self.clusters + cluster]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Roles of classes and clusters exchanged.
    pub fn transpose(&self) -> Self {
        let mut counts = vec![0u64; self.counts.len()];
        for r in 0..self.classes {
            for c in 0..self.clusters {
                counts[c * self.classes + r] = self.get(r, c);
            }
        }
        Self {
            classes: self.clusters,
            clusters: self.classes,
            counts,
            row_sums: self.col_sums.clone(),
            col_sums: self.row_sums.clone(),
            n: self.n,
        }
    }

    pub fn pair_counts(&self) -> PairCounts {
        let tp: u64 = self.counts.iter().map(|&x| comb2(x)).sum();
        let same_class: u64 = self.row_sums.iter().map(|&x| comb2(x)).sum();
        let same_cluster: u64 = self.col_sums.iter().map(|&x| comb2(x)).sum();
        let total = comb2(self.n);
        PairCounts {
            tp,
            fp: same_cluster - tp,
            fn_: same_class - tp,
            tn: total + tp - same_class - same_cluster,
        }
    }
}

/// Rows follow the label classes, columns the clusters.
pub fn contingency(l: &LabelVector, c: &Clustering) -> Result<ContingencyTable> {
    if l.len() != c.n() {
        return Err(Error::LengthMismatch { expected: l.len(), found: c.n() });
    }
    ContingencyTable::from_ids(l.as_slice(), c.assignment())
}

/// Adjusted Rand index. When the chance-corrected denominator vanishes (both
/// partitions trivial and identical) the score is 1.
pub fn ari(t: &ContingencyTable) -> Result<f64> {
    if t.n < 2 {
        return Err(Error::TooFewPoints { n: t.n as usize, required: 2 });
    }
    let p = t.pair_counts();
    let index = p.tp as f64;
    let a = (p.tp + p.fn_) as f64;
    let b = (p.tp + p.fp) as f64;
    let total = p.total() as f64;
    let expected = a * b / total;
    let max = 0.5 * (a + b);
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok(((index - expected) / denom).clamp(-1.0, 1.0))
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let p = x as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Entropy-based scores: `(nmi, homogeneity, completeness)`.
///
/// NMI uses the arithmetic mean of the two entropies, so it equals the V-measure.
pub fn nmi_family(t: &ContingencyTable) -> (f64, f64, f64) {
    let n = t.n as f64;
    if t.n == 0 {
        return (1.0, 1.0, 1.0);
    }
    let h_class = entropy(&t.row_sums, n);
    let h_cluster = entropy(&t.col_sums, n);
    let mut mi = 0.0;
    for r in 0..t.classes {
        for c in 0..t.clusters {
            let x = t.get(r, c);
            if x == 0 {
                continue;
            }
            let x = x as f64;
            mi += x / n * (n * x / (t.row_sums[r] as f64 * t.col_sums[c] as f64)).ln();
        }
    }
    let mi = mi.max(0.0);
    let hom = if h_class == 0.0 { 1.0 } else { (mi / h_class).clamp(0.0, 1.0) };
    let com = if h_cluster == 0.0 { 1.0 } else { (mi / h_cluster).clamp(0.0, 1.0) };
    let nmi = if h_class == 0.0 && h_cluster == 0.0 {
        1.0
    } else {
        (2.0 * mi / (h_class + h_cluster)).clamp(0.0, 1.0)
    };
    (nmi, hom, com)
}

/// Fowlkes-Mallows index; 0 when no pair is shared.
pub fn fmi(t: &ContingencyTable) -> f64 {
    let p = t.pair_counts();
    if p.tp == 0 {
        return 0.0;
    }
    let tp = p.tp as f64;
    (tp / ((tp + p.fp as f64) * (tp + p.fn_ as f64)).sqrt()).min(1.0)
}

/// `|k_hat - k_true| / k_true`.
pub fn relative_error_k(k_hat: usize, k_true: usize) -> Result<f64> {
    if k_true == 0 {
        return Err(Error::InvalidConfig("true cluster count must be at least 1".into()));
    }
    Ok((k_hat as f64 - k_true as f64).abs() / k_true as f64)
}
