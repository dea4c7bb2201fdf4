//! Shared data types: embeddings, ground-truth labels and clusterings.

use std::collections::HashMap;
use std::hash::Hash;

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// Row norms below this are treated as zero vectors.
pub const ZERO_NORM: f64 = 1e-30;

/// An `n x d` matrix of finite embedding vectors, one point per row.
///
/// Construction rejects NaN/Inf entries, all-zero rows, `n < 2` and `d < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    data: Array2<f64>,
}

impl EmbeddingSet {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (n, d) = data.dim();
        if n < 2 {
            return Err(Error::TooFewPoints { n, required: 2 });
        }
        if d < 1 {
            return Err(Error::Shape("embedding dimension must be at least 1".into()));
        }
        for (row, r) in data.axis_iter(Axis(0)).enumerate() {
            if let Some(col) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
            if norm(r) < ZERO_NORM {
                return Err(Error::ZeroVector { row });
            }
        }
        Ok(Self { data })
    }

    /// Build from row vectors. All rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::LengthMismatch { expected: d, found: r.len() });
            }
            flat.extend_from_slice(r);
        }
        let data = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(data)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.data.row(i)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.data
    }

    /// Rows selected by `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(self.data.select(Axis(0), indices))
    }
}

fn norm(r: ArrayView1<'_, f64>) -> f64 {
    r.dot(&r).sqrt()
}

/// Scale every row to unit Euclidean norm.
pub fn l2_normalize(e: &EmbeddingSet) -> Result<EmbeddingSet> {
    let mut data = e.data.clone();
    for (row, mut r) in data.axis_iter_mut(Axis(0)).enumerate() {
        let nrm = norm(r.view());
        if nrm < ZERO_NORM {
            return Err(Error::ZeroVector { row });
        }
        r.mapv_inplace(|v| v / nrm);
    }
    Ok(EmbeddingSet { data })
}

/// Ground-truth class ids, densely indexed `0..C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    classes: usize,
}

impl LabelVector {
    /// Wrap already-dense labels; every id in `0..C` must occur.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0usize; classes];
        for &l in &labels {
            counts[l] += 1;
        }
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass { class });
        }
        Ok(Self { labels, classes })
    }

    /// Re-index arbitrary label values to `0..C` in order of first appearance.
    pub fn from_raw<T: Eq + Hash + Clone>(raw: &[T]) -> Self {
        let (labels, classes) = dense_reindex(raw);
        Self { labels, classes }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }
}

/// Map values to dense ids in first-appearance order; returns the ids and the id count.
pub fn dense_reindex<T: Eq + Hash + Clone>(raw: &[T]) -> (Vec<usize>, usize) {
    let mut map: HashMap<T, usize> = HashMap::new();
    let ids = raw
        .iter()
        .map(|v| {
            let next = map.len();
            *map.entry(v.clone()).or_insert(next)
        })
        .collect();
    (ids, map.len())
}

/// A hard partition of `n` points into `K >= 1` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assign: Vec<usize>,
    sizes: Vec<usize>,
}

impl Clustering {
    /// Wrap an assignment whose ids already cover `0..K` with no gaps.
    pub fn new(assign: Vec<usize>) -> Result<Self> {
        if assign.is_empty() {
            return Err(Error::TooFewPoints { n: 0, required: 1 });
        }
        let k = assign.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; k];
        for &a in &assign {
            sizes[a] += 1;
        }
        if let Some(class) = sizes.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass { class });
        }
        Ok(Self { assign, sizes })
    }

    /// Re-index arbitrary ids (first-appearance order) and wrap.
    pub fn from_raw<T: Eq + Hash + Clone>(raw: &[T]) -> Result<Self> {
        let (ids, _) = dense_reindex(raw);
        Self::new(ids)
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn cluster_of(&self, i: usize) -> usize {
        self.assign[i]
    }

    /// Member indices of every cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &a) in self.assign.iter().enumerate() {
            out[a].push(i);
        }
        out
    }
}

/// Embeddings plus optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub embeddings: EmbeddingSet,
    pub labels: Option<LabelVector>,
}

/// Check that labels (if any) match the embeddings and re-index them densely.
pub fn validate_dataset<T: Eq + Hash + Clone>(
    name: impl Into<String>,
    embeddings: EmbeddingSet,
    labels: Option<&[T]>,
) -> Result<Dataset> {
    let labels = match labels {
        Some(raw) => {
            if raw.len() != embeddings.n() {
                return Err(Error::LengthMismatch { expected: embeddings.n(), found: raw.len() });
            }
            Some(LabelVector::from_raw(raw))
        }
        None => None,
    };
    Ok(Dataset { name: name.into(), embeddings, labels })
}

/// Validate a raw matrix and labels in one step.
pub fn validate_matrix<T: Eq + Hash + Clone>(
    name: impl Into<String>,
    data: Array2<f64>,
    labels: Option<&[T]>,
) -> Result<Dataset> {
    validate_dataset(name, EmbeddingSet::new(data)?, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn normalize_three_four_five() {
        let e = EmbeddingSet::new(array![[3.0, 4.0], [1.0, 0.0]]).unwrap();
        let u = l2_normalize(&e).unwrap();
        assert!((u.data()[[0, 0]] - 0.6).abs() < 1e-12);
        assert!((u.data()[[0, 1]] - 0.8).abs() < 1e-12);
        assert_eq!(u.data()[[1, 0]], 1.0);
    }

    #[test]
    fn normalize_random_rows_are_unit() {
        let mut rng = crate::seed::rng_for(11, 0);
        let data = Array2::from_shape_fn((10, 8), |_| rng.gen_range(-5.0..5.0));
        let u = l2_normalize(&EmbeddingSet::new(data).unwrap()).unwrap();
        for r in u.data().rows() {
            let nrm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((nrm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_nonfinite_rows_rejected() {
        assert_eq!(
            EmbeddingSet::new(array![[1.0, 0.0], [0.0, 0.0]]).unwrap_err(),
            Error::ZeroVector { row: 1 }
        );
        assert_eq!(
            EmbeddingSet::new(array![[1.0, f64::NAN], [0.0, 1.0]]).unwrap_err(),
            Error::NonFinite { row: 0, col: 1 }
        );
        assert!(EmbeddingSet::new(array![[1.0, 2.0]]).is_err());
    }

    #[test]
    fn dataset_reindexes_labels() {
        let e = EmbeddingSet::new(Array2::from_elem((4, 2), 1.0)).unwrap();
        let ds = validate_dataset("t", e, Some(&[7, 7, 9, 9][..])).unwrap();
        let l = ds.labels.unwrap();
        assert_eq!(l.as_slice(), &[0, 0, 1, 1]);
        assert_eq!(l.classes(), 2);
    }

    #[test]
    fn dataset_length_mismatch() {
        let e = EmbeddingSet::new(Array2::from_elem((4, 2), 1.0)).unwrap();
        let err = validate_dataset("t", e, Some(&[0, 1, 2][..])).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 4, found: 3 });
    }

    #[test]
    fn dataset_nan_rejected() {
        let mut m = Array2::from_elem((4, 2), 1.0);
        m[[2, 1]] = f64::NAN;
        let err = validate_matrix::<u8>("t", m, None).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn label_vector_requires_dense_ids() {
        assert_eq!(LabelVector::new(vec![0, 2, 2]).unwrap_err(), Error::EmptyClass { class: 1 });
    }

    #[test]
    fn clustering_sizes() {
        let c = Clustering::from_raw(&["b", "a", "b", "c"]).unwrap();
        assert_eq!(c.assignment(), &[0, 1, 0, 2]);
        assert_eq!(c.sizes(), &[2, 1, 1]);
        assert_eq!(c.members(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(vals in proptest::collection::vec(0.1f64..10.0, 12)) {
            let e = EmbeddingSet::new(Array2::from_shape_vec((4, 3), vals).unwrap()).unwrap();
            let once = l2_normalize(&e).unwrap();
            let twice = l2_normalize(&once).unwrap();
            for (a, b) in once.data().iter().zip(twice.data().iter()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn reindex_preserves_partition(raw in proptest::collection::vec(0u32..6, 1..40)) {
            let l = LabelVector::from_raw(&raw);
            // Contingency of raw vs dense ids is a permutation matrix.
            let mut seen: HashMap<u32, usize> = HashMap::new();
            let mut back: HashMap<usize, u32> = HashMap::new();
            for (&r, &d) in raw.iter().zip(l.as_slice()) {
                prop_assert_eq!(*seen.entry(r).or_insert(d), d);
                prop_assert_eq!(*back.entry(d).or_insert(r), r);
            }
        }
    }
}
