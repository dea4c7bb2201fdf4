//! Affinity matrices built from embeddings.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{EmbeddingSet, ZERO_NORM};
use crate::error::{Error, Result};

/// How a [`SimilarityMatrix`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityVariant {
    /// `max(0, cos(z_i, z_j))`.
    RectifiedCosine,
    /// Off-diagonal z-scores, rectified and rescaled into `[0, 1]`.
    ZScoreRectified,
}

/// Symmetric non-negative `n x n` affinity matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    s: Array2<f64>,
    variant: SimilarityVariant,
}

impl SimilarityMatrix {
    /// Wrap a precomputed affinity matrix. Entries must be finite, non-negative
    /// and symmetric within `1e-12`.
    pub fn from_matrix(s: Array2<f64>, variant: SimilarityVariant) -> Result<Self> {
        let (n, m) = s.dim();
        if n != m {
            return Err(Error::Shape(format!("similarity matrix is {n}x{m}")));
        }
        let mut max_asym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = s[[i, j]];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::InvalidConfig(format!("negative affinity at ({i}, {j})")));
                }
                max_asym = max_asym.max((v - s[[j, i]]).abs());
            }
        }
        if max_asym > 1e-12 {
            return Err(Error::NotSymmetric { max_asymmetry: max_asym });
        }
        Ok(Self { s, variant })
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn variant(&self) -> SimilarityVariant {
        self.variant
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.s
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[[i, j]]
    }
}

/// Rectified cosine similarity `s_ij = max(0, <z_i, z_j> / (|z_i| |z_j|))`, unit diagonal.
pub fn cosine_similarity_matrix(e: &EmbeddingSet) -> Result<SimilarityMatrix> {
    let (n, d) = (e.n(), e.d());
    let x = e.data();
    let mut unit = vec![0.0f64; n * d];
    for (i, row) in x.rows().into_iter().enumerate() {
        let nrm = row.dot(&row).sqrt();
        if nrm < ZERO_NORM {
            return Err(Error::ZeroVector { row: i });
        }
        for (dst, v) in unit[i * d..(i + 1) * d].iter_mut().zip(row.iter()) {
            *dst = v / nrm;
        }
    }
    let mut s = vec![0.0f64; n * n];
    // Lower triangle row by row; each entry is a single fixed-order dot product.
    s.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        let zi = &unit[i * d..(i + 1) * d];
        for (j, o) in out.iter_mut().enumerate().take(i) {
            let zj = &unit[j * d..(j + 1) * d];
            let c: f64 = zi.iter().zip(zj).map(|(a, b)| a * b).sum();
            *o = c.clamp(0.0, 1.0);
        }
        out[i] = 1.0;
    });
    for i in 0..n {
        for j in (i + 1)..n {
            s[i * n + j] = s[j * n + i];
        }
    }
    let s = Array2::from_shape_vec((n, n), s).expect("square buffer");
    Ok(SimilarityMatrix { s, variant: SimilarityVariant::RectifiedCosine })
}

/// Z-score the off-diagonal entries, rectify, and rescale by the maximum so the
/// result stays in `[0, 1]`. The diagonal is set to 1.
///
/// Mean and (population) standard deviation are taken over all off-diagonal
/// entries. Returns [`Error::DegenerateSpread`] when that spread is below `1e-12`;
/// callers that want the input back unchanged can keep their original matrix.
pub fn zscore_rectify(s: &SimilarityMatrix) -> Result<SimilarityMatrix> {
    let n = s.n();
    if n < 3 {
        return Err(Error::TooFewPoints { n, required: 3 });
    }
    let m = &s.s;
    let count = (n * (n - 1)) as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[[i, j]];
            }
        }
    }
    let mean = sum / count;
    let mut ss = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let dv = m[[i, j]] - mean;
                ss += dv * dv;
            }
        }
    }
    let sd = (ss / count).sqrt();
    if sd < 1e-12 {
        return Err(Error::DegenerateSpread);
    }
    let mut out = Array2::<f64>::zeros((n, n));
    let mut max = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = ((m[[i, j]] - mean) / sd).max(0.0);
            out[[i, j]] = z;
            out[[j, i]] = z;
            max = max.max(z);
        }
    }
    if max > 0.0 {
        out.mapv_inplace(|v| v / max);
    }
    for i in 0..n {
        out[[i, i]] = 1.0;
    }
    Ok(SimilarityMatrix { s: out, variant: SimilarityVariant::ZScoreRectified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;

    fn emb(rows: &[Vec<f64>]) -> EmbeddingSet {
        EmbeddingSet::from_rows(rows).unwrap()
    }

    #[test]
    fn cosine_analytic_cases() {
        let s = cosine_similarity_matrix(&emb(&[
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![-1.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(0, 2), 0.0);
        assert!((s.get(0, 3) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // Antipodal: raw cosine -1 is clipped to 0.
        assert_eq!(s.get(0, 4), 0.0);
        for i in 0..5 {
            assert_eq!(s.get(i, i), 1.0);
        }
        assert_eq!(s.variant(), SimilarityVariant::RectifiedCosine);
    }

    #[test]
    fn zscore_three_points() {
        let s = SimilarityMatrix::from_matrix(
            array![[1.0, 0.9, 0.1], [0.9, 1.0, 0.1], [0.1, 0.1, 1.0]],
            SimilarityVariant::RectifiedCosine,
        )
        .unwrap();
        let z = zscore_rectify(&s).unwrap();
        // mean 11/30, population sd over {0.9, 0.1, 0.1}; 0.9 -> z > 0, rescaled to 1.
        assert_eq!(z.get(0, 1), 1.0);
        assert_eq!(z.get(0, 2), 0.0);
        assert_eq!(z.get(1, 2), 0.0);
        assert_eq!(z.get(2, 2), 1.0);
        assert_eq!(z.variant(), SimilarityVariant::ZScoreRectified);
    }

    #[test]
    fn zscore_degenerate_spread() {
        let s = SimilarityMatrix::from_matrix(
            Array2::from_elem((4, 4), 0.5) + Array2::<f64>::eye(4) * 0.5,
            SimilarityVariant::RectifiedCosine,
        )
        .unwrap();
        assert_eq!(zscore_rectify(&s).unwrap_err(), Error::DegenerateSpread);
    }

    #[test]
    fn zscore_random_matrices_stay_in_range() {
        let mut rng = crate::seed::rng_for(5, 0);
        for _ in 0..100 {
            let n = rng.gen_range(3..12);
            let mut m = Array2::<f64>::eye(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let v: f64 = rng.gen();
                    m[[i, j]] = v;
                    m[[j, i]] = v;
                }
            }
            let z = zscore_rectify(
                &SimilarityMatrix::from_matrix(m, SimilarityVariant::RectifiedCosine).unwrap(),
            )
            .unwrap();
            for i in 0..n {
                assert_eq!(z.get(i, i), 1.0);
                for j in 0..n {
                    let v = z.get(i, j);
                    assert!((0.0..=1.0).contains(&v));
                    assert!((v - z.get(j, i)).abs() <= 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn cosine_is_per_row_scale_invariant(
            vals in proptest::collection::vec(-3.0f64..3.0, 15),
            scales in proptest::collection::vec(0.01f64..100.0, 5),
        ) {
            let base = Array2::from_shape_vec((5, 3), vals).unwrap();
            prop_assume!(base.rows().into_iter().all(|r| r.dot(&r) > 1e-6));
            let mut scaled = base.clone();
            for (i, mut r) in scaled.rows_mut().into_iter().enumerate() {
                r *= scales[i];
            }
            let a = cosine_similarity_matrix(&EmbeddingSet::new(base).unwrap()).unwrap();
            let b = cosine_similarity_matrix(&EmbeddingSet::new(scaled).unwrap()).unwrap();
            for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
                prop_assert!((x - y).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(x));
            }
            for i in 0..5 {
                for j in 0..5 {
                    prop_assert!((a.get(i, j) - a.get(j, i)).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn zscore_preserves_order(vals in proptest::collection::vec(0.0f64..1.0, 10)) {
            let n = 5;
            let mut m = Array2::<f64>::eye(n);
            let mut it = vals.iter();
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = *it.next().unwrap();
                    m[[i, j]] = v;
                    m[[j, i]] = v;
                }
            }
            let s = SimilarityMatrix::from_matrix(m.clone(), SimilarityVariant::RectifiedCosine).unwrap();
            if let Ok(z) = zscore_rectify(&s) {
                for (a, b) in [(0usize, 1usize), (1, 3), (2, 4), (0, 4)] {
                    for (c, d) in [(0usize, 2usize), (3, 4), (1, 2)] {
                        if m[[a, b]] > m[[c, d]] {
                            prop_assert!(z.get(a, b) >= z.get(c, d));
                        }
                    }
                }
            }
        }
    }
}
