//! Symmetric normalized Laplacian and its full eigenvalue spectrum.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::EmbeddingSet;
use crate::eigen::symmetric_eigenvalues_in_place;
use crate::error::{Error, Result};
use crate::similarity::{cosine_similarity_matrix, zscore_rectify, SimilarityMatrix};

/// Tolerance for accepting a matrix as symmetric before decomposition.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Wrap values that are already sorted ascending.
    pub fn from_sorted(eigenvalues: Vec<f64>) -> Result<Self> {
        if let Some(i) = eigenvalues.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig("spectrum is not sorted ascending".into()));
        }
        Ok(Self { eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// 1-based access, matching the usual `lambda_1 <= ... <= lambda_n` notation.
    pub fn lambda(&self, i: usize) -> f64 {
        self.eigenvalues[i - 1]
    }
}

fn inverse_sqrt_degrees(s: &SimilarityMatrix) -> Result<Vec<f64>> {
    s.matrix()
        .rows()
        .into_iter()
        .enumerate()
        .map(|(row, r)| {
            let deg: f64 = r.sum();
            if deg > 0.0 {
                Ok(1.0 / deg.sqrt())
            } else {
                Err(Error::ZeroDegree { row })
            }
        })
        .collect()
}

/// Row-major `I - D^{-1/2} S D^{-1/2}` written into a flat buffer.
fn laplacian_buffer(s: &SimilarityMatrix) -> Result<Vec<f64>> {
    let n = s.n();
    let r = inverse_sqrt_degrees(s)?;
    let m = s.matrix();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = -m[[i, j]] * (r[i] * r[j]);
            out[i * n + j] = if i == j { 1.0 + v } else { v };
        }
    }
    Ok(out)
}

/// `L_sym = I - D^{-1/2} S D^{-1/2}` with `D_ii = sum_j S_ij`.
pub fn normalized_laplacian(s: &SimilarityMatrix) -> Result<Array2<f64>> {
    let n = s.n();
    let buf = laplacian_buffer(s)?;
    Ok(Array2::from_shape_vec((n, n), buf).expect("square buffer"))
}

/// All eigenvalues of a symmetric matrix, ascending.
///
/// The input is symmetrized as `(M + M^T) / 2` after checking that its
/// asymmetry does not exceed [`SYMMETRY_TOL`].
pub fn eigenvalues_symmetric(m: &Array2<f64>) -> Result<Spectrum> {
    let (n, c) = m.dim();
    if n != c {
        return Err(Error::Shape(format!("matrix is {n}x{c}")));
    }
    if n < 2 {
        return Err(Error::TooFewPoints { n, required: 2 });
    }
    let mut buf = vec![0.0; n * n];
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (m[[i, j]], m[[j, i]]);
            if !a.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            max_asym = max_asym.max((a - b).abs());
            buf[i * n + j] = 0.5 * (a + b);
        }
    }
    if max_asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { max_asymmetry: max_asym });
    }
    Ok(Spectrum { eigenvalues: symmetric_eigenvalues_in_place(&mut buf, n)? })
}

/// Spectrum of the normalized Laplacian of `s`.
pub fn laplacian_spectrum(s: &SimilarityMatrix) -> Result<Spectrum> {
    let n = s.n();
    if n < 2 {
        return Err(Error::TooFewPoints { n, required: 2 });
    }
    // The buffer is exactly symmetric by construction.
    let mut buf = laplacian_buffer(s)?;
    Ok(Spectrum { eigenvalues: symmetric_eigenvalues_in_place(&mut buf, n)? })
}

/// Cosine similarity, optional z-scoring, normalized Laplacian, eigenvalues.
///
/// When z-scoring is requested but the off-diagonal similarities have no
/// spread, the rectified cosine matrix is used unchanged and a warning is logged.
pub fn compute_eigenvalues(e: &EmbeddingSet, use_zscore: bool) -> Result<Spectrum> {
    let s = similarity_for(e, use_zscore)?;
    laplacian_spectrum(&s)
}

/// The affinity matrix the estimator works on.
pub fn similarity_for(e: &EmbeddingSet, use_zscore: bool) -> Result<SimilarityMatrix> {
    let s = cosine_similarity_matrix(e)?;
    if !use_zscore {
        return Ok(s);
    }
    match zscore_rectify(&s) {
        Ok(z) => Ok(z),
        Err(Error::DegenerateSpread) => {
            log::warn!("z-score skipped: off-diagonal similarities are constant");
            Ok(s)
        }
        Err(err) => Err(err),
    }
}
