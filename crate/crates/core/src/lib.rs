//! Spectral estimation of the number of clusters in embedding collections,
//! K-Means and agglomerative clustering, and a suite of extrinsic and
//! intrinsic quality measures including the Cohesion Ratio.

pub mod cluster;
pub mod data;
pub mod eigen;
pub mod error;
pub mod kestimator;
pub mod metrics;
pub mod seed;
pub mod similarity;
pub mod spectral;
pub mod sweep;
pub mod synth;

pub use ndarray;

pub use cluster::{hac, kmeans, Distance, HacConfig, KMeansConfig, Linkage};
pub use data::{Clustering, Dataset, EmbeddingSet, LabelVector};
pub use error::{Error, Result};
pub use kestimator::{estimate_k, EstimatorConfig, KEstimate};
pub use metrics::{evaluate, EvalOptions, MetricReport};
pub use similarity::{SimilarityMatrix, SimilarityVariant};
pub use spectral::Spectrum;
pub use sweep::{sweep, Algo, SweepConfig, SweepResult};
pub use synth::{generate_spherical_mixture, Balance, MixtureSpec};
