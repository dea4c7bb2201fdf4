//! The two k-consuming algorithms paired with the estimator.

mod hac;
mod kmeans;

pub use hac::{dendrogram, dendrogram_from_distances, distance_matrix, hac, Dendrogram, Distance, HacConfig, Linkage, Merge};
pub use kmeans::{kmeans, kmeans_fit, KMeansConfig, KMeansFit};
