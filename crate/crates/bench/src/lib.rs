//! Shared inputs for the benchmarks.

use specclust::{generate_spherical_mixture, Dataset, MixtureSpec};

/// A seeded unit-sphere mixture with 64-dimensional points.
pub fn mixture(k: usize, n: usize, seed: u64) -> Dataset {
    generate_spherical_mixture(&MixtureSpec::new(k, n, 64, 0.15, seed)).expect("valid mixture spec")
}
