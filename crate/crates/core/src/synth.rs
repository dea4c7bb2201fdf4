//! Labelled synthetic embeddings on the unit sphere and brute-force oracles.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Clustering, Dataset, EmbeddingSet, LabelVector};
use crate::error::{Error, Result};
use crate::metrics::PairCounts;
use crate::seed;

pub const CENTER_ATTEMPTS: usize = 10_000;
pub const PAIR_ORACLE_LIMIT: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    #[default]
    Equal,
    Dirichlet { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub k: usize,
    pub n: usize,
    pub d: usize,
    /// Per-coordinate standard deviation of the Gaussian perturbation.
    pub sigma: f64,
    /// Minimum pairwise angle between centers, in radians.
    pub min_sep: f64,
    pub balance: Balance,
    pub seed: u64,
}

impl MixtureSpec {
    pub fn new(k: usize, n: usize, d: usize, sigma: f64, seed: u64) -> Self {
        Self { k, n, d, sigma, min_sep: std::f64::consts::FRAC_PI_6, balance: Balance::Equal, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.n < self.k {
            return bad("n must be at least k");
        }
        if self.d < 2 {
            return bad("d must be at least 2");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive and finite");
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.min_sep) {
            return bad("min_sep must lie in [0, pi]");
        }
        if let Balance::Dirichlet { alpha } = self.balance {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return bad("dirichlet alpha must be positive and finite");
            }
        }
        Ok(())
    }
}

fn unit_gaussian<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0).acos()
}

/// Rejection-sample `k` unit centers with pairwise angle at least `min_sep`.
pub fn place_centers<R: Rng>(k: usize, d: usize, min_sep: f64, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0;
    while centers.len() < k {
        if attempts == CENTER_ATTEMPTS {
            return Err(Error::InfeasibleSeparation { k, d, min_sep });
        }
        attempts += 1;
        let c = unit_gaussian(d, rng);
        if centers.iter().all(|o| angle(o, &c) >= min_sep) {
            centers.push(c);
        }
    }
    Ok(centers)
}

/// Class sizes summing to `n`, each at least 1.
pub fn class_sizes<R: Rng>(n: usize, k: usize, balance: Balance, rng: &mut R) -> Result<Vec<usize>> {
    match balance {
        Balance::Equal => Ok((0..k).map(|c| n / k + usize::from(c < n % k)).collect()),
        Balance::Dirichlet { alpha } => {
            if k == 1 {
                return Ok(vec![n]);
            }
            let dir = Dirichlet::new_with_size(alpha, k).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            let p: Vec<f64> = dir.sample(rng);
            // One point per class, the rest by largest remainder.
            let free = (n - k) as f64;
            let mut sizes: Vec<usize> = p.iter().map(|&q| 1 + (q * free).floor() as usize).collect();
            let mut order: Vec<usize> = (0..k).collect();
            let frac = |c: usize| p[c] * free - (p[c] * free).floor();
            order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
            let mut short = n - sizes.iter().sum::<usize>();
            for &c in order.iter().cycle() {
                if short == 0 {
                    break;
                }
                sizes[c] += 1;
                short -= 1;
            }
            Ok(sizes)
        }
    }
}

/// Centers plus a labelled dataset; points are `normalize(center + N(0, sigma^2 I))`
/// in shuffled order.
pub fn generate_with_centers(spec: &MixtureSpec) -> Result<(Dataset, Vec<Vec<f64>>)> {
    spec.validate()?;
    let mut rng = seed::rng_for(spec.seed, 0);
    let centers = place_centers(spec.k, spec.d, spec.min_sep, &mut rng)?;
    let sizes = class_sizes(spec.n, spec.k, spec.balance, &mut rng)?;
    let mut labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
    labels.shuffle(&mut rng);
    let mut x = Array2::<f64>::zeros((spec.n, spec.d));
    for (i, &l) in labels.iter().enumerate() {
        loop {
            let v: Vec<f64> = centers[l].iter().map(|&c| c + spec.sigma * rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-12 {
                for (dst, a) in x.row_mut(i).iter_mut().zip(v) {
                    *dst = a / norm;
                }
                break;
            }
        }
    }
    let name = format!("mixture-k{}-n{}-d{}-s{}-seed{}", spec.k, spec.n, spec.d, spec.sigma, spec.seed);
    let ds = Dataset { name, embeddings: EmbeddingSet::new(x)?, labels: Some(LabelVector::new(labels)?) };
    Ok((ds, centers))
}

pub fn generate_spherical_mixture(spec: &MixtureSpec) -> Result<Dataset> {
    Ok(generate_with_centers(spec)?.0)
}

/// Move each point to a uniformly chosen other cluster with probability
/// `noise_rate`. A cluster left empty takes the lowest-index point of the
/// currently largest cluster (lowest id on ties).
pub fn degrade_clustering(c: &Clustering, noise_rate: f64, seed: u64) -> Result<Clustering> {
    let k = c.k();
    if k < 2 {
        return Err(Error::SingleCluster);
    }
    if !(0.0..=1.0).contains(&noise_rate) {
        return Err(Error::InvalidConfig(format!("noise rate {noise_rate} outside [0, 1]")));
    }
    let mut rng = seed::rng_for(seed, 0);
    let mut assign = c.assignment().to_vec();
    for a in assign.iter_mut() {
        if rng.gen::<f64>() < noise_rate {
            let r = rng.gen_range(0..k - 1);
            *a = if r >= *a { r + 1 } else { r };
        }
    }
    let mut sizes = vec![0usize; k];
    for &a in &assign {
        sizes[a] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..k).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))).expect("k >= 2");
        let i = assign.iter().position(|&a| a == donor).expect("donor is non-empty");
        assign[i] = empty;
        sizes[donor] -= 1;
        sizes[empty] = 1;
    }
    Clustering::new(assign)
}

/// Exhaustive pair enumeration: `(TP, FP, FN, TN)` with "positive" meaning
/// same cluster and "true" meaning same class.
pub fn oracle_pair_counts(l: &LabelVector, c: &Clustering) -> Result<PairCounts> {
    let n = l.len();
    if c.n() != n {
        return Err(Error::LengthMismatch { expected: n, found: c.n() });
    }
    if n > PAIR_ORACLE_LIMIT {
        return Err(Error::TooLarge { n, limit: PAIR_ORACLE_LIMIT });
    }
    let (a, b) = (l.as_slice(), c.assignment());
    let mut p = PairCounts { tp: 0, fp: 0, fn_: 0, tn: 0 };
    for i in 0..n {
        for j in (i + 1)..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => p.tp += 1,
                (false, true) => p.fp += 1,
                (true, false) => p.fn_ += 1,
                (false, false) => p.tn += 1,
            }
        }
    }
    Ok(p)
}
