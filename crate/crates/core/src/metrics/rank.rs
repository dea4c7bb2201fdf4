use crate::error::{Error, Result};

/// 1-based ranks; tied values share their mean rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        let r = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::TooFewPoints { n: x.len(), required: 3 });
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_and_antitone() {
        let x = [0.5, 1.0, 3.0, 7.0, 8.5];
        assert!((spearman(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().rev().copied().collect();
        assert!((spearman(&x, &y).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ties_share_rank() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ZeroVariance));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn monotone_transform_keeps_spearman(
            x in prop::collection::vec(-100.0f64..100.0, 3..40),
            y in prop::collection::vec(-100.0f64..100.0, 40),
        ) {
            let y = &y[..x.len()];
            if let Ok(r) = spearman(&x, y) {
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
                let cubed: Vec<f64> = x.iter().map(|v| v * v * v + 2.0).collect();
                prop_assert!((spearman(&cubed, y).unwrap() - r).abs() < 1e-12);
                prop_assert!((spearman(y, &x).unwrap() - r).abs() < 1e-12);
            }
        }

        #[test]
        fn ranks_sum_to_triangular(x in prop::collection::vec(0u8..10, 1..50)) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let n = x.len() as f64;
            prop_assert!((average_ranks(&x).iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        }
    }
}
