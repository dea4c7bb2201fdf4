//! Reference implementations used only by tests. None of these share code
//! with the library paths they check.
#![allow(dead_code, clippy::needless_range_loop)]

/// Number of eigenvalues of symmetric `a` strictly below `x`, from the inertia
/// of a Bunch-Parlett (complete symmetric pivoting) LDL^T factorization of
/// `a - x I` (Sylvester's law of inertia).
pub fn count_below(a: &[Vec<f64>], x: f64) -> usize {
    const ALPHA: f64 = 0.6404; // (1 + sqrt(17)) / 8
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= x;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut negatives = 0;
    while !active.is_empty() {
        let (mut di, mut dmax) = (active[0], -1.0f64);
        for &i in &active {
            if m[i][i].abs() > dmax {
                dmax = m[i][i].abs();
                di = i;
            }
        }
        let (mut oi, mut oj, mut omax) = (0, 0, -1.0f64);
        for (p, &i) in active.iter().enumerate() {
            for &j in &active[p + 1..] {
                if m[i][j].abs() > omax {
                    omax = m[i][j].abs();
                    oi = i;
                    oj = j;
                }
            }
        }
        if omax <= 0.0 || dmax >= ALPHA * omax {
            // 1x1 pivot.
            let piv = if m[di][di] == 0.0 { -f64::MIN_POSITIVE } else { m[di][di] };
            if piv < 0.0 {
                negatives += 1;
            }
            active.retain(|&i| i != di);
            let prow = m[di].clone();
            for &i in &active {
                let f = prow[i] / piv;
                for &j in &active {
                    m[i][j] -= f * prow[j];
                }
            }
        } else {
            // 2x2 pivot on (oi, oj).
            let (a11, a12, a22) = (m[oi][oi], m[oi][oj], m[oj][oj]);
            let det = a11 * a22 - a12 * a12;
            if det < 0.0 {
                negatives += 1;
            } else if a11 + a22 < 0.0 {
                negatives += 2;
            }
            active.retain(|&i| i != oi && i != oj);
            let (r1, r2) = (m[oi].clone(), m[oj].clone());
            for &i in &active {
                // [f1 f2] = [r1_i r2_i] * inv([[a11, a12], [a12, a22]])
                let f1 = (r1[i] * a22 - r2[i] * a12) / det;
                let f2 = (r2[i] * a11 - r1[i] * a12) / det;
                for &j in &active {
                    m[i][j] -= f1 * r1[j] + f2 * r2[j];
                }
            }
        }
    }
    negatives
}

/// All eigenvalues of symmetric `a` by bisection on the inertia count.
pub fn bisection_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, row) in a.iter().enumerate() {
        let r: f64 = row.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.abs()).sum();
        lo = lo.min(row[i] - r);
        hi = hi.max(row[i] + r);
    }
    lo -= 1.0;
    hi += 1.0;
    (0..n)
        .map(|k| {
            // Smallest x with count_below(x) > k.
            let (mut l, mut h) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                if mid <= l || mid >= h {
                    break;
                }
                if count_below(a, mid) > k {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            0.5 * (l + h)
        })
        .collect()
}

/// Classical cyclic Jacobi rotations; a second, unrelated reference.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

/// All unordered pairs `(TP, FP, FN, TN)` by direct enumeration.
pub fn pair_counts(labels: &[usize], clusters: &[usize]) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fneg, mut tn) = (0, 0, 0, 0);
    for i in 0..labels.len() {
        for j in (i + 1)..labels.len() {
            match (labels[i] == labels[j], clusters[i] == clusters[j]) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fneg += 1,
                (false, false) => tn += 1,
            }
        }
    }
    (tp, fp, fneg, tn)
}

/// Entropy-definition homogeneity, completeness and arithmetic-mean NMI.
pub fn entropy_scores(labels: &[usize], clusters: &[usize]) -> (f64, f64, f64) {
    use std::collections::HashMap;
    let n = labels.len() as f64;
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut pc: HashMap<usize, u64> = HashMap::new();
    let mut pk: HashMap<usize, u64> = HashMap::new();
    for (&c, &k) in labels.iter().zip(clusters) {
        *joint.entry((c, k)).or_default() += 1;
        *pc.entry(c).or_default() += 1;
        *pk.entry(k).or_default() += 1;
    }
    let prob = |m: HashMap<usize, u64>| -> HashMap<usize, f64> { m.into_iter().map(|(key, v)| (key, v as f64 / n)).collect() };
    let (pc, pk) = (prob(pc), prob(pk));
    let joint: HashMap<(usize, usize), f64> = joint.into_iter().map(|(key, v)| (key, v as f64 / n)).collect();
    let h = |m: &HashMap<usize, f64>| -> f64 { m.values().map(|p| -p * p.ln()).sum() };
    let (hc, hk) = (h(&pc), h(&pk));
    let mi: f64 = joint.iter().map(|(&(c, k), &p)| p * (p / (pc[&c] * pk[&k])).ln()).sum();
    let hom = if hc == 0.0 { 1.0 } else { mi / hc };
    let com = if hk == 0.0 { 1.0 } else { mi / hk };
    let nmi = if hc == 0.0 && hk == 0.0 { 1.0 } else { 2.0 * mi / (hc + hk) };
    (hom, com, nmi)
}
