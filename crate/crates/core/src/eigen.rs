//! Dense symmetric eigenvalues: Householder tridiagonalization followed by
//! implicit QL iteration with Wilkinson-style shifts.
//!
//! The reduction is blocked: reflectors are accumulated over a panel of
//! columns and applied to the trailing block as one rank-2k update, so most
//! steps only read the trailing block.

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of the symmetric `n x n` row-major matrix `a`, ascending.
///
/// `a` is overwritten. Only the lower triangle is read.
pub fn symmetric_eigenvalues_in_place(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n, "buffer does not hold an n x n matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(a, n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reflector for `x`: returns `(v, beta, alpha)` with
/// `(I - beta v v^T) x = alpha e_1`. `beta == 0` means no reflection is needed.
fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let tail: f64 = x[1..].iter().map(|v| v * v).sum();
    let mut v = x.to_vec();
    if tail == 0.0 {
        return (v, 0.0, x[0]);
    }
    let norm = (x[0] * x[0] + tail).sqrt();
    let alpha = if x[0] > 0.0 { -norm } else { norm };
    v[0] -= alpha;
    let vtv = v[0] * v[0] + tail;
    (v, 2.0 / vtv, alpha)
}

const PANEL: usize = 32;
const LANES: usize = 8;

/// Reduce to tridiagonal form. Returns `(diagonal, off_diagonal)` with
/// `off_diagonal[i]` coupling `i` and `i + 1`; the last entry is 0.
pub(crate) fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    // Work on the upper triangle so that column tails are contiguous rows.
    for i in 0..n {
        for j in 0..i {
            a[j * n + i] = a[i * n + j];
        }
    }
    if n == 1 {
        d[0] = a[0];
        return (d, e);
    }

    // Panel reflectors `v` and update vectors `w`, stored full length so the
    // trailing block equals A - sum(v w^T + w v^T).
    let mut vs = vec![vec![0.0; n]; PANEL];
    let mut ws = vec![vec![0.0; n]; PANEL];
    let mut start = 0;
    while start < n - 1 {
        let end = (start + PANEL).min(n - 1);
        for j in start..end {
            let jj = j - start;
            {
                let row = &mut a[j * n + j..(j + 1) * n];
                for p in 0..jj {
                    rank2_update(row, vs[p][j], ws[p][j], &ws[p][j..], &vs[p][j..]);
                }
            }
            d[j] = a[j * n + j];
            let (v, beta, alpha) = householder(&a[j * n + j + 1..(j + 1) * n]);
            e[j] = alpha;
            vs[jj].fill(0.0);
            ws[jj].fill(0.0);
            if beta == 0.0 {
                continue;
            }
            let off = j + 1;
            let mut y = symv_upper(a, n, off, &v);
            for p in 0..jj {
                let wv = dot(&ws[p][off..], &v);
                let vv = dot(&vs[p][off..], &v);
                for ((yi, vp), wp) in y.iter_mut().zip(&vs[p][off..]).zip(&ws[p][off..]) {
                    *yi -= vp * wv + wp * vv;
                }
            }
            // w = beta y - (beta^2/2)(y.v) v
            let kdot = 0.5 * beta * beta * dot(&y, &v);
            for (l, (yi, vi)) in y.iter().zip(&v).enumerate() {
                ws[jj][off + l] = beta * yi - kdot * vi;
            }
            vs[jj][off..].copy_from_slice(&v);
        }
        let width = end - start;
        trailing_update(a, n, end, &vs[..width], &ws[..width]);
        start = end;
    }
    d[n - 1] = a[n * n - 1];
    (d, e)
}

const ROWS: usize = 4;

/// `A[r, c] -= sum_p v_p[r] w_p[c] + w_p[r] v_p[c]` over the upper triangle of
/// rows `from..n`. Rows are processed in groups sharing the panel loads.
fn trailing_update(a: &mut [f64], n: usize, from: usize, vs: &[Vec<f64>], ws: &[Vec<f64>]) {
    let mut r = from;
    while r < n {
        let g = ROWS.min(n - r);
        // Leading triangle of the group, row by row.
        for q in 0..g {
            let row = &mut a[(r + q) * n + r + q..(r + q) * n + r + g];
            for (v, w) in vs.iter().zip(ws) {
                rank2_update(row, v[r + q], w[r + q], &w[r + q..r + g], &v[r + q..r + g]);
            }
        }
        let c0 = r + g;
        if g == ROWS && c0 < n {
            let len = n - c0;
            let mut sv = [[0.0; ROWS]; 2];
            let (block, _) = a[r * n..].split_at_mut(ROWS * n);
            let (r0, rest) = block.split_at_mut(n);
            let (r1, rest) = rest.split_at_mut(n);
            let (r2, r3) = rest.split_at_mut(n);
            let rows = [&mut r0[c0..], &mut r1[c0..], &mut r2[c0..], &mut r3[c0..n]];
            let [x0, x1, x2, x3] = rows;
            let split = len - len % LANES;
            let mut c = 0;
            while c < split {
                let mut acc = [[0.0; LANES]; ROWS];
                acc[0].copy_from_slice(&x0[c..c + LANES]);
                acc[1].copy_from_slice(&x1[c..c + LANES]);
                acc[2].copy_from_slice(&x2[c..c + LANES]);
                acc[3].copy_from_slice(&x3[c..c + LANES]);
                for (v, w) in vs.iter().zip(ws) {
                    sv[0].copy_from_slice(&v[r..r + ROWS]);
                    sv[1].copy_from_slice(&w[r..r + ROWS]);
                    let wc = &w[c0 + c..c0 + c + LANES];
                    let vc = &v[c0 + c..c0 + c + LANES];
                    for q in 0..ROWS {
                        for t in 0..LANES {
                            acc[q][t] -= sv[0][q] * wc[t] + sv[1][q] * vc[t];
                        }
                    }
                }
                x0[c..c + LANES].copy_from_slice(&acc[0]);
                x1[c..c + LANES].copy_from_slice(&acc[1]);
                x2[c..c + LANES].copy_from_slice(&acc[2]);
                x3[c..c + LANES].copy_from_slice(&acc[3]);
                c += LANES;
            }
            for (q, x) in [x0, x1, x2, x3].into_iter().enumerate() {
                for (v, w) in vs.iter().zip(ws) {
                    rank2_update(&mut x[split..], v[r + q], w[r + q], &w[c0 + split..], &v[c0 + split..]);
                }
            }
        } else if c0 < n {
            for q in 0..g {
                let row = &mut a[(r + q) * n + c0..(r + q + 1) * n];
                for (v, w) in vs.iter().zip(ws) {
                    rank2_update(row, v[r + q], w[r + q], &w[c0..], &v[c0..]);
                }
            }
        }
        r += g;
    }
}

/// `row -= s * x + t * y`.
#[inline]
fn rank2_update(row: &mut [f64], s: f64, t: f64, x: &[f64], y: &[f64]) {
    if s == 0.0 && t == 0.0 {
        return;
    }
    for ((r, xi), yi) in row.iter_mut().zip(x).zip(y) {
        *r -= s * xi + t * yi;
    }
}

/// Dot product over four fixed accumulator groups; the summation order
/// depends only on the length.
#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    const W: usize = 4 * LANES;
    let len = x.len().min(y.len());
    let (x, y) = (&x[..len], &y[..len]);
    let split = len - len % W;
    let mut lanes = [[0.0f64; LANES]; 4];
    for (a, b) in x[..split].chunks_exact(W).zip(y[..split].chunks_exact(W)) {
        for (u, acc) in lanes.iter_mut().enumerate() {
            for t in 0..LANES {
                acc[t] += a[u * LANES + t] * b[u * LANES + t];
            }
        }
    }
    let mut acc = lanes.iter().flatten().sum::<f64>();
    for (a, b) in x[split..].iter().zip(&y[split..]) {
        acc += a * b;
    }
    acc
}

/// `A[off.., off..] * x` reading only the upper triangle.
fn symv_upper(a: &[f64], n: usize, off: usize, x: &[f64]) -> Vec<f64> {
    let m = n - off;
    let mut y = vec![0.0; m];
    for i in 0..m {
        let base = (off + i) * n + off + i;
        let diag = a[base];
        let tail = &a[base + 1..(off + i + 1) * n];
        let xi = x[i];
        let (yh, yt) = y.split_at_mut(i + 1);
        let acc = fused_dot_axpy(tail, &x[i + 1..], xi, yt);
        yh[i] += diag * xi + acc;
    }
    y
}

/// Return `r . x` while adding `r * s` into `y`.
#[inline]
fn fused_dot_axpy(r: &[f64], x: &[f64], s: f64, y: &mut [f64]) -> f64 {
    let len = r.len();
    let (x, y) = (&x[..len], &mut y[..len]);
    let split = len - len % LANES;
    let mut lanes = [0.0f64; LANES];
    let (yb, yt) = y.split_at_mut(split);
    for ((a, b), c) in r[..split].chunks_exact(LANES).zip(x[..split].chunks_exact(LANES)).zip(yb.chunks_exact_mut(LANES)) {
        for t in 0..LANES {
            lanes[t] += a[t] * b[t];
            c[t] += a[t] * s;
        }
    }
    let mut acc = lanes.iter().sum::<f64>();
    for ((a, b), c) in r[split..].iter().zip(&x[split..]).zip(yt) {
        acc += a * b;
        *c += a * s;
    }
    acc
}

/// `sqrt(a^2 + b^2)`, falling back to the scaled form near overflow or underflow.
#[inline]
fn pythag(a: f64, b: f64) -> f64 {
    let s = a * a + b * b;
    if s.is_finite() && s > 1e-280 {
        s.sqrt()
    } else {
        a.hypot(b)
    }
}

/// Implicit QL on a symmetric tridiagonal matrix, eigenvalues only.
///
/// `e[i]` couples `d[i]` and `d[i + 1]`. On return `d` holds the eigenvalues
/// (unordered) and `e` is destroyed.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
