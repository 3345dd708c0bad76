//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit-shift QL/QR iteration.
//!
//! The reduction runs top-down and deflation uses the relative test
//! `|e_i|^2 <= ε^2 |d_i d_{i+1}|`. Together these keep small eigenvalues of
//! strongly graded matrices (large entries top-left, tiny entries
//! bottom-right) accurate relative to their own size rather than to `‖A‖`.
//! The Galerkin mass matrices are graded like this.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const MAX_SWEEPS_PER_DIM: usize = 30;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Row `j` is the unit eigenvector belonging to `values[j]`.
    pub vectors: DenseMatrix,
}

/// Rows of length `width`, one per tridiagonal index, rotated together with
/// the QL sweeps. Row `j` ends up holding eigenvector `j` (restricted to the
/// tracked components).
struct Rows {
    width: usize,
    data: Vec<f64>,
}

impl Rows {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        if self.width == 0 {
            return;
        }
        let w = self.width;
        let (lo, hi) = self.data.split_at_mut((i + 1) * w);
        let zi = &mut lo[i * w..];
        let zi1 = &mut hi[..w];
        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
            let f = *b;
            *b = s * *a + c * f;
            *a = c * *a - s * f;
        }
    }

    fn reverse(&mut self, lo: usize, hi: usize) {
        let w = self.width;
        let (mut i, mut j) = (lo, hi);
        while i < j {
            for k in 0..w {
                self.data.swap(i * w + k, j * w + k);
            }
            i += 1;
            j -= 1;
        }
    }
}

#[inline]
fn negligible(e: f64, d1: f64, d2: f64) -> bool {
    let eps = f64::EPSILON;
    e * e <= eps * eps * (d1 * d2).abs() + f64::MIN_POSITIVE
}

struct IterBudget {
    dim: usize,
    used: usize,
    max: usize,
}

/// QL iteration on one unreduced block. `e[k]` couples `k` and `k + 1`;
/// `e[last] == 0`. Large entries are expected toward the bottom.
fn ql_block(d: &mut [f64], e: &mut [f64], rows: &mut Rows, offset: usize, budget: &mut IterBudget) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                if negligible(e[m], d[m], d[m + 1]) {
                    e[m] = 0.0;
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            budget.used += 1;
            if budget.used > budget.max {
                return Err(Error::NoConvergence {
                    dim: budget.dim,
                    index: offset + l,
                    iterations: budget.used,
                    residual: e[l].abs(),
                });
            }

            // Wilkinson-type shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
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
                rows.rotate(offset + i, c, s);
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

/// Diagonalizes the tridiagonal `(d, e)` in place, rotating `rows` along.
/// `e` has the same length as `d`; `e[k]` couples `k` and `k + 1`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], rows: &mut Rows) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let mut budget = IterBudget {
        dim: n,
        used: 0,
        max: MAX_SWEEPS_PER_DIM * n,
    };
    let mut lo = 0;
    while lo < n {
        let mut hi = lo;
        while hi + 1 < n {
            if negligible(e[hi], d[hi], d[hi + 1]) {
                e[hi] = 0.0;
                break;
            }
            hi += 1;
        }
        if hi > lo {
            // QL chases toward the top, so it wants the large end at the bottom.
            let flip = d[hi].abs() < d[lo].abs();
            if flip {
                d[lo..=hi].reverse();
                e[lo..hi].reverse();
                rows.reverse(lo, hi);
            }
            ql_block(&mut d[lo..=hi], &mut e[lo..=hi], rows, lo, &mut budget)?;
            if flip {
                d[lo..=hi].reverse();
                e[lo..hi].reverse();
                rows.reverse(lo, hi);
            }
        }
        lo = hi + 1;
    }
    Ok(())
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Eigenvalues of a symmetric tridiagonal matrix with the first component of
/// each unit eigenvector (what Golub-Welsch needs).
pub fn tridiagonal_eig_first_components(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1), "offdiag must have length n - 1");
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut data = vec![0.0; n];
    if n > 0 {
        data[0] = 1.0;
    }
    let mut rows = Rows { width: 1, data };
    tridiagonal_ql(&mut d, &mut e, &mut rows)?;
    let order = sorted_order(&d);
    Ok((order.iter().map(|&i| d[i]).collect(), order.iter().map(|&i| rows.data[i]).collect()))
}

/// Householder reduction `A = Q T Qᵀ`. Returns `(d, e, Qᵀ)` with `e[k]`
/// coupling `k` and `k + 1` (`e[n-1] = 0`).
fn tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>, Rows) {
    let n = a.dim();
    let mut a = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut reflectors: Vec<(usize, f64, Vec<f64>)> = Vec::new();

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<f64> = (k + 1..n).map(|r| a[(r, k)]).collect();
        let scale = x.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
        let tail_zero = x[1..].iter().all(|&v| v == 0.0);
        if scale == 0.0 || tail_zero {
            e[k] = x[0];
            continue;
        }
        let norm = scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt();
        let alpha = -norm.copysign(x[0]);
        let mut v = x;
        v[0] -= alpha;
        // vᵀv = 2 norm (norm + |x0|) = 2 norm |v0|
        let beta = 1.0 / (norm * v[0].abs());
        e[k] = alpha;

        // p = β B v, w = p - (β/2)(pᵀv) v, B -= v wᵀ + w vᵀ.
        let mut p = vec![0.0; m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + i)[k + 1..];
            *pi = beta * row.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        }
        let kk = 0.5 * beta * p.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..m {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for j in 0..m {
                row[j] -= vi * w[j] + wi * v[j];
            }
        }
        reflectors.push((k, beta, v));
    }
    for (k, dk) in d.iter_mut().enumerate() {
        *dk = a[(k, k)];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)];
    }

    // Qᵀ = H_{n-3} ... H_0, built by right-multiplying the identity.
    let mut qt = DenseMatrix::identity(n);
    for (k, beta, v) in reflectors.iter().rev() {
        for r in k + 1..n {
            let row = &mut qt.row_mut(r)[k + 1..];
            let dot: f64 = row.iter().zip(v).map(|(x, y)| x * y).sum();
            let f = beta * dot;
            for (x, vi) in row.iter_mut().zip(v) {
                *x -= f * vi;
            }
        }
    }
    // Row j of Qᵀ is column j of Q, which is what the QL rotations act on.
    (d, e, Rows { width: n, data: qt.into_vec() })
}

/// Full symmetric eigen-decomposition. Rejects matrices whose asymmetry
/// exceeds `1e-14 · max|a_ij|`.
pub fn sym_eig(matrix: &DenseMatrix) -> Result<SymEig> {
    let n = matrix.dim();
    let (asym, row, col) = matrix.max_asymmetry();
    if asym > 1e-14 * matrix.max_abs() {
        return Err(Error::NotSymmetric {
            row,
            col,
            deviation: asym,
        });
    }
    let (mut d, mut e, mut rows) = tridiagonalize(matrix);
    tridiagonal_ql(&mut d, &mut e, &mut rows)?;
    let order = sorted_order(&d);
    let mut vectors = DenseMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.row_mut(dst).copy_from_slice(&rows.data[src * n..(src + 1) * n]);
    }
    Ok(SymEig {
        values: order.iter().map(|&i| d[i]).collect(),
        vectors,
    })
}
