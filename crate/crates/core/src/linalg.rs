//! Dense real matrices and the symmetric eigensolver behind every spectrum.
//!
//! `eigh` reduces the input to tridiagonal form with Householder reflectors and
//! then diagonalizes the tridiagonal matrix with the implicitly shifted QL
//! algorithm. The output contract (ascending values, orthonormal columns, sign
//! convention) is what the rest of the crate relies on.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors (all of equal length).
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// New matrix made of the selected columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), |i, k| self[(i, idx[k])])
    }

    /// Concatenates matrices with equal row counts side by side.
    pub fn hstack(blocks: &[Matrix]) -> Matrix {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                out.row_mut(i)[offset..offset + b.cols].copy_from_slice(b.row(i));
            }
            offset += b.cols;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, &x) in self.row(i).iter().enumerate() {
                t.data[j * self.rows + i] = x;
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        out
    }

    /// `selfᵀ * other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "t_matmul shape mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, b, &mut out.data[i * other.cols..(i + 1) * other.cols]);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `bᵀ · self · b`: restriction of an operator to the span of `b`'s columns.
    pub fn project(&self, b: &Matrix) -> Matrix {
        let ab = self.matmul(b);
        let mut p = b.t_matmul(&ab);
        p.symmetrize();
        p
    }

    /// Replaces the matrix by `(A + Aᵀ)/2`. Only valid for square matrices.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let n = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = m;
                self.data[j * n + i] = m;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        worst
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Column-wise sums of `|A_ij|^4`, the inverse participation ratios of the columns.
    pub fn column_fourth_moments(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (a, &x) in acc.iter_mut().zip(self.row(i)) {
                let x2 = x * x;
                *a += x2 * x2;
            }
        }
        acc
    }

    /// Column-wise squared norms.
    pub fn column_norms_sq(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (a, &x) in acc.iter_mut().zip(self.row(i)) {
                *a += x * x;
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Relative tolerance on `|A − Aᵀ|` accepted by the eigensolver.
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_QL_SWEEPS: usize = 60;

fn check_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Contract(format!(
            "eigh needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if a.rows == 0 {
        return Err(Error::Contract("eigh needs dimension >= 1".into()));
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL * a.max_abs().max(1.0) {
        return Err(Error::Contract(format!(
            "matrix is not symmetric (max |A - A^T| = {asym:e})"
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues come back ascending. In each eigenvector the entry of largest
/// magnitude (first such index on ties) is positive, which makes the output
/// unique for non-degenerate spectra and deterministic otherwise.
pub fn eigh(a: &Matrix) -> Result<Spectrum> {
    check_symmetric(a)?;
    let n = a.rows;
    let mut work = a.clone();
    let (mut d, mut e, reflectors) = tridiagonalize(&mut work);
    // Rows of `zt` are the columns of the accumulated orthogonal transform.
    let mut zt = accumulate_reflectors(&work, &reflectors).transpose();
    tridiagonal_ql(&mut d, &mut e, Some(&mut zt))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = zt.row(k);
        let mut pivot = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (i, &x) in v.iter().enumerate() {
            vectors[(i, col)] = sign * x;
        }
    }
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only (ascending); skips all eigenvector work.
pub fn eigvalsh(a: &Matrix) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    let mut work = a.clone();
    let (mut d, mut e, _) = tridiagonalize(&mut work);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction `A = Q T Qᵀ`, working on the upper triangle.
///
/// Returns the diagonal, the superdiagonal (padded with a trailing zero) and the
/// scalar factors `τ_k` of the reflectors `I − τ_k v_k v_kᵀ`; `v_k` is left in
/// row `k` of `a`, columns `k+1..`.
fn tridiagonalize(a: &mut Matrix) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = a.rows;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut taus = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x = &a.data[k * n + k + 1..(k + 1) * n];
        let tail: f64 = x[1..].iter().map(|t| t * t).sum();
        if tail == 0.0 {
            e[k] = x[0];
            continue;
        }
        let xnorm = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let v0 = x[0] - alpha;
        let vtv = v0 * v0 + tail;
        let tau = 2.0 / vtv;
        e[k] = alpha;
        taus[k] = tau;
        a.data[k * n + k + 1] = v0;

        let (head, rest) = a.data.split_at_mut((k + 1) * n);
        let v = &head[k * n + k + 1..(k + 1) * n];

        // p = τ A22 v from the upper triangle.
        let p = &mut p[..m];
        p.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..m {
            let row = &rest[i * n + k + 1 + i..(i + 1) * n];
            let vi = v[i];
            let mut acc = row[0] * vi;
            for (off, &aij) in row.iter().enumerate().skip(1) {
                let j = i + off;
                acc += aij * v[j];
                p[j] += aij * vi;
            }
            p[i] += acc;
        }
        let mut pv = 0.0;
        for i in 0..m {
            p[i] *= tau;
            pv += p[i] * v[i];
        }
        let half = 0.5 * tau * pv;
        // p becomes w = p − (τ/2)(pᵀv) v; then A22 −= v wᵀ + w vᵀ.
        for i in 0..m {
            p[i] -= half * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut rest[i * n + k + 1 + i..(i + 1) * n];
            for (off, aij) in row.iter_mut().enumerate() {
                let j = i + off;
                *aij -= vi * p[j] + wi * v[j];
            }
        }
    }
    for k in 0..n {
        d[k] = a.data[k * n + k];
    }
    (d, e, taus)
}

/// Forms `Q = H_0 H_1 ⋯ H_{n−2}` by backward accumulation.
fn accumulate_reflectors(a: &Matrix, taus: &[f64]) -> Matrix {
    let n = a.rows;
    let mut q = Matrix::identity(n);
    let mut u = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        let v = &a.data[k * n + k + 1..(k + 1) * n];
        let lo = k + 1;
        let u = &mut u[lo..n];
        u.iter_mut().for_each(|x| *x = 0.0);
        for (r, &vr) in v.iter().enumerate() {
            axpy(vr, &q.data[(lo + r) * n + lo..(lo + r + 1) * n], u);
        }
        for (r, &vr) in v.iter().enumerate() {
            axpy(-tau * vr, u, &mut q.data[(lo + r) * n + lo..(lo + r + 1) * n]);
        }
    }
    q
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and `e[i]` couples `i` and `i+1`. When `zt` is given,
/// the plane rotations are applied to its rows.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let tnorm = d.iter().zip(e.iter()).map(|(a, b)| a.abs() + b.abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * tnorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} of {n} after {MAX_QL_SWEEPS} \
                     sweeps (residual coupling {:e})",
                    e[l]
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
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
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let cols = z.cols;
                    let (top, bottom) = z.data.split_at_mut((i + 1) * cols);
                    let zi = &mut top[i * cols..];
                    let zi1 = &mut bottom[..cols];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *b = s * x + c * y;
                        *a = c * x - s * y;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Least-squares solution of `design · x ≈ rhs` by Householder QR.
pub fn lstsq(design: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = (design.rows, design.cols);
    if rhs.len() != m {
        return Err(Error::Contract("lstsq rhs length mismatch".into()));
    }
    if m < n {
        return Err(Error::Contract(format!("lstsq underdetermined: {m} rows, {n} unknowns")));
    }
    // Column-major copy keeps each Householder step contiguous.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| design.column(j)).collect();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let xnorm = norm(&cols[k][k..]);
        if xnorm == 0.0 {
            return Err(Error::Numerical("lstsq: rank-deficient design matrix".into()));
        }
        let alpha = if cols[k][k] > 0.0 { -xnorm } else { xnorm };
        let mut v = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        if vtv == 0.0 {
            continue;
        }
        for col in cols.iter_mut().skip(k) {
            let f = 2.0 * dot(&v, &col[k..]) / vtv;
            axpy(-f, &v, &mut col[k..]);
        }
        let f = 2.0 * dot(&v, &b[k..]) / vtv;
        axpy(-f, &v, &mut b[k..]);
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in (k + 1)..n {
            acc -= cols[j][k] * x[j];
        }
        let diag = cols[k][k];
        if diag.abs() <= 1e-14 * cols[0][0].abs().max(1.0) {
            return Err(Error::Numerical("lstsq: rank-deficient design matrix".into()));
        }
        x[k] = acc / diag;
    }
    Ok(x)
}
