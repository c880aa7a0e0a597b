//! Small dense matrices: products, a cyclic Jacobi eigensolver, rank and null spaces.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::numeric;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
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

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.concat() }
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

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            numeric::compensated_sum((0..self.cols).map(|k| self[(i, k)] * other[(k, j)]))
        })
    }

    /// `self · diag(d) · other`.
    pub fn mul_diag(&self, d: &[f64], other: &Matrix) -> Matrix {
        assert_eq!(self.cols, d.len());
        assert_eq!(d.len(), other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            numeric::compensated_sum((0..self.cols).map(|k| self[(i, k)] * d[k] * other[(k, j)]))
        })
    }

    /// `diag(l) · self · diag(r)`.
    pub fn scale_rows_cols(&self, l: &[f64], r: &[f64]) -> Matrix {
        Self::from_fn(self.rows, self.cols, |i, j| l[i] * self[(i, j)] * r[j])
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| f64::max(m, numeric::abs(a - b)))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenpairs of a real symmetric matrix: `a = V diag(values) Vᵀ`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `n` is the unit eigenvector for `values[n]`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
///
/// Eigenpairs are returned sorted by descending absolute value, ties broken by
/// descending value. Panics on a non-square input.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    assert_eq!(a.rows, a.cols, "eigendecomposition needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    // symmetrize exactly; callers pass symmetric matrices up to rounding
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = m.data.iter().fold(0.0, |acc, x| f64::max(acc, numeric::abs(*x)));
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= (f64::EPSILON * scale) * (f64::EPSILON * scale) || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (numeric::abs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        let (a, b) = (m[(x, x)], m[(y, y)]);
        numeric::abs(b).total_cmp(&numeric::abs(a)).then(b.total_cmp(&a)).then(x.cmp(&y))
    });
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    SymmetricEigen { values, vectors }
}

/// Numerical rank by Gaussian elimination with full pivoting on row-scaled input.
pub fn rank(a: &Matrix, rel_tol: f64) -> usize {
    let mut m = a.clone();
    for i in 0..m.rows {
        let s = m.row(i).iter().fold(0.0, |acc, x| f64::max(acc, numeric::abs(*x)));
        if s > 0.0 {
            for j in 0..m.cols {
                m[(i, j)] /= s;
            }
        }
    }
    let mut r = 0;
    let mut used_cols = vec![false; m.cols];
    let mut used_rows = vec![false; m.rows];
    loop {
        let mut best = (0.0, 0, 0);
        for i in (0..m.rows).filter(|&i| !used_rows[i]) {
            for j in (0..m.cols).filter(|&j| !used_cols[j]) {
                let x = numeric::abs(m[(i, j)]);
                if x > best.0 {
                    best = (x, i, j);
                }
            }
        }
        let (piv, pi, pj) = best;
        if piv <= rel_tol {
            return r;
        }
        used_rows[pi] = true;
        used_cols[pj] = true;
        r += 1;
        for i in (0..m.rows).filter(|&i| !used_rows[i]) {
            let f = m[(i, pj)] / m[(pi, pj)];
            for j in 0..m.cols {
                let x = m[(pi, j)];
                m[(i, j)] -= f * x;
            }
        }
    }
}

/// Orthonormal basis of `{x : a x = 0}`, from the near-zero eigenvectors of `aᵀa`.
///
/// Basis vectors are sign-normalized so that their first entry of magnitude
/// above `1e-12` is positive.
pub fn null_space(a: &Matrix, rel_tol: f64) -> Vec<Vec<f64>> {
    // scale rows first; the null space is unchanged
    let scaled = Matrix::from_fn(a.rows, a.cols, |i, j| {
        let s = a.row(i).iter().fold(0.0, |acc, x| f64::max(acc, numeric::abs(*x)));
        if s > 0.0 {
            a[(i, j)] / s
        } else {
            0.0
        }
    });
    let gram = scaled.transpose().mul(&scaled);
    let eig = symmetric_eigen(&gram);
    let top = eig.values.first().map_or(0.0, |v| numeric::abs(*v));
    let mut basis = Vec::new();
    for (n, &lambda) in eig.values.iter().enumerate() {
        if numeric::abs(lambda) <= rel_tol * top.max(1.0) {
            let mut col = eig.vectors.column(n);
            if let Some(lead) = col.iter().find(|x| numeric::abs(**x) > 1e-12) {
                if *lead < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            basis.push(col);
        }
    }
    basis
}
