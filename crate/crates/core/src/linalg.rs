//! Small dense linear algebra: row-major matrices, a cyclic Jacobi
//! eigensolver for symmetric matrices, and a thin SVD built on it.
//!
//! Everything here targets desk-scale problems (dimensions in the tens to a
//! few hundred). The Jacobi route is bit-reproducible and dependency-free,
//! which the isometry certification and the solver both rely on.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `Aᵀ x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            let row = self.row(i);
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    /// Submatrix keeping the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    /// Gram matrix `AᵀA`.
    pub fn gram(&self) -> Mat {
        let mut g = Mat::zeros(self.cols, self.cols);
        for j in 0..self.cols {
            for l in j..self.cols {
                let mut s = 0.0;
                for i in 0..self.rows {
                    s += self.get(i, j) * self.get(i, l);
                }
                g.set(j, l, s);
                g.set(l, j, s);
            }
        }
        g
    }

    /// Gram matrix `AAᵀ`.
    pub fn gram_rows(&self) -> Mat {
        let mut g = Mat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for l in i..self.rows {
                let s = self.row(i).iter().zip(self.row(l)).map(|(a, b)| a * b).sum();
                g.set(i, l, s);
                g.set(l, i, s);
            }
        }
        g
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Matching eigenvectors as columns; `None` when not requested.
    pub vectors: Option<Mat>,
}

/// Off-diagonal Frobenius norm used as the Jacobi stopping criterion.
fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a.get(i, j) * a.get(i, j);
        }
    }
    s.sqrt()
}

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi iteration. Sweeps rotate away every off-diagonal entry in
/// turn until the off-diagonal norm falls below `1e-12` relative to the
/// matrix scale.
fn jacobi(a: &Mat, want_vectors: bool) -> SymEigen {
    let n = a.rows();
    assert_eq!(n, a.cols(), "jacobi: matrix must be square");
    let mut a = a.clone();
    let mut v = if want_vectors { Some(Mat::identity(n)) } else { None };
    let scale_ref = a.frobenius().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * scale_ref {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // Smaller-magnitude root of t^2 + 2 t theta - 1 = 0.
                let t = if theta.abs() > 1e153 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // Rotate rows/columns p and q.
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        let new_ip = c * aip - s * aiq;
                        let new_iq = s * aip + c * aiq;
                        a.set(i, p, new_ip);
                        a.set(p, i, new_ip);
                        a.set(i, q, new_iq);
                        a.set(q, i, new_iq);
                    }
                }
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);

                if let Some(vm) = v.as_mut() {
                    for i in 0..n {
                        let vip = vm.get(i, p);
                        let viq = vm.get(i, q);
                        vm.set(i, p, c * vip - s * viq);
                        vm.set(i, q, s * vip + c * viq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = v.map(|vm| {
        let mut sorted = Mat::zeros(n, n);
        for (jj, &j) in order.iter().enumerate() {
            for i in 0..n {
                sorted.set(i, jj, vm.get(i, j));
            }
        }
        sorted
    });
    SymEigen { values, vectors }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    jacobi(a, false).values
}

/// Full symmetric eigendecomposition.
pub fn symmetric_eigen(a: &Mat) -> SymEigen {
    jacobi(a, true)
}

/// Thin singular value decomposition `A = U diag(sigma) Vᵀ` with strictly
/// positive singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub v: Mat,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

const SVD_RANK_REL_TOL: f64 = 1e-12;

/// SVD via the Jacobi eigendecomposition of the smaller Gram matrix.
pub fn svd(a: &Mat) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let small_is_cols = n <= m;
    let gram = if small_is_cols { a.gram() } else { a.gram_rows() };
    let eig = symmetric_eigen(&gram);
    let vecs = eig.vectors.expect("eigenvectors requested");
    let dim = gram.rows();

    let sigma_max = eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let cutoff = sigma_max * SVD_RANK_REL_TOL;

    // Walk eigenvalues from largest down, keeping numerically nonzero ones.
    let mut sigma = Vec::new();
    let mut kept = Vec::new();
    for idx in (0..dim).rev() {
        let s = eig.values[idx].max(0.0).sqrt();
        if s > cutoff && s > 0.0 {
            sigma.push(s);
            kept.push(idx);
        }
    }
    let r = sigma.len();

    let mut side = Mat::zeros(dim, r);
    for (jj, &idx) in kept.iter().enumerate() {
        for i in 0..dim {
            side.set(i, jj, vecs.get(i, idx));
        }
    }

    if small_is_cols {
        // side holds V; U = A V / sigma.
        let mut u = Mat::zeros(m, r);
        for (j, &sig) in sigma.iter().enumerate() {
            let vcol: Vec<f64> = (0..n).map(|i| side.get(i, j)).collect();
            for (i, av) in a.matvec(&vcol).into_iter().enumerate() {
                u.set(i, j, av / sig);
            }
        }
        Svd { u, sigma, v: side }
    } else {
        // side holds U; V = Aᵀ U / sigma.
        let mut v = Mat::zeros(n, r);
        for (j, &sig) in sigma.iter().enumerate() {
            let ucol: Vec<f64> = (0..m).map(|i| side.get(i, j)).collect();
            for (i, atu) in a.tr_matvec(&ucol).into_iter().enumerate() {
                v.set(i, j, atu / sig);
            }
        }
        Svd { u: side, sigma, v }
    }
}
