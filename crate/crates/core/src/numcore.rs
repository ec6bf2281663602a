//! Dense linear-algebra and statistics kernel for the classifiers.
//!
//! Feature counts in this toolkit stay tiny (p <= 7), so everything here is
//! plain dense arithmetic over row-major `Vec<f64>`. The kernel reports
//! non-positive-definite matrices faithfully; regularization policy belongs
//! to callers.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            data,
            rows: n_rows,
            cols: n_cols,
        }
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

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `self + eps * I`, used by callers to ridge near-singular covariances.
    pub fn add_ridge(&self, eps: f64) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] += eps;
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Sample mean and covariance of one group.
#[derive(Debug, Clone)]
pub struct MeanCov {
    pub mean: Vec<f64>,
    pub cov: Matrix,
    pub n: usize,
}

/// Sample mean and unbiased covariance (divisor n-1), two-pass.
pub fn mean_cov(rows: &Matrix) -> Result<MeanCov> {
    let (n, p) = (rows.rows(), rows.cols());
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let mut mean = vec![0.0; p];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(rows.row(i)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = Matrix::zeros(p, p);
    let mut centered = vec![0.0; p];
    for i in 0..n {
        for (c, (x, m)) in centered.iter_mut().zip(rows.row(i).iter().zip(&mean)) {
            *c = x - m;
        }
        for a in 0..p {
            for b in a..p {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    let denom = (n - 1) as f64;
    for a in 0..p {
        for b in a..p {
            cov[(a, b)] /= denom;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    Ok(MeanCov { mean, cov, n })
}

/// Pooled covariance ((n1-1)*S1 + (n2-1)*S2) / (n1+n2-2).
pub fn pooled_cov(g1: &MeanCov, g2: &MeanCov) -> Result<Matrix> {
    if g1.n + g2.n <= 2 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: g1.n + g2.n,
        });
    }
    let p = g1.cov.rows();
    assert_eq!(p, g2.cov.rows(), "group dimension mismatch");
    let (w1, w2) = ((g1.n - 1) as f64, (g2.n - 1) as f64);
    let denom = w1 + w2;
    let mut out = Matrix::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            out[(a, b)] = (w1 * g1.cov[(a, b)] + w2 * g2.cov[(a, b)]) / denom;
        }
    }
    Ok(out)
}

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// Stores the lower factor L with A = L L^T and the log-determinant
/// 2 * sum(log L_ii). A non-positive pivot surfaces as
/// [`Error::NotPositiveDefinite`] carrying the offending pivot index.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
    logdet: f64,
}

impl Cholesky {
    pub fn new(a: &Matrix) -> Result<Self> {
        let p = a.rows();
        assert_eq!(p, a.cols(), "matrix must be square");
        let mut l = Matrix::zeros(p, p);
        let mut logdet = 0.0;
        for j in 0..p {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let diag = d.sqrt();
            l[(j, j)] = diag;
            logdet += 2.0 * diag.ln();
            for i in j + 1..p {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / diag;
            }
        }
        Ok(Cholesky { lower: l, logdet })
    }

    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let p = self.dim();
        assert_eq!(b.len(), p);
        // forward: L y = b
        let mut y = b.to_vec();
        for i in 0..p {
            for k in 0..i {
                y[i] -= self.lower[(i, k)] * y[k];
            }
            y[i] /= self.lower[(i, i)];
        }
        // backward: L^T x = y
        for i in (0..p).rev() {
            for k in i + 1..p {
                y[i] -= self.lower[(k, i)] * y[k];
            }
            y[i] /= self.lower[(i, i)];
        }
        y
    }

    /// Solve A X = B column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        let p = self.dim();
        assert_eq!(b.rows(), p);
        let mut out = Matrix::zeros(p, b.cols());
        let mut col = vec![0.0; p];
        for j in 0..b.cols() {
            for i in 0..p {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..p {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    /// Quadratic form v^T A^{-1} v without forming the inverse.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let p = self.dim();
        assert_eq!(v.len(), p);
        // L w = v, then |w|^2
        let mut w = v.to_vec();
        let mut acc = 0.0;
        for i in 0..p {
            for k in 0..i {
                w[i] -= self.lower[(i, k)] * w[k];
            }
            w[i] /= self.lower[(i, i)];
            acc += w[i] * w[i];
        }
        acc
    }
}

/// Column transform fitted on training data: center and scale to unit sd.
#[derive(Debug, Clone)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Standardizer {
    /// Fit on training columns. A zero-variance column is an error.
    pub fn fit(train: &Matrix) -> Result<Self> {
        let mc = mean_cov(train)?;
        let mut sd = Vec::with_capacity(train.cols());
        for j in 0..train.cols() {
            let v = mc.cov[(j, j)];
            if v <= 0.0 {
                return Err(Error::ZeroVariance { column: j });
            }
            sd.push(v.sqrt());
        }
        Ok(Standardizer { mean: mc.mean, sd })
    }

    pub fn apply(&self, rows: &Matrix) -> Matrix {
        let mut out = rows.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for (j, x) in row.iter_mut().enumerate() {
                *x = (*x - self.mean[j]) / self.sd[j];
            }
        }
        out
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, x)| (x - self.mean[j]) / self.sd[j])
            .collect()
    }

    pub fn invert_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, x)| x * self.sd[j] + self.mean[j])
            .collect()
    }
}
