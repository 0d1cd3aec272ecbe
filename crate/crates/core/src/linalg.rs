//! Small dense linear algebra: row-major matrices, the normal-equations
//! pseudoinverse and a Thomas-algorithm tridiagonal solver.
//!
//! Everything here is sized for design matrices with a handful of columns
//! and tridiagonal systems of a few thousand unknowns; there is no blocking
//! and no pivoting.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold for the Cholesky factorization used by
/// [`pseudoinverse`]: a pivot below `PIVOT_RTOL * max(diag)` is rank deficient.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be non-empty");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::shape("ragged rows"));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} matrix by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(self
            .data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Self {
        m.to_rows()
    }
}

/// Non-empty vector of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::shape("vector must be non-empty"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "vector must be non-empty");
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::shape(
                "dot product of vectors with different lengths",
            ));
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.0
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Standard matrix product `a * b`.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            let brow = b.row(k);
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// Fails with [`Error::Singular`] when a pivot drops below
/// `PIVOT_RTOL * max(diag(a))`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::shape("cholesky needs a square matrix"));
    }
    let max_diag = (0..n).fold(0.0_f64, |m, i| m.max(a[(i, i)].abs()));
    let threshold = PIVOT_RTOL * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let pivot = a[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if !(pivot > threshold) {
            return Err(Error::Singular(format!(
                "pivot {pivot:e} at column {j} below threshold {threshold:e}"
            )));
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let s = a[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor `L`, in place.
fn cholesky_solve_in_place(l: &DenseMatrix, b: &mut [f64]) {
    let n = l.rows;
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * b[k]).sum();
        b[i] = (b[i] - s) / l[(i, i)];
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[(k, i)] * b[k]).sum();
        b[i] = (b[i] - s) / l[(i, i)];
    }
}

/// Moore-Penrose pseudoinverse `(XᵀX)⁻¹Xᵀ` of a skinny full-column-rank matrix.
///
/// The normal matrix is factored with Cholesky; a rank-deficient `XᵀX`
/// is reported as [`Error::Singular`].
pub fn pseudoinverse(x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows < x.cols {
        return Err(Error::shape(format!(
            "pseudoinverse needs rows >= cols, got {}x{}",
            x.rows, x.cols
        )));
    }
    let xt = x.transpose();
    let normal = matmul(&xt, x)?;
    let l = cholesky(&normal)?;
    // Each column of Xᵀ is solved against XᵀX.
    let mut out = DenseMatrix::zeros(x.cols, x.rows);
    let mut col = vec![0.0; x.cols];
    for j in 0..x.rows {
        for i in 0..x.cols {
            col[i] = xt[(i, j)];
        }
        cholesky_solve_in_place(&l, &mut col);
        for i in 0..x.cols {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// Tridiagonal system `A u = rhs` stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::shape("tridiagonal system must have n >= 1"));
        }
        if sub.len() != n - 1 || sup.len() != n - 1 || rhs.len() != n {
            return Err(Error::shape(format!(
                "inconsistent tridiagonal lengths: sub {}, diag {n}, sup {}, rhs {}",
                sub.len(),
                sup.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            sub,
            diag,
            sup,
            rhs,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `A u` for this system's matrix.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if u.len() != n {
            return Err(Error::shape("vector length does not match system size"));
        }
        Ok((0..n)
            .map(|i| {
                let mut s = self.diag[i] * u[i];
                if i > 0 {
                    s += self.sub[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * u[i + 1];
                }
                s
            })
            .collect())
    }
}

/// Thomas algorithm without pivoting. Requires a system that factors stably
/// without row exchanges, e.g. a diagonally dominant one.
pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<DenseVector> {
    let n = sys.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];

    let mut denom = sys.diag[0];
    if denom == 0.0 {
        return Err(Error::Singular("zero pivot at row 0".into()));
    }
    if n > 1 {
        c[0] = sys.sup[0] / denom;
    }
    d[0] = sys.rhs[0] / denom;
    for i in 1..n {
        denom = sys.diag[i] - sys.sub[i - 1] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Singular(format!("zero pivot at row {i}")));
        }
        if i + 1 < n {
            c[i] = sys.sup[i] / denom;
        }
        d[i] = (sys.rhs[i] - sys.sub[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    DenseVector::new(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_times_a_is_a() {
        let a = DenseMatrix::from_rows(&[vec![1.5, -2.0], vec![0.25, 7.0]]).unwrap();
        assert_eq!(matmul(&DenseMatrix::identity(2), &a).unwrap(), a);
    }

    #[test]
    fn hand_product() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let c = matmul(&a, &b).unwrap();
        assert_eq!(c.to_rows(), vec![vec![3.0], vec![7.0]]);
    }

    #[test]
    fn zero_annihilates() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(matmul(&z, &a).unwrap(), z);
    }

    #[test]
    fn matmul_shape_error() {
        let a = DenseMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &a), Err(Error::Shape(_))));
    }

    #[test]
    fn constructor_rejects_bad_lengths() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseVector::new(vec![]).is_err());
    }

    #[test]
    fn pinv_identity() {
        let p = pseudoinverse(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(p, DenseMatrix::identity(2));
    }

    #[test]
    fn pinv_column_of_ones() {
        let p = pseudoinverse(&DenseMatrix::new(2, 1, vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!((p.rows(), p.cols()), (1, 2));
        assert!(p.as_slice().iter().all(|v| (v - 0.5).abs() < 1e-15));
        let n = 7;
        let p = pseudoinverse(&DenseMatrix::new(n, 1, vec![1.0; n]).unwrap()).unwrap();
        assert_eq!((p.rows(), p.cols()), (1, n));
        for v in p.as_slice() {
            assert!((v - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn pinv_rank_deficient() {
        let x = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![3.0, 1.0], vec![3.0, 1.0]]).unwrap();
        assert!(matches!(pseudoinverse(&x), Err(Error::Singular(_))));
    }

    #[test]
    fn pinv_wide_rejected() {
        assert!(matches!(
            pseudoinverse(&DenseMatrix::zeros(1, 2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn tridiagonal_identity() {
        let r = vec![1.0, -2.0, 3.5];
        let sys =
            TridiagonalSystem::new(vec![0.0; 2], vec![1.0; 3], vec![0.0; 2], r.clone()).unwrap();
        assert_eq!(solve_tridiagonal(&sys).unwrap().into_vec(), r);
    }

    #[test]
    fn tridiagonal_two_by_two() {
        let sys =
            TridiagonalSystem::new(vec![1.0], vec![2.0, 2.0], vec![1.0], vec![3.0, 3.0]).unwrap();
        let u = solve_tridiagonal(&sys).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-15 && (u[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_single_unknown() {
        let sys = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(solve_tridiagonal(&sys).unwrap().into_vec(), vec![0.5]);
    }

    #[test]
    fn tridiagonal_zero_pivot() {
        let sys =
            TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(solve_tridiagonal(&sys), Err(Error::Singular(_))));
        let sys = TridiagonalSystem::new(vec![], vec![0.0], vec![], vec![1.0]).unwrap();
        assert!(solve_tridiagonal(&sys).is_err());
    }

    #[test]
    fn tridiagonal_bad_lengths() {
        assert!(TridiagonalSystem::new(vec![1.0], vec![1.0], vec![], vec![1.0]).is_err());
        assert!(TridiagonalSystem::new(vec![], vec![], vec![], vec![]).is_err());
    }
}
