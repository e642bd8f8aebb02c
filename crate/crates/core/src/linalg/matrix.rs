use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::scalar::{Rational, Scalar, ScalarMode};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("{rows}x{cols} matrix has no entries")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn diagonal(values: &[S]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
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

    pub fn mode(&self) -> ScalarMode {
        S::MODE
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Matrix product. Zero entries of `self` are skipped, so products with
    /// block-sparse operators cost O(nnz * cols).
    pub fn matmul(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = other.row(k);
                let orow: &mut [S] = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    if !b.is_zero() {
                        *o = o.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    fn zip_with(&self, other: &Matrix<S>, f: impl Fn(&S, &S) -> S) -> Result<Matrix<S>> {
        self.check_same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    fn check_same_shape(&self, other: &Matrix<S>) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `self^n` for square matrices; `n = 0` gives the identity.
    pub fn pow(&self, n: usize) -> Result<Matrix<S>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..n {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest absolute entry, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
    }

    /// Max absolute column sum (the `l^1 -> l^1` operator norm).
    pub fn max_abs_column_sum(&self) -> S {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(S::zero(), |acc, i| acc + self[(i, j)].abs()))
            .fold(S::zero(), |best, s| if s > best { s } else { best })
    }

    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Matrix<S> {
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(row0 + i, col0 + j)].clone();
            }
        }
        out
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &Matrix<S>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row0 + i, col0 + j)] = block[(i, j)].clone();
            }
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| format!("{x:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Block-diagonal assembly of square blocks.
pub fn block_diag<S: Scalar>(blocks: &[Matrix<S>]) -> Result<Matrix<S>> {
    if blocks.is_empty() {
        return Err(Error::Empty("block_diag needs at least one block"));
    }
    if let Some(b) = blocks.iter().find(|b| !b.is_square()) {
        return Err(Error::DimensionMismatch(format!("block {}x{} is not square", b.rows(), b.cols())));
    }
    let n: usize = blocks.iter().map(Matrix::rows).sum();
    let mut out = Matrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        out.set_block(offset, offset, b);
        offset += b.rows();
    }
    Ok(out)
}

/// Max-absolute-entry difference. Exact matrices return 0 iff entrywise
/// equal.
pub fn operator_residual<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

/// A matrix whose scalar mode is only known at runtime (parsed input).
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorMatrix {
    Exact(Matrix<Rational>),
    Float(Matrix<f64>),
}

impl OperatorMatrix {
    pub fn mode(&self) -> ScalarMode {
        match self {
            OperatorMatrix::Exact(_) => ScalarMode::Exact,
            OperatorMatrix::Float(_) => ScalarMode::Float,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            OperatorMatrix::Exact(m) => (m.rows(), m.cols()),
            OperatorMatrix::Float(m) => (m.rows(), m.cols()),
        }
    }

    pub fn to_float(&self) -> OperatorMatrix {
        match self {
            OperatorMatrix::Exact(m) => OperatorMatrix::Float(m.to_f64()),
            OperatorMatrix::Float(m) => OperatorMatrix::Float(m.clone()),
        }
    }

    pub fn as_f64(&self) -> Matrix<f64> {
        match self {
            OperatorMatrix::Exact(m) => m.to_f64(),
            OperatorMatrix::Float(m) => m.clone(),
        }
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        match (self, other) {
            (OperatorMatrix::Exact(a), OperatorMatrix::Exact(b)) => Ok(OperatorMatrix::Exact(a.matmul(b)?)),
            (OperatorMatrix::Float(a), OperatorMatrix::Float(b)) => Ok(OperatorMatrix::Float(a.matmul(b)?)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn residual(&self, other: &OperatorMatrix) -> Result<f64> {
        match (self, other) {
            (OperatorMatrix::Exact(a), OperatorMatrix::Exact(b)) => operator_residual(a, b),
            (OperatorMatrix::Float(a), OperatorMatrix::Float(b)) => operator_residual(a, b),
            _ => Err(Error::ModeMismatch),
        }
    }
}

impl From<Matrix<Rational>> for OperatorMatrix {
    fn from(m: Matrix<Rational>) -> Self {
        OperatorMatrix::Exact(m)
    }
}

impl From<Matrix<f64>> for OperatorMatrix {
    fn from(m: Matrix<f64>) -> Self {
        OperatorMatrix::Float(m)
    }
}
