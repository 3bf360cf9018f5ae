use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use super::{LatticeError, Scalar};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from a nonempty list of equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, LatticeError> {
        let cols = rows.first().map(|r| r.len()).ok_or(LatticeError::Empty)?;
        if cols == 0 {
            return Err(LatticeError::Empty);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(LatticeError::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self, LatticeError> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &T) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(source, j)].clone() * factor.clone();
            self[(target, j)] = self[(target, j)].clone() + v;
        }
    }

    /// col[target] += factor * col[source]
    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &T) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, source)].clone() * factor.clone();
            self[(i, target)] = self[(i, target)].clone() + v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    /// Replaces rows (a, b) by (p*a + q*b, r*a + s*b).
    pub fn combine_rows(&mut self, a: usize, b: usize, [p, q, r, s]: [&T; 4]) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = p.clone() * x.clone() + q.clone() * y.clone();
            self[(b, j)] = r.clone() * x + s.clone() * y;
        }
    }

    /// Replaces columns (a, b) by (p*a + q*b, r*a + s*b).
    pub fn combine_cols(&mut self, a: usize, b: usize, [p, q, r, s]: [&T; 4]) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = p.clone() * x.clone() + q.clone() * y.clone();
            self[(i, b)] = r.clone() * x + s.clone() * y;
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn checked_mul(&self, other: &Matrix<T>) -> Result<Matrix<T>, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * other[(k, j)].clone())
        }))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
