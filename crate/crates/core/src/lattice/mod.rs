//! Exact integer and rational linear algebra over lattices.
//!
//! Everything here is generic over an exact integer [`Scalar`]. The crate root
//! fixes the working type to [`num_bigint::BigInt`]; machine integers are used
//! only on hot paths where a magnitude bound has been checked beforehand.

mod lp;
mod matrix;
mod normal_form;
mod solve;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use thiserror::Error;

pub use lp::{cone_contains, strict_separation, Constraint, LinearProgram, Relation};
pub use matrix::Matrix;
pub use normal_form::{hermite_normal_form, kernel_basis, smith_normal_form, HermiteForm, SmithForm};
pub use solve::{solve_rational, LinearSolution};

/// Exact signed integer usable as a lattice coordinate.
pub trait Scalar:
    Clone + Debug + Display + Eq + Ord + Hash + Signed + Integer + FromPrimitive + ToPrimitive + Send + Sync
{
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Eq + Ord + Hash + Signed + Integer + FromPrimitive + ToPrimitive + Send + Sync
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant<T: Scalar>(m: &Matrix<T>) -> Result<T, LatticeError> {
    if m.rows() != m.cols() {
        return Err(LatticeError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(T::one());
    }
    let mut a: Vec<Vec<T>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut sign_flip = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign_flip = !sign_flip;
                }
                None => return Ok(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = v / prev.clone();
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign_flip { -det } else { det })
}

/// Classical adjugate, `m * adj(m) = det(m) * I`.
pub fn adjugate<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.rows();
    if n == 1 {
        return Matrix::identity(1);
    }
    Matrix::from_fn(n, n, |i, j| {
        let minor = Matrix::from_fn(n - 1, n - 1, |a, b| {
            let r = if a < j { a } else { a + 1 };
            let c = if b < i { b } else { b + 1 };
            m[(r, c)].clone()
        });
        let d = determinant(&minor).expect("square");
        if (i + j) % 2 == 0 {
            d
        } else {
            -d
        }
    })
}

/// Determinant of the square matrix whose rows are `rows`.
pub fn det_rows<T: Scalar>(rows: &[&[T]]) -> T {
    let n = rows.len();
    let m = Matrix::from_fn(n, n, |i, j| rows[i][j].clone());
    determinant(&m).expect("square by construction")
}

/// Rank of a list of vectors over the rationals.
pub fn rank<T: Scalar>(vectors: &[Vec<T>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = Matrix::from_rows(vectors).expect("consistent lengths");
    hermite_normal_form(&m).rank
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn content<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |g, x| g.gcd(x))
}

/// Divides out the content, leaving a primitive vector (zero stays zero).
pub fn primitive<T: Scalar>(v: &[T]) -> Vec<T> {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x.clone() / g.clone()).collect()
}

/// Clears denominators of a rational vector and returns the primitive integer multiple
/// with the same direction.
pub fn clear_denominators<T: Scalar>(v: &[Ratio<T>]) -> Vec<T> {
    let l = v.iter().fold(T::one(), |l, x| l.lcm(x.denom()));
    let scaled: Vec<T> = v.iter().map(|x| x.numer().clone() * (l.clone() / x.denom().clone())).collect();
    primitive(&scaled)
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn neg<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn is_zero_vec<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Row vector times matrix.
pub fn vec_mul<T: Scalar>(v: &[T], m: &Matrix<T>) -> Vec<T> {
    (0..m.cols())
        .map(|j| (0..m.rows()).fold(T::zero(), |acc, i| acc + v[i].clone() * m[(i, j)].clone()))
        .collect()
}

/// Membership in the Z-span of the rows of a Hermite normal form.
///
/// `hnf` must be in row echelon form with nonzero rows first.
pub fn in_row_lattice<T: Scalar>(hnf: &HermiteForm<T>, v: &[T]) -> bool {
    let mut w = v.to_vec();
    let mut col = 0;
    for (r, &p) in hnf.pivots.iter().enumerate() {
        while col < p {
            if !w[col].is_zero() {
                return false;
            }
            col += 1;
        }
        let row = hnf.h.row(r);
        let (q, rem) = w[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return false;
        }
        if !q.is_zero() {
            for (x, y) in w.iter_mut().zip(row) {
                *x = x.clone() - q.clone() * y.clone();
            }
        }
        col = p + 1;
    }
    w[col.min(w.len())..].iter().all(|x| x.is_zero())
}

/// Canonical representative of `v` modulo the row lattice of a Hermite normal form:
/// every pivot coordinate is brought into `[0, pivot)`.
pub fn reduce_modulo<T: Scalar>(hnf: &HermiteForm<T>, v: &[T]) -> Vec<T> {
    let mut w = v.to_vec();
    for (r, &p) in hnf.pivots.iter().enumerate() {
        let row = hnf.h.row(r);
        let q = w[p].div_floor(&row[p]);
        if !q.is_zero() {
            for (x, y) in w.iter_mut().zip(row) {
                *x = x.clone() - q.clone() * y.clone();
            }
        }
    }
    w
}
