use num_rational::Ratio;
use num_traits::{One, Zero};

use super::{kernel_basis, LatticeError, Matrix, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution<T: Clone + num_integer::Integer> {
    Unique(Vec<Ratio<T>>),
    /// Rank-deficient system: one particular solution plus an integer basis of the kernel.
    Underdetermined { particular: Vec<Ratio<T>>, kernel: Vec<Vec<T>> },
    NoSolution,
}

impl<T: Scalar> LinearSolution<T> {
    pub fn unique(self) -> Option<Vec<Ratio<T>>> {
        match self {
            LinearSolution::Unique(x) => Some(x),
            _ => None,
        }
    }
}

/// Solves `a * x = b` over the rationals by exact Gauss-Jordan elimination.
pub fn solve_rational<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<LinearSolution<T>, LatticeError> {
    if b.len() != a.rows() {
        return Err(LatticeError::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let (rows, cols) = (a.rows(), a.cols());
    let mut t: Vec<Vec<Ratio<T>>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Ratio<T>> = a.row(i).iter().map(|x| Ratio::from_integer(x.clone())).collect();
            r.push(Ratio::from_integer(b[i].clone()));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !t[i][col].is_zero()) else {
            continue;
        };
        t.swap(r, p);
        let inv = Ratio::one() / t[r][col].clone();
        for x in t[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !t[i][col].is_zero() {
                let f = t[i][col].clone();
                for j in col..=cols {
                    let v = t[r][j].clone() * f.clone();
                    t[i][j] = t[i][j].clone() - v;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    if t[r..].iter().any(|row| !row[cols].is_zero()) {
        return Ok(LinearSolution::NoSolution);
    }
    let mut x = vec![Ratio::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = t[i][cols].clone();
    }
    if pivots.len() == cols {
        Ok(LinearSolution::Unique(x))
    } else {
        Ok(LinearSolution::Underdetermined { particular: x, kernel: kernel_basis(&a.to_rows(), cols) })
    }
}
