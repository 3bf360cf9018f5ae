//! Named families of affine semigroups.

use num_integer::Integer;
use thiserror::Error;

use crate::lattice::{dot, hermite_normal_form, in_row_lattice, kernel_basis, Matrix};
use crate::polyhedral::{saturate, PolyhedralError};
use crate::semigroup::{AffineSemigroup, SemigroupError};
use crate::{Int, LatticeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("construction failed its self-check: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
}

fn int_vec(xs: &[i64]) -> LatticeVector {
    xs.iter().map(|&x| Int::from(x)).collect()
}

/// Numerical semigroup generated by positive integers, rescaled so the gcd is one.
pub fn numerical(gens: &[u64]) -> Result<AffineSemigroup, FamilyError> {
    if gens.is_empty() || gens.contains(&0) {
        return Err(FamilyError::InvalidParameters("numerical semigroups need positive generators".into()));
    }
    let rows: Vec<LatticeVector> = gens.iter().map(|&g| vec![Int::from(g)]).collect();
    Ok(AffineSemigroup::canonicalize(&rows)?)
}

/// Lattice points of `cone{(1,0),(a,b)}`: the cyclic quotient surface singularity.
pub fn cyclic_quotient(a: i64, b: i64) -> Result<AffineSemigroup, FamilyError> {
    if b < 1 || a < 0 || a >= b || a.gcd(&b) != 1 {
        return Err(FamilyError::InvalidParameters(format!("cyclic quotient needs 0 <= a < b, gcd 1; got ({a},{b})")));
    }
    let hb = saturate(&[int_vec(&[1, 0]), int_vec(&[a, b])])?;
    Ok(AffineSemigroup::canonicalize(&hb)?)
}

/// Semigroup of the surface `x^p y^q = z^r`, generated by `(r,0), (0,r), (p,q)`.
pub fn rebassoo(p: i64, q: i64, r: i64) -> Result<AffineSemigroup, FamilyError> {
    if p < 1 || q < 1 || r < 1 || p.gcd(&q).gcd(&r) != 1 {
        return Err(FamilyError::InvalidParameters(format!("need p,q,r >= 1 without common factor; got ({p},{q},{r})")));
    }
    Ok(AffineSemigroup::canonicalize(&[int_vec(&[r, 0]), int_vec(&[0, r]), int_vec(&[p, q])])?)
}

/// Lattice points of the cone over the Reeve tetrahedron with apex height `q`.
pub fn reeve(q: i64) -> Result<AffineSemigroup, FamilyError> {
    if q < 1 {
        return Err(FamilyError::InvalidParameters(format!("reeve needs q >= 1; got {q}")));
    }
    let rays = [[0, 0, 0, 1], [1, 0, 0, 1], [0, 1, 0, 1], [1, 1, q, 1]].map(|r| int_vec(&r));
    Ok(AffineSemigroup::canonicalize(&saturate(&rays)?)?)
}

/// Exponent vectors of the six defining binomials of the four-dimensional toric
/// variety in seven variables, `x^{u+} - x^{u-}` written as `u`.
pub const COUNTEREXAMPLE_BINOMIALS: [[i64; 7]; 6] = [
    [1, 0, -1, 0, -1, 1, 0],
    [0, -1, 0, 1, 0, 1, -1],
    [0, -1, 0, -1, -1, 0, 2],
    [0, -2, 0, 0, -1, 1, 1],
    [-1, -2, 1, 0, 0, 0, 1],
    [-1, -1, 1, 1, 1, 0, -1],
];

/// The seven generators `a_1, ..., a_7` in `Z^4`, in variable order: `a_i` is the
/// `i`-th column of the Hermite basis of the integer kernel of the binomial matrix.
pub fn counterexample_generators() -> Result<Vec<LatticeVector>, FamilyError> {
    let relations: Vec<LatticeVector> = COUNTEREXAMPLE_BINOMIALS.iter().map(|r| int_vec(r)).collect();
    let kernel = kernel_basis(&relations, 7);
    if kernel.len() != 4 {
        return Err(FamilyError::SelfCheck(format!("relation kernel has rank {}, expected 4", kernel.len())));
    }
    let k = Matrix::from_rows(&kernel).expect("kernel rows");
    let gens: Vec<LatticeVector> = (0..7).map(|i| k.column(i)).collect();

    for (n, rel) in relations.iter().enumerate() {
        let combo: LatticeVector = (0..4).map(|j| (0..7).fold(Int::from(0), |acc, i| acc + &rel[i] * &gens[i][j])).collect();
        if combo.iter().any(|x| *x != Int::from(0)) {
            return Err(FamilyError::SelfCheck(format!("binomial {} fails on the generators", n + 1)));
        }
    }
    // The binomials must lie in the full relation lattice of the generators.
    let gen_matrix = Matrix::from_rows(&gens).expect("seven rows");
    let relation_lattice = kernel_basis(&gen_matrix.transpose().to_rows(), 7);
    let hf = hermite_normal_form(&Matrix::from_rows(&relation_lattice).expect("nonempty"));
    if !relations.iter().all(|r| in_row_lattice(&hf, r)) {
        return Err(FamilyError::SelfCheck("a binomial is outside the relation lattice".into()));
    }
    debug_assert!(relations.iter().all(|r| kernel.iter().all(|kv| dot(r, kv) == Int::from(0))));
    Ok(gens)
}

/// The four-dimensional semigroup whose Nash blowup reproduces it in a chart.
pub fn counterexample_x() -> Result<AffineSemigroup, FamilyError> {
    let gens = counterexample_generators()?;
    let s = AffineSemigroup::canonicalize(&gens)?;
    if s.rank() != 4 || s.generators().len() != 7 {
        return Err(FamilyError::SelfCheck(format!("expected 7 generators of rank 4, got {:?}", s)));
    }
    if !s.is_pointed()? {
        return Err(FamilyError::SelfCheck("semigroup is not pointed".into()));
    }
    Ok(s)
}
