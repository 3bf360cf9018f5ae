//! Rational polyhedral cones: generator/facet duality, lineality, Hilbert bases.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{
    adjugate, determinant, dot, hermite_normal_form, is_zero_vec, kernel_basis, primitive, rank, smith_normal_form,
    solve_rational, sub, vec_mul, LatticeError, Matrix,
};
use crate::{Int, LatticeVector};

/// Largest ambient rank accepted by the double description routines.
pub const MAX_RANK: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyhedralError {
    #[error("ambient rank {0} exceeds the supported maximum of {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("cone is not pointed; quotient by its lineality lattice first")]
    NotPointed,
    #[error("all generators are zero")]
    ZeroGenerators,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Inequality description `{x : a.x >= 0 for a in inequalities, e.x = 0 for e in equations}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspaces {
    pub inequalities: Vec<LatticeVector>,
    pub equations: Vec<LatticeVector>,
}

impl Halfspaces {
    pub fn contains(&self, v: &[Int]) -> bool {
        self.inequalities.iter().all(|a| !dot(a, v).is_negative()) && self.equations.iter().all(|e| dot(e, v).is_zero())
    }
}

/// A rational polyhedral cone given by ray generators; the facet side is computed lazily.
#[derive(Debug, Clone)]
pub struct Cone {
    dim: usize,
    rays: Vec<LatticeVector>,
    halfspaces: OnceLock<Halfspaces>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl Cone {
    pub fn new(dim: usize, rays: Vec<LatticeVector>) -> Result<Self, PolyhedralError> {
        if let Some(bad) = rays.iter().find(|r| r.len() != dim) {
            return Err(LatticeError::DimensionMismatch { expected: dim, found: bad.len() }.into());
        }
        Ok(Cone { dim, rays, halfspaces: OnceLock::new() })
    }

    pub fn from_rays(rays: Vec<LatticeVector>) -> Result<Self, PolyhedralError> {
        let dim = rays.first().map(|r| r.len()).ok_or(PolyhedralError::ZeroGenerators)?;
        Self::new(dim, rays)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn halfspaces(&self) -> Result<&Halfspaces, PolyhedralError> {
        if let Some(h) = self.halfspaces.get() {
            return Ok(h);
        }
        if self.dim > MAX_RANK {
            return Err(PolyhedralError::RankTooLarge(self.dim));
        }
        let (lineality, rays) = double_description(self.dim, &self.rays);
        Ok(self.halfspaces.get_or_init(|| Halfspaces { inequalities: rays, equations: lineality }))
    }

    pub fn contains(&self, v: &[Int]) -> Result<bool, PolyhedralError> {
        Ok(self.halfspaces()?.contains(v))
    }

    /// Whether the cone is the origin alone.
    pub fn is_zero(&self) -> bool {
        self.rays.iter().all(|r| is_zero_vec(r))
    }

    /// Lattice basis of the saturated lineality lattice `(C ∩ -C) ∩ Z^d`.
    pub fn lineality_basis(&self) -> Result<Vec<LatticeVector>, PolyhedralError> {
        let h = self.halfspaces()?;
        let rows: Vec<LatticeVector> = h.inequalities.iter().chain(&h.equations).cloned().collect();
        Ok(kernel_basis(&rows, self.dim))
    }

    /// Primitive generators of the extreme rays of a pointed cone, sorted.
    pub fn extreme_rays(&self) -> Result<Vec<LatticeVector>, PolyhedralError> {
        if !self.lineality_basis()?.is_empty() {
            return Err(PolyhedralError::NotPointed);
        }
        let h = self.halfspaces()?;
        let candidates: BTreeSet<LatticeVector> =
            self.rays.iter().filter(|r| !is_zero_vec(r)).map(|r| primitive(r)).collect();
        Ok(candidates
            .into_iter()
            .filter(|r| {
                let tight: Vec<LatticeVector> =
                    h.inequalities.iter().filter(|a| dot(a, r).is_zero()).chain(&h.equations).cloned().collect();
                rank(&tight) + 1 == self.dim
            })
            .collect())
    }
}

/// Generators `(lineality, rays)` of `{x : a.x >= 0 for all a in constraints}`.
///
/// Incremental double description with the combinatorial adjacency test. Lineality
/// vectors come back as a saturated lattice basis, rays as primitive vectors reduced
/// modulo the lineality space, sorted lexicographically.
fn double_description(dim: usize, constraints: &[LatticeVector]) -> (Vec<LatticeVector>, Vec<LatticeVector>) {
    let mut lineality: Vec<LatticeVector> = Matrix::<Int>::identity(dim).to_rows();
    let mut rays: Vec<LatticeVector> = Vec::new();
    let mut processed: Vec<&LatticeVector> = Vec::new();

    for a in constraints.iter().filter(|a| !is_zero_vec(a)) {
        if let Some(k) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lineality.remove(k);
            let mut al = dot(a, &l);
            if al.is_negative() {
                l = l.iter().map(|x| -x).collect();
                al = -al;
            }
            let project = |v: &mut LatticeVector| {
                let c = dot(a, v);
                if !c.is_zero() {
                    let w: LatticeVector = v.iter().zip(&l).map(|(x, y)| &al * x - &c * y).collect();
                    *v = primitive(&w);
                }
            };
            lineality.iter_mut().for_each(project);
            rays.iter_mut().for_each(project);
            rays.push(l);
        } else {
            let zero_sets: Vec<Vec<bool>> =
                rays.iter().map(|r| processed.iter().map(|c| dot(c, r).is_zero()).collect()).collect();
            let values: Vec<Int> = rays.iter().map(|r| dot(a, r)).collect();
            let mut next: Vec<LatticeVector> =
                rays.iter().zip(&values).filter(|(_, v)| !v.is_negative()).map(|(r, _)| r.clone()).collect();
            for (p, vp) in values.iter().enumerate().filter(|(_, v)| v.is_positive()) {
                for (n, vn) in values.iter().enumerate().filter(|(_, v)| v.is_negative()) {
                    let common: Vec<bool> = zero_sets[p].iter().zip(&zero_sets[n]).map(|(x, y)| *x && *y).collect();
                    let blocked = (0..rays.len()).any(|r| {
                        r != p && r != n && common.iter().zip(&zero_sets[r]).all(|(c, z)| !*c || *z)
                    });
                    if !blocked {
                        let w: LatticeVector =
                            rays[n].iter().zip(&rays[p]).map(|(x, y)| vp * x - vn * y).collect();
                        next.push(primitive(&w));
                    }
                }
            }
            rays = next;
        }
        processed.push(a);
    }

    if lineality.is_empty() {
        rays.sort();
        rays.dedup();
        return (lineality, rays);
    }
    let orth = kernel_basis(&lineality, dim);
    let saturated = kernel_basis(&orth, dim);
    let mut reduced: Vec<LatticeVector> = rays
        .iter()
        .map(|r| reduce_modulo_span(r, &saturated))
        .filter(|r| !is_zero_vec(r))
        .collect();
    reduced.sort();
    reduced.dedup();
    (saturated, reduced)
}

/// Primitive multiple of the component of `v` orthogonal to `span(basis)`.
fn reduce_modulo_span(v: &[Int], basis: &[LatticeVector]) -> LatticeVector {
    let k = basis.len();
    let gram = Matrix::from_fn(k, k, |i, j| dot(&basis[i], &basis[j]));
    let rhs: Vec<Int> = basis.iter().map(|b| dot(b, v)).collect();
    let coeffs = solve_rational(&gram, &rhs).ok().and_then(|s| s.unique()).expect("basis is independent");
    let denom = coeffs.iter().fold(Int::one(), |l, c| num_integer::lcm(l, c.denom().clone()));
    let mut w: Vec<Int> = v.iter().map(|x| x * &denom).collect();
    for (c, b) in coeffs.iter().zip(basis) {
        let f = c.numer() * (&denom / c.denom());
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi -= &f * bi;
        }
    }
    primitive(&w)
}

/// The dual cone `{l : l.v >= 0 for all v in c}`, generated by its extreme rays and
/// both signs of a lineality basis.
pub fn dualize(c: &Cone) -> Result<Cone, PolyhedralError> {
    let h = c.halfspaces()?;
    let mut rays = h.inequalities.clone();
    for e in &h.equations {
        rays.push(e.clone());
        rays.push(e.iter().map(|x| -x).collect());
    }
    rays.sort();
    Cone::new(c.dim, rays)
}

/// `(pointed, lineality lattice basis)`.
pub fn pointedness(c: &Cone) -> Result<(bool, Vec<LatticeVector>), PolyhedralError> {
    let basis = c.lineality_basis()?;
    Ok((basis.is_empty(), basis))
}

/// Saturated lattice basis of `span(vectors) ∩ Z^d`.
pub fn saturated_span(vectors: &[LatticeVector], dim: usize) -> Vec<LatticeVector> {
    let nonzero: Vec<LatticeVector> = vectors.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let orth = kernel_basis(&nonzero, dim);
    kernel_basis(&orth, dim)
}

/// Integer coordinates of `v` with respect to a saturated lattice basis containing it.
fn coordinates(v: &[Int], basis: &[LatticeVector]) -> LatticeVector {
    let a = Matrix::from_columns(basis).expect("nonempty basis");
    let x = solve_rational(&a, v).ok().and_then(|s| s.unique()).expect("vector lies in the lattice span");
    x.into_iter()
        .map(|c| {
            assert!(c.is_integer(), "basis is saturated");
            c.to_integer()
        })
        .collect()
}

/// Hilbert basis of `c ∩ Z^d` for a pointed cone.
///
/// The cone is first re-expressed in a basis of its saturated linear span, then placed
/// into simplicial cones; lattice points of each half-open fundamental parallelepiped,
/// together with the primitive extreme rays, form a candidate set that is reduced to
/// the irreducible elements.
pub fn hilbert_basis(c: &Cone) -> Result<Vec<LatticeVector>, PolyhedralError> {
    if c.dim > MAX_RANK {
        return Err(PolyhedralError::RankTooLarge(c.dim));
    }
    if c.is_zero() {
        return Ok(Vec::new());
    }
    let (pointed, _) = pointedness(c)?;
    if !pointed {
        return Err(PolyhedralError::NotPointed);
    }
    let span = saturated_span(&c.rays, c.dim);
    let r = span.len();
    let local_rays: Vec<LatticeVector> =
        c.rays.iter().filter(|v| !is_zero_vec(v)).map(|v| coordinates(v, &span)).collect();
    let local = Cone::new(r, local_rays)?;
    let extreme = local.extreme_rays()?;
    let halfspaces = local.halfspaces()?;

    let simplices = placing_triangulation(&extreme);
    let points: Vec<Vec<LatticeVector>> = simplices
        .par_iter()
        .map(|s| {
            let rows: Vec<LatticeVector> = s.iter().map(|&i| extreme[i].clone()).collect();
            parallelepiped_points(&rows)
        })
        .collect();
    let candidates: BTreeSet<LatticeVector> =
        extreme.iter().cloned().chain(points.into_iter().flatten()).filter(|p| !is_zero_vec(p)).collect();
    let candidates: Vec<LatticeVector> = candidates.into_iter().collect();
    let irreducible: Vec<LatticeVector> = candidates
        .par_iter()
        .filter(|x| !candidates.iter().any(|y| y != *x && halfspaces.contains(&sub(x, y))))
        .cloned()
        .collect();

    let mut basis: Vec<LatticeVector> = irreducible
        .iter()
        .map(|x| {
            (0..c.dim)
                .map(|j| x.iter().zip(&span).fold(Int::zero(), |acc, (xi, b)| acc + xi * &b[j]))
                .collect()
        })
        .collect();
    basis.sort();
    Ok(basis)
}

/// Hilbert basis of `cone(gens) ∩ Z^d`.
pub fn saturate(gens: &[LatticeVector]) -> Result<Vec<LatticeVector>, PolyhedralError> {
    if gens.iter().all(|g| is_zero_vec(g)) {
        return Err(PolyhedralError::ZeroGenerators);
    }
    hilbert_basis(&Cone::from_rays(gens.to_vec())?)
}

/// Placing triangulation of a pointed full-dimensional cone given by its extreme rays.
/// Each simplex is a sorted list of ray indices.
fn placing_triangulation(rays: &[LatticeVector]) -> Vec<Vec<usize>> {
    let dim = rays.first().map_or(0, |r| r.len());
    let mut initial: Vec<usize> = Vec::new();
    for i in 0..rays.len() {
        let mut trial: Vec<LatticeVector> = initial.iter().map(|&k| rays[k].clone()).collect();
        trial.push(rays[i].clone());
        if rank(&trial) == trial.len() {
            initial.push(i);
        }
        if initial.len() == dim {
            break;
        }
    }
    let mut simplices = vec![initial.clone()];
    for i in (0..rays.len()).filter(|i| !initial.contains(i)) {
        let mut facets: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for s in &simplices {
            for &drop in s {
                let facet: Vec<usize> = s.iter().copied().filter(|&k| k != drop).collect();
                facets.entry(facet).and_modify(|e| e.0 += 1).or_insert((1, drop));
            }
        }
        let mut added = Vec::new();
        for (facet, (count, opposite)) in facets.into_iter().sorted() {
            if count != 1 {
                continue;
            }
            let normal = facet_normal(&facet.iter().map(|&k| rays[k].clone()).collect_vec(), dim);
            let side = dot(&normal, &rays[opposite]);
            let seen = dot(&normal, &rays[i]);
            if (side.is_positive() && seen.is_negative()) || (side.is_negative() && seen.is_positive()) {
                let mut s = facet;
                s.push(i);
                s.sort();
                added.push(s);
            }
        }
        simplices.extend(added);
    }
    simplices
}

fn facet_normal(rows: &[LatticeVector], dim: usize) -> LatticeVector {
    kernel_basis(rows, dim).into_iter().next().expect("facet spans a hyperplane")
}

/// Lattice points of the half-open parallelepiped `{sum t_i r_i : 0 <= t_i < 1}`.
fn parallelepiped_points(rows: &[LatticeVector]) -> Vec<LatticeVector> {
    let n = rows.len();
    let m = Matrix::from_rows(rows).expect("simplex rows");
    let mut det = determinant(&m).expect("square");
    let sf = smith_normal_form(&m);
    // u m v = s, so the row lattice of m is spanned by the rows of s v^{-1}.
    let v_inv = hermite_normal_form(&sf.v).u;
    let adj = adjugate(&m);
    let factors = sf.invariant_factors();
    let mut sign_flip = false;
    if det.is_negative() {
        det = -det;
        sign_flip = true;
    }
    let ranges: Vec<Vec<Int>> = factors
        .iter()
        .map(|f| {
            let f = num_traits::ToPrimitive::to_u64(f).expect("invariant factor fits in u64");
            (0..f).map(Int::from).collect()
        })
        .collect();
    ranges
        .into_iter()
        .multi_cartesian_product()
        .map(|y| {
            let x0 = vec_mul(&y, &v_inv);
            let mu = vec_mul(&x0, &adj);
            let coeffs: Vec<Int> = mu
                .iter()
                .map(|c| {
                    let c = if sign_flip { -c } else { c.clone() };
                    num_integer::Integer::mod_floor(&c, &det)
                })
                .collect();
            (0..n)
                .map(|j| (0..n).fold(Int::zero(), |acc, i| acc + &coeffs[i] * &rows[i][j]) / &det)
                .collect()
        })
        .collect()
}
