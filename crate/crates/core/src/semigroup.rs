//! Affine semigroups, the combinatorial side of affine toric varieties.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{
    adjugate, content, determinant, dot, hermite_normal_form, in_row_lattice, is_zero_vec, rank, reduce_modulo,
    smith_normal_form,
    solve_rational, sub, vec_mul, HermiteForm, LatticeError, Matrix, Scalar,
};
use crate::polyhedral::{Cone, Halfspaces, PolyhedralError};
use crate::{Int, IntegerMatrix, LatticeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("a semigroup needs at least one generator")]
    Empty,
    #[error("all generators are zero")]
    ZeroGenerators,
    #[error("semigroup has nontrivial units; take the unit quotient first")]
    NotPointed,
    #[error("vector has length {found}, semigroup rank is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A finitely generated subsemigroup of `Z^rank`. After [`AffineSemigroup::canonicalize`]
/// the generators span `Z^rank` as a group.
///
/// Generators are kept sorted and duplicate-free. Derived data (cone, units, minimal
/// generators) is computed once and shared between clones.
#[derive(Clone)]
pub struct AffineSemigroup {
    rank: usize,
    generators: Vec<LatticeVector>,
    embedding: Vec<LatticeVector>,
    cache: Arc<Cache>,
}

#[derive(Default)]
struct Cache {
    cone: OnceLock<Cone>,
    structure: OnceLock<Result<Structure, SemigroupError>>,
    minimal: OnceLock<Vec<LatticeVector>>,
}

struct Structure {
    halfspaces: Halfspaces,
    /// Generators that are units.
    unit_generators: Vec<LatticeVector>,
    /// Echelon basis of the unit group.
    unit_lattice: Option<HermiteForm<Int>>,
    /// Saturated basis of the lineality lattice of the cone.
    lineality: Vec<LatticeVector>,
    /// Integer functional vanishing on units and at least 1 on every other generator.
    positive: LatticeVector,
}

impl PartialEq for AffineSemigroup {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.generators == other.generators
    }
}

impl Eq for AffineSemigroup {}

impl Hash for AffineSemigroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.generators.hash(state);
    }
}

impl fmt::Debug for AffineSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{{")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({})", g.iter().join(","))?;
        }
        write!(f, "}} ⊂ Z^{}", self.rank)
    }
}

/// Witness of a unimodular equivalence: `g * matrix` maps the minimal generators of
/// the source onto those of the target, `bijection[i]` being the target index of the
/// source's `i`-th minimal generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoCertificate {
    pub matrix: IntegerMatrix,
    pub bijection: Vec<usize>,
}

impl IsoCertificate {
    pub fn verify(&self, source: &AffineSemigroup, target: &AffineSemigroup) -> bool {
        if source.rank != target.rank || self.matrix.rows() != source.rank || self.matrix.cols() != source.rank {
            return false;
        }
        let (Ok(a), Ok(b)) = (source.minimal_generators(), target.minimal_generators()) else {
            return false;
        };
        if a.len() != b.len() || self.bijection.len() != a.len() {
            return false;
        }
        if source.rank > 0 {
            let d = determinant(&self.matrix).expect("square");
            if d.abs() != Int::one() {
                return false;
            }
        }
        let targets: BTreeSet<usize> = self.bijection.iter().copied().collect();
        targets.len() == b.len()
            && a.iter().zip(&self.bijection).all(|(g, &j)| j < b.len() && vec_mul(g, &self.matrix) == b[j])
    }
}

/// Result of dividing out the units of a semigroup.
#[derive(Debug, Clone)]
pub struct UnitQuotient {
    pub pointed: AffineSemigroup,
    pub unit_rank: usize,
    /// Whether the unit group equals its saturation in the ambient lattice. When it does
    /// not, the semigroup is not normal and the pointed image loses information.
    pub units_saturated: bool,
}

impl AffineSemigroup {
    /// Re-coordinatizes `gens` so that the group they generate becomes `Z^rank`, drops
    /// zeros and duplicates, and sorts the generators.
    pub fn canonicalize(gens: &[LatticeVector]) -> Result<Self, SemigroupError> {
        let dim = gens.first().map(|g| g.len()).ok_or(SemigroupError::Empty)?;
        if let Some(bad) = gens.iter().find(|g| g.len() != dim) {
            return Err(SemigroupError::DimensionMismatch { expected: dim, found: bad.len() });
        }
        let nonzero: Vec<LatticeVector> = gens.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
        if nonzero.is_empty() {
            return Err(SemigroupError::ZeroGenerators);
        }
        let hf = hermite_normal_form(&Matrix::from_rows(&nonzero)?);
        let basis = hf.basis();
        let r = basis.len();
        let generators: Vec<LatticeVector> = if basis == Matrix::<Int>::identity(dim).to_rows() {
            nonzero
        } else {
            let columns = Matrix::from_columns(&basis)?;
            nonzero
                .iter()
                .map(|g| {
                    let x = solve_rational(&columns, g)?.unique().expect("basis is independent");
                    Ok(x.into_iter().map(|c| c.to_integer()).collect())
                })
                .collect::<Result<_, LatticeError>>()?
        };
        Ok(Self::from_parts(r, generators, basis))
    }

    /// Keeps the ambient coordinates as given: the rank is the vector length even when
    /// the generators span a proper sublattice. Zeros and duplicates are dropped.
    pub fn new(gens: &[LatticeVector]) -> Result<Self, SemigroupError> {
        let dim = gens.first().map(|g| g.len()).ok_or(SemigroupError::Empty)?;
        if let Some(bad) = gens.iter().find(|g| g.len() != dim) {
            return Err(SemigroupError::DimensionMismatch { expected: dim, found: bad.len() });
        }
        let nonzero: Vec<LatticeVector> = gens.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
        if nonzero.is_empty() {
            return Err(SemigroupError::ZeroGenerators);
        }
        Ok(Self::from_parts(dim, nonzero, Matrix::<Int>::identity(dim).to_rows()))
    }

    /// The semigroup `{0}` in the rank-zero lattice (a point, or a torus after unit removal).
    pub fn trivial() -> Self {
        Self::from_parts(0, Vec::new(), Vec::new())
    }

    fn from_parts(rank: usize, mut generators: Vec<LatticeVector>, embedding: Vec<LatticeVector>) -> Self {
        generators.sort();
        generators.dedup();
        AffineSemigroup { rank, generators, embedding, cache: Arc::default() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    /// Basis of the group generated by the original input, in input coordinates.
    pub fn embedding(&self) -> &[LatticeVector] {
        &self.embedding
    }

    pub fn cone(&self) -> &Cone {
        self.cache.cone.get_or_init(|| Cone::new(self.rank, self.generators.clone()).expect("consistent rank"))
    }

    fn structure(&self) -> Result<&Structure, SemigroupError> {
        self.cache
            .structure
            .get_or_init(|| {
                let cone = self.cone();
                let halfspaces = cone.halfspaces()?.clone();
                let (unit_generators, others): (Vec<_>, Vec<_>) = self
                    .generators
                    .iter()
                    .cloned()
                    .partition(|g| halfspaces.inequalities.iter().all(|a| dot(a, g).is_zero()));
                let positive: LatticeVector = (0..self.rank)
                    .map(|j| halfspaces.inequalities.iter().fold(Int::zero(), |acc, a| acc + &a[j]))
                    .collect();
                debug_assert!(others.iter().all(|g| dot(&positive, g).is_positive()));
                let unit_lattice = if unit_generators.is_empty() {
                    None
                } else {
                    Some(hermite_normal_form(&Matrix::from_rows(&unit_generators)?))
                };
                Ok(Structure {
                    lineality: cone.lineality_basis()?,
                    halfspaces,
                    unit_generators,
                    unit_lattice,
                    positive,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn is_pointed(&self) -> Result<bool, SemigroupError> {
        Ok(self.structure()?.unit_generators.is_empty())
    }

    /// Integer functional that is zero on units and at least one on every other generator.
    pub fn positive_functional(&self) -> Result<&[Int], SemigroupError> {
        Ok(&self.structure()?.positive)
    }

    fn check_len(&self, v: &[Int]) -> Result<(), SemigroupError> {
        if v.len() != self.rank {
            return Err(SemigroupError::DimensionMismatch { expected: self.rank, found: v.len() });
        }
        Ok(())
    }

    /// Membership for pointed semigroups.
    pub fn member(&self, v: &[Int]) -> Result<bool, SemigroupError> {
        self.check_len(v)?;
        if !self.is_pointed()? {
            return Err(SemigroupError::NotPointed);
        }
        self.contains(v)
    }

    /// Membership for arbitrary semigroups, including those with units.
    ///
    /// Searches `v - (N-combination of non-unit generators)` inside the cone, bounded by
    /// a functional that is positive on the non-unit generators, and accepts once the
    /// remainder lies in the unit group.
    pub fn contains(&self, v: &[Int]) -> Result<bool, SemigroupError> {
        self.check_len(v)?;
        let st = self.structure()?;
        if !st.halfspaces.contains(v) {
            return Ok(false);
        }
        let steps: Vec<&LatticeVector> =
            self.generators.iter().filter(|g| !st.unit_generators.contains(g)).collect();
        Ok(search_membership(v, &steps, st))
    }

    /// The unique minimal generating set of a pointed semigroup.
    pub fn minimal_generators(&self) -> Result<&[LatticeVector], SemigroupError> {
        if let Some(m) = self.cache.minimal.get() {
            return Ok(m);
        }
        if !self.is_pointed()? {
            return Err(SemigroupError::NotPointed);
        }
        let st = self.structure()?;
        let minimal: Vec<LatticeVector> = self
            .generators
            .iter()
            .filter(|g| {
                let others: Vec<&LatticeVector> = self.generators.iter().filter(|h| h != g).collect();
                !search_membership(g, &others, st)
            })
            .cloned()
            .collect();
        Ok(self.cache.minimal.get_or_init(|| minimal))
    }

    /// Same semigroup, generated by its minimal generators only.
    pub fn minimalized(&self) -> Result<Self, SemigroupError> {
        let m = self.minimal_generators()?.to_vec();
        Ok(Self::from_parts(self.rank, m, self.embedding.clone()))
    }

    /// Divides out the unit group `Γ ∩ -Γ`: the lattice is quotiented by the saturation
    /// of the units and the pointed image is returned with the unit rank.
    pub fn unit_quotient(&self) -> Result<UnitQuotient, SemigroupError> {
        let st = self.structure()?;
        if st.unit_generators.is_empty() {
            return Ok(UnitQuotient { pointed: self.clone(), unit_rank: 0, units_saturated: true });
        }
        let u = st.lineality.len();
        let unit_lattice = st.unit_lattice.as_ref().expect("units present");
        let units_saturated = unit_lattice.rank == u && st.lineality.iter().all(|l| in_row_lattice(unit_lattice, l));
        // u * L * v = [I | 0]; coordinates x -> x * v put the lineality lattice on the first u axes.
        let sf = smith_normal_form(&Matrix::from_rows(&st.lineality)?);
        let images: Vec<LatticeVector> = self
            .generators
            .iter()
            .filter(|g| !st.unit_generators.contains(g))
            .map(|g| vec_mul(g, &sf.v)[u..].to_vec())
            .collect();
        let pointed = if images.is_empty() { Self::trivial() } else { Self::canonicalize(&images)? };
        Ok(UnitQuotient { pointed, unit_rank: u, units_saturated })
    }

    /// Whether the semigroup algebra is regular: after removing units, the pointed part
    /// is free on a lattice basis.
    pub fn is_smooth(&self) -> Result<bool, SemigroupError> {
        let q = self.unit_quotient()?;
        if !q.units_saturated {
            return Ok(false);
        }
        let p = &q.pointed;
        let m = p.minimal_generators()?;
        if m.len() != p.rank {
            return Ok(false);
        }
        if p.rank == 0 {
            return Ok(true);
        }
        Ok(minor(&m.iter().collect_vec()).abs().is_one())
    }

    /// Key that is constant on isomorphism classes: rank, number of minimal generators
    /// and the sorted absolute values of all maximal minors of the minimal generators.
    pub fn invariant_key(&self) -> Result<Vec<u8>, SemigroupError> {
        let m = self.minimal_generators()?;
        let mut minors: Vec<Int> =
            m.iter().combinations(self.rank).map(|rows| minor(&rows).abs()).filter(|d| !d.is_zero()).collect();
        minors.sort();
        let mut counts: BTreeMap<Int, usize> = BTreeMap::new();
        for d in minors {
            *counts.entry(d).or_default() += 1;
        }
        let body = counts.iter().map(|(d, c)| format!("{d}x{c}")).join(",");
        Ok(format!("{};{};{}", self.rank, m.len(), body).into_bytes())
    }
}

/// Depth-first search for `v = (unit) + sum of steps`, pruned by the cone and by the
/// positive functional. Runs on machine integers when every intermediate value is
/// provably small.
fn search_membership(v: &[Int], steps: &[&LatticeVector], st: &Structure) -> bool {
    let ell_v = dot(&st.positive, v);
    if ell_v.is_negative() {
        return false;
    }
    let max_abs = |vs: &mut dyn Iterator<Item = &Int>| vs.map(|x| x.abs()).max().unwrap_or_default();
    let step_max = max_abs(&mut steps.iter().flat_map(|s| s.iter()));
    let normal_max = max_abs(&mut st.halfspaces.inequalities.iter().chain(&st.halfspaces.equations).flatten());
    let coord_bound = max_abs(&mut v.iter()) + &ell_v * &step_max;
    let dim = Int::from(v.len().max(1));
    let limit = Int::from(1u64 << 62);
    let fits = &coord_bound * &normal_max * &dim < limit
        && &coord_bound * max_abs(&mut st.positive.iter()) * &dim < limit
        && st.unit_lattice.is_none();
    if fits {
        let cast = |x: &LatticeVector| -> Vec<i64> { x.iter().map(|c| c.to_i64().expect("bounded")).collect() };
        let steps: Vec<Vec<i64>> = steps.iter().map(|s| cast(s)).collect();
        let halfspaces: Vec<Vec<i64>> = st.halfspaces.inequalities.iter().map(cast).collect();
        let equations: Vec<Vec<i64>> = st.halfspaces.equations.iter().map(cast).collect();
        search_in(&cast(&v.to_vec()), &steps, &cast(&st.positive), &halfspaces, &equations, |w| w)
    } else {
        let steps: Vec<LatticeVector> = steps.iter().map(|s| (*s).clone()).collect();
        // Cone and functional are constant on cosets of the unit group, so states are
        // identified modulo units.
        search_in(v, &steps, &st.positive, &st.halfspaces.inequalities, &st.halfspaces.equations, |w| {
            match &st.unit_lattice {
                Some(h) => reduce_modulo(h, &w),
                None => w,
            }
        })
    }
}

/// Searches `reduce(v - sum of steps)` for zero, never leaving the cone. Every step
/// lowers the positive functional by at least one, so the search is finite.
fn search_in<T: Scalar>(
    v: &[T],
    steps: &[Vec<T>],
    positive: &[T],
    inequalities: &[Vec<T>],
    equations: &[Vec<T>],
    reduce: impl Fn(Vec<T>) -> Vec<T>,
) -> bool {
    let weights: Vec<T> = steps.iter().map(|s| dot(positive, s)).collect();
    let in_cone = |w: &[T]| {
        inequalities.iter().all(|a| !dot(a, w).is_negative()) && equations.iter().all(|e| dot(e, w).is_zero())
    };
    let start = reduce(v.to_vec());
    let mut stack = vec![start.clone()];
    let mut seen: HashSet<Vec<T>> = HashSet::new();
    seen.insert(start);
    while let Some(w) = stack.pop() {
        if is_zero_vec(&w) {
            return true;
        }
        let level = dot(positive, &w);
        for (s, weight) in steps.iter().zip(&weights) {
            if *weight > level {
                continue;
            }
            let next = sub(&w, s);
            if !in_cone(&next) {
                continue;
            }
            let next = reduce(next);
            if !seen.contains(&next) {
                seen.insert(next.clone());
                stack.push(next);
            }
        }
    }
    false
}

/// Determinant of a square list of rows, on `i128` when Hadamard's bound allows it.
pub(crate) fn minor(rows: &[&LatticeVector]) -> Int {
    let n = rows.len();
    let small = n <= 8 && rows.iter().flat_map(|r| r.iter()).all(|x| x.abs() < Int::from(1 << 12));
    if small {
        let m = Matrix::from_fn(n, n, |i, j| rows[i][j].to_i128().expect("bounded"));
        Int::from(determinant(&m).expect("square"))
    } else {
        let m = Matrix::from_fn(n, n, |i, j| rows[i][j].clone());
        determinant(&m).expect("square")
    }
}

/// Gcd of the 2x2 minors of the pair `[a; b]`, a unimodular invariant of the pair.
fn pair_index(a: &[Int], b: &[Int]) -> Int {
    let n = a.len();
    let mut g = Int::zero();
    for i in 0..n {
        for j in i + 1..n {
            g = g.gcd(&(&a[i] * &b[j] - &a[j] * &b[i]));
        }
    }
    g
}

/// Searches for a unimodular `U` with `U(minimal generators of a) = minimal generators of b`.
///
/// Anchors on the lexicographically first basis among the minimal generators of `a`,
/// tries every image tuple compatible with per-generator and pairwise invariants, and
/// verifies the resulting certificate before returning it.
pub fn isomorphic(a: &AffineSemigroup, b: &AffineSemigroup) -> Result<Option<IsoCertificate>, SemigroupError> {
    if a.rank != b.rank {
        return Ok(None);
    }
    let ma = a.minimal_generators()?;
    let mb = b.minimal_generators()?;
    if ma.len() != mb.len() {
        return Ok(None);
    }
    let d = a.rank;
    if d == 0 {
        return Ok(Some(IsoCertificate { matrix: Matrix::zeros(0, 0), bijection: Vec::new() }));
    }
    let signature = |gens: &[LatticeVector], i: usize| -> (Int, Vec<Int>) {
        let mut pairs: Vec<Int> =
            gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, h)| pair_index(&gens[i], h)).collect();
        pairs.sort();
        (content(&gens[i]), pairs)
    };
    let sig_a: Vec<_> = (0..ma.len()).map(|i| signature(ma, i)).collect();
    let sig_b: Vec<_> = (0..mb.len()).map(|i| signature(mb, i)).collect();
    if sig_a.iter().sorted().collect_vec() != sig_b.iter().sorted().collect_vec() {
        return Ok(None);
    }

    let mut anchors: Vec<usize> = Vec::new();
    for i in 0..ma.len() {
        let mut trial: Vec<LatticeVector> = anchors.iter().map(|&k| ma[k].clone()).collect();
        trial.push(ma[i].clone());
        if rank(&trial) == trial.len() {
            anchors.push(i);
        }
        if anchors.len() == d {
            break;
        }
    }
    let anchor_rows: Vec<&LatticeVector> = anchors.iter().map(|&i| &ma[i]).collect();
    let anchor_det = minor(&anchor_rows);
    let anchor_matrix = Matrix::from_fn(d, d, |i, j| anchor_rows[i][j].clone());
    let anchor_adj = adjugate(&anchor_matrix);
    let target_set: BTreeMap<&LatticeVector, usize> = mb.iter().enumerate().map(|(i, g)| (g, i)).collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    let mut found: Option<IsoCertificate> = None;
    extend_tuple(&mut chosen, &mut |tuple: &[usize]| {
        let k = tuple.len() - 1;
        let (ai, bi) = (anchors[k], tuple[k]);
        if sig_a[ai] != sig_b[bi] {
            return Step::Prune;
        }
        if (0..k).any(|l| pair_index(&ma[anchors[l]], &ma[ai]) != pair_index(&mb[tuple[l]], &mb[bi])) {
            return Step::Prune;
        }
        if tuple.len() < d {
            return Step::Descend;
        }
        let image_rows: Vec<&LatticeVector> = tuple.iter().map(|&j| &mb[j]).collect();
        if minor(&image_rows).abs() != anchor_det.abs() {
            return Step::Prune;
        }
        let images = Matrix::from_fn(d, d, |i, j| image_rows[i][j].clone());
        let scaled = &anchor_adj * &images;
        let mut u = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let (q, r) = scaled[(i, j)].div_rem(&anchor_det);
                if !r.is_zero() {
                    return Step::Prune;
                }
                u[(i, j)] = q;
            }
        }
        let mut bijection = Vec::with_capacity(ma.len());
        for g in ma {
            match target_set.get(&vec_mul(g, &u)) {
                Some(&j) => bijection.push(j),
                None => return Step::Prune,
            }
        }
        let cert = IsoCertificate { matrix: u, bijection };
        if cert.verify(a, b) {
            found = Some(cert);
            Step::Stop
        } else {
            Step::Prune
        }
    }, mb.len(), d);
    Ok(found)
}

enum Step {
    Descend,
    Prune,
    Stop,
}

/// Enumerates injective tuples of `0..n` of length up to `len`, in lexicographic order,
/// letting `visit` prune or stop at each prefix. Returns true once stopped.
fn extend_tuple(chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> Step, n: usize, len: usize) -> bool {
    for j in 0..n {
        if chosen.contains(&j) {
            continue;
        }
        chosen.push(j);
        let stop = match visit(chosen) {
            Step::Stop => true,
            Step::Prune => false,
            Step::Descend => chosen.len() < len && extend_tuple(chosen, visit, n, len),
        };
        chosen.pop();
        if stop {
            return true;
        }
    }
    false
}
