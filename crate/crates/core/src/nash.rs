//! Logarithmic Jacobian ideals and their blowups.

use std::fmt;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{dot, sub, LatticeError};
use crate::polyhedral::{saturate, PolyhedralError};
use crate::semigroup::{minor, AffineSemigroup, SemigroupError};
use crate::{Int, LatticeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NashError {
    #[error("{0} is not zero or a prime")]
    BadCharacteristic(u64),
    #[error("every maximal minor vanishes in characteristic {0}; the logarithmic Jacobian ideal is empty")]
    EmptyLogJacobian(Characteristic),
    #[error("semigroup is not full rank")]
    NotFullRank,
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Characteristic of the base field: zero or a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Characteristic(u64);

impl Characteristic {
    pub const ZERO: Characteristic = Characteristic(0);

    pub fn new(p: u64) -> Result<Self, NashError> {
        if p == 0 || is_prime(p) {
            Ok(Characteristic(p))
        } else {
            Err(NashError::BadCharacteristic(p))
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Whether the integer `n` is zero in the field.
    pub fn kills(self, n: &Int) -> bool {
        if self.0 == 0 {
            n.is_zero()
        } else {
            n.is_multiple_of(&Int::from(self.0))
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// A monomial ideal of a semigroup algebra, given by exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialIdeal {
    pub ambient: AffineSemigroup,
    pub exponents: Vec<LatticeVector>,
}

impl MonomialIdeal {
    pub fn new(ambient: AffineSemigroup, mut exponents: Vec<LatticeVector>) -> Self {
        exponents.sort();
        exponents.dedup();
        MonomialIdeal { ambient, exponents }
    }
}

/// Generators used for the Jacobian: the minimal ones when the semigroup is pointed.
/// The ideal does not depend on this choice.
fn jacobian_generators(s: &AffineSemigroup) -> Result<Vec<LatticeVector>, NashError> {
    if s.is_pointed()? {
        Ok(s.minimal_generators()?.to_vec())
    } else {
        Ok(s.generators().to_vec())
    }
}

/// Exponents `a_{i1} + ... + a_{id}` over all `d`-subsets of generators whose
/// determinant is nonzero in the given characteristic.
pub fn log_jacobian(s: &AffineSemigroup, ch: Characteristic) -> Result<MonomialIdeal, NashError> {
    let d = s.rank();
    let gens = jacobian_generators(s)?;
    let exponents: Vec<LatticeVector> = gens
        .iter()
        .combinations(d)
        .par_bridge()
        .filter(|rows| !ch.kills(&minor(rows)))
        .map(|rows| (0..d).map(|j| rows.iter().fold(Int::zero(), |acc, r| acc + &r[j])).collect())
        .collect();
    if exponents.is_empty() {
        return Err(if crate::lattice::rank(&gens) < d { NashError::NotFullRank } else { NashError::EmptyLogJacobian(ch) });
    }
    Ok(MonomialIdeal::new(s.clone(), exponents))
}

/// Drops every exponent lying in `m' + Γ` for another exponent `m'`. Among exponents
/// differing by a unit, the lexicographically smallest is kept.
pub fn minimalize(ideal: &MonomialIdeal) -> Result<MonomialIdeal, NashError> {
    let s = &ideal.ambient;
    let ell = s.positive_functional()?;
    // A dominating exponent has a smaller or equal value of the positive functional, and
    // domination is transitive, so comparing against the exponents kept so far suffices.
    let mut order: Vec<&LatticeVector> = ideal.exponents.iter().collect();
    order.sort_by_cached_key(|m| (dot(ell, m), (*m).clone()));
    let mut kept: Vec<LatticeVector> = Vec::new();
    for m in order {
        let dominated = kept
            .par_iter()
            .map(|k| s.contains(&sub(m, k)))
            .collect::<Result<Vec<bool>, SemigroupError>>()?
            .into_iter()
            .any(|d| d);
        if !dominated {
            kept.push(m.clone());
        }
    }
    Ok(MonomialIdeal::new(s.clone(), kept))
}

/// One affine chart of the blowup of a monomial ideal.
#[derive(Debug, Clone)]
pub struct Chart {
    pub base_exponent: LatticeVector,
    /// Generated by the ambient generators and all `m_k - base_exponent`, in ambient coordinates.
    pub semigroup: AffineSemigroup,
    /// Whether the base exponent is a vertex of the Newton polyhedron.
    pub vertex: bool,
    /// Functional witnessing the vertex: minimized on the Newton polyhedron exactly at the base.
    pub separating: Option<LatticeVector>,
    /// Index of a surviving chart containing this one as an open subset.
    pub absorbed_by: Option<usize>,
}

/// Semigroup of the chart at `ideal.exponents[j]`.
pub fn chart_semigroup(ideal: &MonomialIdeal, j: usize) -> Result<AffineSemigroup, NashError> {
    let base = &ideal.exponents[j];
    let mut gens = ideal.ambient.generators().to_vec();
    gens.extend(ideal.exponents.iter().map(|m| sub(m, base)));
    Ok(AffineSemigroup::new(&gens)?)
}

/// Certificate that `ideal.exponents[j]` is a vertex of the Newton polyhedron: a
/// functional strictly larger at every other exponent and positive on the ambient
/// generators. One exists exactly when the chart semigroup is pointed, and then the
/// chart's positive functional is one.
fn vertex_certificate(ideal: &MonomialIdeal, j: usize, chart: &AffineSemigroup) -> Result<Option<LatticeVector>, NashError> {
    if !chart.is_pointed()? {
        return Ok(None);
    }
    let ell = chart.positive_functional()?.to_vec();
    let t = dot(&ell, &ideal.exponents[j]);
    let ok = ideal.exponents.iter().enumerate().all(|(k, m)| k == j || dot(&ell, m) > t)
        && ideal.ambient.generators().iter().all(|a| dot(&ell, a).is_positive());
    assert!(ok, "positive functional of a pointed chart must separate its base exponent");
    Ok(Some(ell))
}

/// All charts of the blowup, with absorption resolved.
///
/// Chart `j` is absorbed by chart `i` when `m_j - m_i` lies in chart `j`'s semigroup,
/// i.e. chart `i`'s semigroup is contained in chart `j`'s. Between equal semigroups the
/// lower index survives. Vertex charts are pointed and so are never absorbed.
pub fn blowup_charts(ideal: &MonomialIdeal) -> Result<Vec<Chart>, NashError> {
    let n = ideal.exponents.len();
    let ex = &ideal.exponents;
    let mut charts: Vec<Chart> = (0..n)
        .into_par_iter()
        .map(|j| {
            let semigroup = chart_semigroup(ideal, j)?;
            let separating = vertex_certificate(ideal, j, &semigroup)?;
            Ok(Chart { base_exponent: ex[j].clone(), semigroup, vertex: separating.is_some(), separating, absorbed_by: None })
        })
        .collect::<Result<_, NashError>>()?;

    // contained[j][i]: chart i's semigroup is inside chart j's.
    let contained: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| {
                    if i == j || charts[j].vertex {
                        return Ok(false);
                    }
                    charts[j].semigroup.contains(&sub(&ex[j], &ex[i]))
                })
                .collect::<Result<Vec<bool>, SemigroupError>>()
        })
        .collect::<Result<_, _>>()?;
    let absorbs = |i: usize, j: usize| contained[j][i] && (!contained[i][j] || i < j);
    let survives: Vec<bool> = (0..n).map(|j| !(0..n).any(|i| absorbs(i, j))).collect();
    for j in 0..n {
        if !survives[j] {
            let by = (0..n).find(|&i| survives[i] && contained[j][i]).expect("containment is transitive");
            charts[j].absorbed_by = Some(by);
        }
    }
    Ok(charts)
}

/// A surviving chart after unit removal (and saturation, when normalizing).
#[derive(Debug, Clone)]
pub struct StepChart {
    pub base_exponent: LatticeVector,
    pub semigroup: AffineSemigroup,
    pub unit_rank: usize,
}

/// One Nash blowup step, returning the non-absorbed charts with their base exponents.
///
/// Units are divided out whenever the chart splits off a torus factor, that is when the
/// unit group is saturated or the chart is being normalized anyway. Otherwise the chart
/// is kept with its units. Output is ordered by isomorphism key, then generators.
pub fn nash_step_charts(
    s: &AffineSemigroup,
    ch: Characteristic,
    normalized: bool,
) -> Result<Vec<StepChart>, NashError> {
    let ideal = minimalize(&log_jacobian(s, ch)?)?;
    let charts = blowup_charts(&ideal)?;
    let mut out: Vec<StepChart> = charts
        .into_par_iter()
        .filter(|c| c.absorbed_by.is_none())
        .map(|c| {
            let q = c.semigroup.unit_quotient()?;
            let (semigroup, unit_rank) = if normalized {
                let p = &q.pointed;
                let sat = if p.rank() == 0 { p.clone() } else { AffineSemigroup::canonicalize(&saturate(p.generators())?)? };
                (sat, q.unit_rank)
            } else if q.units_saturated {
                (q.pointed.minimalized()?, q.unit_rank)
            } else {
                (AffineSemigroup::canonicalize(c.semigroup.generators())?, 0)
            };
            Ok(StepChart { base_exponent: c.base_exponent, semigroup, unit_rank })
        })
        .collect::<Result<_, NashError>>()?;
    let keyed: Vec<(Vec<u8>, StepChart)> = out.drain(..).map(|c| (order_key(&c.semigroup), c)).collect();
    Ok(keyed
        .into_iter()
        .sorted_by(|(ka, a), (kb, b)| {
            ka.cmp(kb)
                .then_with(|| a.semigroup.generators().cmp(b.semigroup.generators()))
                .then_with(|| a.base_exponent.cmp(&b.base_exponent))
        })
        .map(|(_, c)| c)
        .collect())
}

/// One Nash blowup step (normalized when asked): the surviving chart semigroups.
pub fn nash_step(s: &AffineSemigroup, ch: Characteristic, normalized: bool) -> Result<Vec<AffineSemigroup>, NashError> {
    Ok(nash_step_charts(s, ch, normalized)?.into_iter().map(|c| c.semigroup).collect())
}

/// Sort key: the isomorphism invariant for pointed semigroups; semigroups with units
/// sort after all pointed ones.
pub fn order_key(s: &AffineSemigroup) -> Vec<u8> {
    match s.invariant_key() {
        Ok(k) => k,
        Err(_) => format!("~{};{}", s.rank(), s.generators().len()).into_bytes(),
    }
}
