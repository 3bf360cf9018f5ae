#![allow(dead_code)]

use itertools::Itertools;
use nashlab::lattice::{det_rows, sub, vec_mul, Matrix};
use nashlab::nash::Characteristic;
use nashlab::polyhedral::saturate;
use nashlab::{families, isomorphic, AffineSemigroup, Int, IntegerMatrix, LatticeVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn v(xs: &[i64]) -> LatticeVector {
    xs.iter().map(|&x| Int::from(x)).collect()
}

pub fn vs(rows: &[&[i64]]) -> Vec<LatticeVector> {
    rows.iter().map(|r| v(r)).collect()
}

pub fn sg(rows: &[&[i64]]) -> AffineSemigroup {
    AffineSemigroup::canonicalize(&vs(rows)).unwrap()
}

pub fn saturated(rows: &[&[i64]]) -> AffineSemigroup {
    AffineSemigroup::canonicalize(&saturate(&vs(rows)).unwrap()).unwrap()
}

/// Product of random elementary row operations, signs and swaps.
pub fn random_unimodular(rng: &mut StdRng, d: usize, steps: usize) -> IntegerMatrix {
    let mut m = Matrix::<Int>::identity(d);
    if d < 2 {
        if rng.gen_bool(0.5) {
            m.negate_row(0);
        }
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        match rng.gen_range(0..4) {
            0 => m.swap_rows(i, j),
            1 => m.negate_row(i),
            _ => m.add_row_multiple(i, j, &Int::from(rng.gen_range(-2i64..=2))),
        }
    }
    m
}

/// Same semigroup in new coordinates `g -> g * u`, kept in those coordinates.
pub fn scramble(s: &AffineSemigroup, u: &IntegerMatrix) -> AffineSemigroup {
    let gens: Vec<LatticeVector> = s.generators().iter().map(|g| vec_mul(g, u)).collect();
    AffineSemigroup::new(&gens).unwrap()
}

/// Fifteen smooth semigroups in scrambled coordinates, some with redundant generators.
pub fn smooth_corpus(seed: u64) -> Vec<AffineSemigroup> {
    let mut rng = StdRng::seed_from_u64(seed);
    let bases = [
        sg(&[&[1]]),
        sg(&[&[1], &[2], &[3]]),
        sg(&[&[1, 0], &[0, 1]]),
        sg(&[&[1, 0], &[0, 1], &[1, 1]]),
        sg(&[&[1, 0], &[0, 1], &[2, 1], &[1, 3]]),
        sg(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        sg(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]),
        sg(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 2, 1]]),
    ];
    (0..15)
        .map(|i| {
            let s = &bases[i % bases.len()];
            let u = random_unimodular(&mut rng, s.rank(), 6 + i);
            scramble(s, &u)
        })
        .collect()
}

/// Fifteen saturated semigroups that are not smooth.
pub fn singular_saturated_corpus() -> Vec<AffineSemigroup> {
    let mut out: Vec<AffineSemigroup> =
        [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5), (3, 7), (5, 8)].iter().map(|&(a, b)| families::cyclic_quotient(a, b).unwrap()).collect();
    out.push(saturated(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]));
    out.push(saturated(&[&[1, 0, 1], &[0, 1, 1], &[-1, -1, 1]]));
    out.push(saturated(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]));
    out.push(saturated(&[&[1, 0, 0], &[0, 1, 0], &[1, 2, 3]]));
    out.push(saturated(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 1], &[-1, 1, 1], &[0, -1, 1]]));
    out.push(families::reeve(2).unwrap());
    out.push(families::reeve(3).unwrap());
    out
}

/// Rank at most three, mixing normal and non-normal semigroups.
pub fn small_corpus() -> Vec<AffineSemigroup> {
    let mut out = vec![
        families::numerical(&[2, 3]).unwrap(),
        families::numerical(&[3, 4, 5]).unwrap(),
        families::numerical(&[3, 5, 7]).unwrap(),
        families::numerical(&[4, 6, 9]).unwrap(),
        families::numerical(&[5, 7]).unwrap(),
        sg(&[&[1, 0], &[1, 1], &[1, 2]]),
        sg(&[&[2, 0], &[1, 1], &[0, 3]]),
        sg(&[&[1, 0], &[1, 2], &[1, 3]]),
        sg(&[&[3, 0], &[0, 3], &[1, 2]]),
        sg(&[&[1, 0], &[0, 2], &[0, 3]]),
        families::rebassoo(1, 2, 3).unwrap(),
        families::rebassoo(2, 3, 4).unwrap(),
        families::cyclic_quotient(2, 5).unwrap(),
        families::cyclic_quotient(3, 7).unwrap(),
        sg(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        sg(&[&[1, 0, 0], &[0, 2, 0], &[0, 3, 0], &[0, 0, 1]]),
        sg(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[1, 1, 1]]),
        sg(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 2], &[0, 0, 3]]),
    ];
    out.extend(singular_saturated_corpus().into_iter().filter(|s| s.rank() <= 3));
    out
}

/// Charts of the blowup of the logarithmic Jacobian computed the slow way: every
/// d-subset of every generator contributes, nothing is minimalized, no chart is skipped
/// on vertex grounds, and a chart is dropped only when some other chart is contained in
/// it (the lower index survives between equal charts).
pub fn brute_force_charts(s: &AffineSemigroup, ch: Characteristic) -> Vec<AffineSemigroup> {
    let d = s.rank();
    let gens = s.generators();
    let mut exps: Vec<LatticeVector> = gens
        .iter()
        .combinations(d)
        .filter(|rows| !ch.kills(&det_rows(&rows.iter().map(|r| r.as_slice()).collect_vec())))
        .map(|rows| rows.iter().fold(vec![Int::from(0); d], |acc, r| acc.iter().zip(r.iter()).map(|(a, b)| a + b).collect()))
        .collect();
    exps.sort();
    exps.dedup();
    let charts: Vec<AffineSemigroup> = exps
        .iter()
        .map(|m| {
            let mut g = gens.to_vec();
            g.extend(exps.iter().map(|k| sub(k, m)));
            AffineSemigroup::new(&g).unwrap()
        })
        .collect();
    // inside[j][i]: chart i is a subset of chart j.
    let n = exps.len();
    let inside: Vec<Vec<bool>> = (0..n)
        .map(|j| (0..n).map(|i| i != j && charts[j].contains(&sub(&exps[j], &exps[i])).unwrap()).collect())
        .collect();
    (0..n)
        .filter(|&j| !(0..n).any(|i| inside[j][i] && (!inside[i][j] || i < j)))
        .map(|j| charts[j].clone())
        .collect()
}

/// Whether two lists agree as multisets of isomorphism classes.
pub fn same_classes(a: &[AffineSemigroup], b: &[AffineSemigroup]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = (0..b.len()).find(|&i| !used[i] && isomorphic(x, &b[i]).unwrap().is_some());
        hit.map(|i| used[i] = true).is_some()
    })
}

/// Pointed part and unit rank of a chart, for comparison up to torus factors.
pub fn split(s: &AffineSemigroup) -> (AffineSemigroup, usize, bool) {
    let q = s.unit_quotient().unwrap();
    (q.pointed.minimalized().unwrap(), q.unit_rank, q.units_saturated)
}

/// Pointed parts of charts together with their torus ranks.
pub fn classes(charts: impl IntoIterator<Item = (AffineSemigroup, usize)>) -> Vec<(usize, AffineSemigroup)> {
    let mut out: Vec<(usize, AffineSemigroup)> = charts
        .into_iter()
        .map(|(s, extra)| {
            let (p, u, _) = split(&s);
            (u + extra, p)
        })
        .collect();
    out.sort_by_key(|(u, _)| *u);
    out
}

pub fn same_split_classes(a: &[(usize, AffineSemigroup)], b: &[(usize, AffineSemigroup)]) -> bool {
    let ranks = |xs: &[(usize, AffineSemigroup)]| xs.iter().map(|x| x.0).collect::<Vec<_>>();
    if ranks(a) != ranks(b) {
        return false;
    }
    let mut ok = true;
    for u in a.iter().map(|x| x.0).collect::<std::collections::BTreeSet<_>>() {
        let pick = |xs: &[(usize, AffineSemigroup)]| xs.iter().filter(|x| x.0 == u).map(|x| x.1.clone()).collect::<Vec<_>>();
        ok &= same_classes(&pick(a), &pick(b));
    }
    ok
}

/// Optimized step and brute-force oracle agree on chart classes, torus factors included.
pub fn pipeline_matches_oracle(s: &AffineSemigroup, ch: Characteristic) -> bool {
    let fast = classes(nashlab::nash::nash_step_charts(s, ch, false).unwrap().into_iter().map(|c| (c.semigroup, c.unit_rank)));
    let slow = classes(brute_force_charts(s, ch).into_iter().map(|c| (c, 0)));
    same_split_classes(&fast, &slow)
}
