//! Exact rational feasibility via the two-phase simplex method (phase one only).

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::{clear_denominators, dot, is_zero_vec, sub, LatticeError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// Feasibility problem over `n_vars` rational variables with integer constraint data.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    n_vars: usize,
    nonneg: Vec<bool>,
    constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    /// All variables free.
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, nonneg: vec![false; n_vars], constraints: Vec::new() }
    }

    /// All variables constrained to be nonnegative.
    pub fn nonnegative(n_vars: usize) -> Self {
        LinearProgram { n_vars, nonneg: vec![true; n_vars], constraints: Vec::new() }
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> Result<(), LatticeError> {
        if coeffs.len() != self.n_vars {
            return Err(LatticeError::DimensionMismatch { expected: self.n_vars, found: coeffs.len() });
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Some feasible point, or `None` if the system is infeasible.
    pub fn feasible_point(&self) -> Option<Vec<Ratio<T>>> {
        // Column layout: split free variables, then one slack per inequality, then artificials.
        let mut var_cols: Vec<(usize, bool)> = Vec::new();
        for (j, &nn) in self.nonneg.iter().enumerate() {
            var_cols.push((j, true));
            if !nn {
                var_cols.push((j, false));
            }
        }
        let n_struct = var_cols.len();
        let slack_rows: Vec<usize> =
            (0..self.constraints.len()).filter(|&i| self.constraints[i].relation != Relation::Eq).collect();
        let n_slack = slack_rows.len();
        let m = self.constraints.len();
        if m == 0 {
            return Some(vec![Ratio::zero(); self.n_vars]);
        }
        let width = n_struct + n_slack + m;

        let mut tab: Vec<Vec<Ratio<T>>> = Vec::with_capacity(m);
        let mut rhs: Vec<Ratio<T>> = Vec::with_capacity(m);
        for (i, c) in self.constraints.iter().enumerate() {
            let mut row = vec![Ratio::zero(); width];
            for (k, &(j, plus)) in var_cols.iter().enumerate() {
                let v = Ratio::from_integer(c.coeffs[j].clone());
                row[k] = if plus { v } else { -v };
            }
            if let Some(s) = slack_rows.iter().position(|&r| r == i) {
                row[n_struct + s] = match c.relation {
                    Relation::Ge => -Ratio::one(),
                    _ => Ratio::one(),
                };
            }
            let mut b = Ratio::from_integer(c.rhs.clone());
            if b < Ratio::zero() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                b = -b;
            }
            row[n_struct + n_slack + i] = Ratio::one();
            tab.push(row);
            rhs.push(b);
        }
        let mut basis: Vec<usize> = (0..m).map(|i| n_struct + n_slack + i).collect();
        let mut cost = vec![Ratio::zero(); width];
        for row in &tab {
            for j in 0..n_struct + n_slack {
                cost[j] = cost[j].clone() - row[j].clone();
            }
        }
        let mut objective: Ratio<T> = rhs.iter().fold(Ratio::zero(), |a, b| a + b.clone());

        // Bland's rule guarantees termination.
        while let Some(enter) = (0..width).find(|&j| cost[j] < Ratio::zero()) {
            let mut leave: Option<(usize, Ratio<T>)> = None;
            for i in 0..m {
                if tab[i][enter] > Ratio::zero() {
                    let ratio = rhs[i].clone() / tab[i][enter].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                // Unbounded direction in a phase-one problem cannot happen (objective >= 0).
                unreachable!("phase-one objective is bounded below");
            };
            let piv = tab[r][enter].clone();
            for x in tab[r].iter_mut() {
                *x = x.clone() / piv.clone();
            }
            rhs[r] = rhs[r].clone() / piv;
            for i in 0..m {
                if i != r && !tab[i][enter].is_zero() {
                    let f = tab[i][enter].clone();
                    for j in 0..width {
                        let v = tab[r][j].clone() * f.clone();
                        tab[i][j] = tab[i][j].clone() - v;
                    }
                    rhs[i] = rhs[i].clone() - rhs[r].clone() * f;
                }
            }
            let f = cost[enter].clone();
            for j in 0..width {
                cost[j] = cost[j].clone() - tab[r][j].clone() * f.clone();
            }
            objective = objective + rhs[r].clone() * f;
            basis[r] = enter;
        }
        if !objective.is_zero() {
            return None;
        }
        let mut x = vec![Ratio::zero(); self.n_vars];
        for (i, &b) in basis.iter().enumerate() {
            if b < n_struct {
                let (j, plus) = var_cols[b];
                x[j] = if plus { x[j].clone() + rhs[i].clone() } else { x[j].clone() - rhs[i].clone() };
            }
        }
        Some(x)
    }
}

/// Finds an integer functional `l` with `l(target) < l(v)` for every `v` in `others`
/// and `l(r) > 0` for every nonzero `r` in `recession`, or `None` if none exists.
///
/// The returned functional is checked against every inequality before it is returned.
pub fn strict_separation<T: Scalar>(
    target: &[T],
    others: &[Vec<T>],
    recession: &[Vec<T>],
) -> Result<Option<Vec<T>>, LatticeError> {
    let d = target.len();
    if let Some(bad) = others.iter().chain(recession).find(|v| v.len() != d) {
        return Err(LatticeError::DimensionMismatch { expected: d, found: bad.len() });
    }
    let mut lp = LinearProgram::new(d);
    for v in others {
        let diff = sub(v, target);
        if is_zero_vec(&diff) {
            return Ok(None);
        }
        lp.constrain(diff, Relation::Ge, T::one())?;
    }
    for r in recession.iter().filter(|r| !is_zero_vec(r)) {
        lp.constrain(r.clone(), Relation::Ge, T::one())?;
    }
    let Some(point) = lp.feasible_point() else {
        return Ok(None);
    };
    let ell = clear_denominators(&point);
    let t = dot(&ell, target);
    let certified = others.iter().all(|v| dot(&ell, v) > t)
        && recession.iter().filter(|r| !is_zero_vec(r)).all(|r| dot(&ell, r).is_positive());
    assert!(certified, "separating functional failed verification");
    Ok(Some(ell))
}

/// Whether `v` is a nonnegative rational combination of `gens`.
pub fn cone_contains<T: Scalar>(v: &[T], gens: &[Vec<T>]) -> Result<bool, LatticeError> {
    if gens.is_empty() {
        return Ok(is_zero_vec(v));
    }
    if let Some(bad) = gens.iter().find(|g| g.len() != v.len()) {
        return Err(LatticeError::DimensionMismatch { expected: v.len(), found: bad.len() });
    }
    let mut lp = LinearProgram::nonnegative(gens.len());
    for (k, target) in v.iter().enumerate() {
        lp.constrain(gens.iter().map(|g| g[k].clone()).collect(), Relation::Eq, target.clone())?;
    }
    Ok(lp.feasible_point().is_some())
}
