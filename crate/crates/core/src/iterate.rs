//! Repeated Nash blowups over the tree of charts.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::nash::{nash_step_charts, order_key, Characteristic, NashError};
use crate::semigroup::{isomorphic, AffineSemigroup, IsoCertificate};
use crate::{Int, LatticeVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleScope {
    /// Compare each chart with its ancestors only.
    Ancestors,
    /// Also compare with every earlier node, reporting non-ancestor matches as repeats.
    AllVisited,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub characteristic: Characteristic,
    pub normalized: bool,
    pub max_depth: usize,
    pub max_nodes: usize,
    pub cycle_scope: CycleScope,
}

impl RunConfig {
    pub const DEFAULT_MAX_NODES: usize = 5000;

    /// Depth 25 up to rank 3 and 10 beyond.
    pub fn default_depth(rank: usize) -> usize {
        if rank <= 3 {
            25
        } else {
            10
        }
    }

    pub fn new(characteristic: Characteristic, normalized: bool, rank: usize) -> Self {
        RunConfig {
            characteristic,
            normalized,
            max_depth: Self::default_depth(rank),
            max_nodes: Self::DEFAULT_MAX_NODES,
            cycle_scope: CycleScope::AllVisited,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Smooth,
    /// Isomorphic to a strict ancestor.
    Cycle { target: usize, certificate: IsoCertificate },
    /// Isomorphic to an earlier node off the ancestor path; that node's subtree stands in.
    Repeated { target: usize, certificate: IsoCertificate },
    DepthLimit,
    Expanded { children: Vec<usize> },
    /// The blowup step failed, e.g. on an empty logarithmic Jacobian.
    Failed { error: NashError },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Smooth => "Smooth",
            Verdict::Cycle { .. } => "Cycle",
            Verdict::Repeated { .. } => "Repeated",
            Verdict::DepthLimit => "DepthLimit",
            Verdict::Expanded { .. } => "Expanded",
            Verdict::Failed { .. } => "Failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterationNode {
    pub id: usize,
    pub semigroup: AffineSemigroup,
    pub parent: Option<usize>,
    pub depth: usize,
    /// Exponent of the chart in the parent's lattice.
    pub base_exponent: Option<LatticeVector>,
    /// Rank of the torus factor split off this chart.
    pub unit_rank: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct IterationTree {
    pub config: RunConfig,
    pub nodes: Vec<IterationNode>,
    /// Every cycle and repeat certificate re-checked after the run.
    pub certificates_verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summary {
    Resolved,
    CounterexampleCycle,
    Inconclusive,
}

impl Summary {
    pub fn name(self) -> &'static str {
        match self {
            Summary::Resolved => "Resolved",
            Summary::CounterexampleCycle => "CounterexampleCycle",
            Summary::Inconclusive => "Inconclusive",
        }
    }
}

enum Classification {
    Smooth,
    Cycle(usize, IsoCertificate),
    Repeated(usize, IsoCertificate),
    Open,
}

/// Breadth-first iteration of the (normalized) Nash blowup from `root`.
///
/// Each level is classified and expanded in parallel, but every decision depends only
/// on node ids and earlier nodes, so the tree is the same for any thread count.
pub fn run(root: AffineSemigroup, cfg: &RunConfig) -> IterationTree {
    let mut nodes = vec![IterationNode {
        id: 0,
        semigroup: root,
        parent: None,
        depth: 0,
        base_exponent: None,
        unit_rank: 0,
        verdict: Verdict::DepthLimit,
    }];
    let mut keys: Vec<Vec<u8>> = vec![order_key(&nodes[0].semigroup)];
    let mut frontier: Vec<usize> = vec![0];

    while !frontier.is_empty() {
        let classes: Vec<Classification> = frontier.par_iter().map(|&id| classify(&nodes, &keys, id, cfg)).collect();
        let mut to_expand = Vec::new();
        for (&id, class) in frontier.iter().zip(classes) {
            nodes[id].verdict = match class {
                Classification::Smooth => Verdict::Smooth,
                Classification::Cycle(target, certificate) => Verdict::Cycle { target, certificate },
                Classification::Repeated(target, certificate) => Verdict::Repeated { target, certificate },
                Classification::Open => {
                    if nodes[id].depth < cfg.max_depth {
                        to_expand.push(id);
                    }
                    Verdict::DepthLimit
                }
            };
        }
        let expansions: Vec<_> = to_expand
            .par_iter()
            .map(|&id| nash_step_charts(&nodes[id].semigroup, cfg.characteristic, cfg.normalized))
            .collect();
        let mut next = Vec::new();
        for (&id, result) in to_expand.iter().zip(expansions) {
            let charts = match result {
                Ok(c) => c,
                Err(error) => {
                    nodes[id].verdict = Verdict::Failed { error };
                    continue;
                }
            };
            if nodes.len() + charts.len() > cfg.max_nodes {
                continue;
            }
            let mut children = Vec::with_capacity(charts.len());
            for c in charts {
                let child = nodes.len();
                keys.push(order_key(&c.semigroup));
                nodes.push(IterationNode {
                    id: child,
                    semigroup: c.semigroup,
                    parent: Some(id),
                    depth: nodes[id].depth + 1,
                    base_exponent: Some(c.base_exponent),
                    unit_rank: c.unit_rank,
                    verdict: Verdict::DepthLimit,
                });
                children.push(child);
                next.push(child);
            }
            nodes[id].verdict = Verdict::Expanded { children };
        }
        frontier = next;
    }

    let mut tree = IterationTree { config: cfg.clone(), nodes, certificates_verified: false };
    tree.certificates_verified = tree.verify_certificates();
    tree
}

fn ancestors(nodes: &[IterationNode], id: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = nodes[id].parent;
    while let Some(p) = cur {
        out.push(p);
        cur = nodes[p].parent;
    }
    out.reverse();
    out
}

fn classify(nodes: &[IterationNode], keys: &[Vec<u8>], id: usize, cfg: &RunConfig) -> Classification {
    let s = &nodes[id].semigroup;
    match s.is_smooth() {
        Ok(true) => return Classification::Smooth,
        Ok(false) => {}
        Err(_) => return Classification::Open,
    }
    if !s.is_pointed().unwrap_or(false) {
        return Classification::Open;
    }
    let matches = |other: usize| -> Option<IsoCertificate> {
        if keys[other] != keys[id] {
            return None;
        }
        isomorphic(s, &nodes[other].semigroup).ok().flatten()
    };
    let path = ancestors(nodes, id);
    for &a in &path {
        if let Some(cert) = matches(a) {
            return Classification::Cycle(a, cert);
        }
    }
    if cfg.cycle_scope == CycleScope::AllVisited {
        for other in (0..id).filter(|o| !path.contains(o)) {
            if let Some(cert) = matches(other) {
                return Classification::Repeated(other, cert);
            }
        }
    }
    Classification::Open
}

impl IterationTree {
    pub fn root(&self) -> &IterationNode {
        &self.nodes[0]
    }

    pub fn max_depth_reached(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Number of nodes at each depth.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_depth_reached() + 1];
        for n in &self.nodes {
            counts[n.depth] += 1;
        }
        counts
    }

    pub fn cycles(&self) -> impl Iterator<Item = &IterationNode> {
        self.nodes.iter().filter(|n| matches!(n.verdict, Verdict::Cycle { .. }))
    }

    fn verify_certificates(&self) -> bool {
        self.nodes.iter().all(|n| match &n.verdict {
            Verdict::Cycle { target, certificate } | Verdict::Repeated { target, certificate } => {
                certificate.verify(&n.semigroup, &self.nodes[*target].semigroup)
            }
            _ => true,
        })
    }

    /// Nodes whose subtree ends in smooth charts, following repeats to their targets.
    fn resolved_nodes(&self) -> Vec<bool> {
        let mut ok = vec![false; self.nodes.len()];
        loop {
            let mut changed = false;
            for n in self.nodes.iter().rev() {
                if ok[n.id] {
                    continue;
                }
                let now = match &n.verdict {
                    Verdict::Smooth => true,
                    Verdict::Expanded { children } => children.iter().all(|&c| ok[c]),
                    Verdict::Repeated { target, .. } => ok[*target],
                    _ => false,
                };
                if now {
                    ok[n.id] = true;
                    changed = true;
                }
            }
            if !changed {
                return ok;
            }
        }
    }

    pub fn summary(&self) -> Summary {
        verdict_summary(self)
    }

    /// JSON form of the tree: one object per node in id order.
    pub fn to_json(&self) -> Value {
        Value::Array(self.nodes.iter().map(node_json).collect())
    }

    /// Graphviz rendering; edges carry base exponents, nodes are colored by verdict.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nash {\n  node [shape=box, style=filled, fontname=\"monospace\"];\n");
        for n in &self.nodes {
            let color = match n.verdict {
                Verdict::Smooth => "green",
                Verdict::Cycle { .. } => "red",
                Verdict::DepthLimit => "gray",
                Verdict::Repeated { .. } => "yellow",
                Verdict::Failed { .. } => "orange",
                Verdict::Expanded { .. } => "white",
            };
            let gens = display_generators(&n.semigroup);
            let _ = writeln!(
                out,
                "  n{} [label=\"#{} d={} {}\\n{}\", fillcolor={}];",
                n.id,
                n.id,
                n.depth,
                n.verdict.name(),
                gens,
                color
            );
        }
        for n in &self.nodes {
            if let (Some(p), Some(m)) = (n.parent, &n.base_exponent) {
                let _ = writeln!(out, "  n{} -> n{} [label=\"({})\"];", p, n.id, join(m));
            }
            match &n.verdict {
                Verdict::Cycle { target, .. } | Verdict::Repeated { target, .. } => {
                    let _ = writeln!(out, "  n{} -> n{} [style=dashed, constraint=false];", n.id, target);
                }
                _ => {}
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Resolved when every leaf is smooth (directly or through repeats), a counterexample
/// when some chart reproduces one of its ancestors, inconclusive otherwise.
pub fn verdict_summary(t: &IterationTree) -> Summary {
    if t.cycles().next().is_some() {
        return Summary::CounterexampleCycle;
    }
    if t.resolved_nodes()[0] {
        Summary::Resolved
    } else {
        Summary::Inconclusive
    }
}

fn join(v: &[Int]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn display_generators(s: &AffineSemigroup) -> String {
    let gens = s.minimal_generators().map(|g| g.to_vec()).unwrap_or_else(|_| s.generators().to_vec());
    gens.iter().map(|g| format!("({})", join(g))).collect::<Vec<_>>().join(" ")
}

/// Integers as JSON numbers when they fit in an `i64`, as strings otherwise.
pub fn int_json(x: &Int) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn vector_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn vectors_json(vs: &[LatticeVector]) -> Value {
    Value::Array(vs.iter().map(|v| vector_json(v)).collect())
}

/// `{ "rank": d, "generators": [...] }`, with minimal generators when the semigroup is pointed.
pub fn semigroup_json(s: &AffineSemigroup) -> Value {
    let gens = s.minimal_generators().map(|g| g.to_vec()).unwrap_or_else(|_| s.generators().to_vec());
    json!({ "rank": s.rank(), "generators": vectors_json(&gens) })
}

pub fn certificate_json(c: &IsoCertificate) -> Value {
    json!({ "matrix": vectors_json(&c.matrix.to_rows()), "bijection": c.bijection })
}

fn node_json(n: &IterationNode) -> Value {
    let mut obj = json!({
        "id": n.id,
        "parent": n.parent,
        "depth": n.depth,
        "base_exponent": n.base_exponent.as_deref().map(vector_json),
        "unit_rank": n.unit_rank,
        "semigroup": semigroup_json(&n.semigroup),
        "verdict": n.verdict.name(),
    });
    let extra = match &n.verdict {
        Verdict::Cycle { target, certificate } | Verdict::Repeated { target, certificate } => {
            json!({ "target": target, "certificate": certificate_json(certificate) })
        }
        Verdict::Expanded { children } => json!({ "children": children }),
        Verdict::Failed { error } => json!({ "error": error.to_string() }),
        _ => json!({}),
    };
    if let (Value::Object(o), Value::Object(e)) = (&mut obj, extra) {
        o.extend(e);
    }
    obj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cyclic_quotient, numerical};
    use itertools::Itertools;

    fn ch(p: u64) -> Characteristic {
        Characteristic::new(p).unwrap()
    }

    fn sg(rows: &[&[i64]]) -> AffineSemigroup {
        let rows = rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect_vec();
        AffineSemigroup::canonicalize(&rows).unwrap()
    }

    #[test]
    fn smooth_root() {
        let t = run(sg(&[&[1, 0], &[0, 1]]), &RunConfig::new(ch(0), false, 2));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.root().verdict, Verdict::Smooth);
        assert_eq!(t.summary(), Summary::Resolved);
    }

    #[test]
    fn cusp_in_characteristic_two_cycles() {
        let t = run(numerical(&[2, 3]).unwrap(), &RunConfig::new(ch(2), false, 1));
        assert_eq!(t.nodes.len(), 2);
        assert!(matches!(t.nodes[1].verdict, Verdict::Cycle { target: 0, .. }));
        assert_eq!(t.nodes[1].depth, 1);
        assert!(t.certificates_verified);
        assert_eq!(t.summary(), Summary::CounterexampleCycle);
    }

    #[test]
    fn a1_normalized_resolves_in_one_step() {
        let t = run(cyclic_quotient(1, 2).unwrap(), &RunConfig::new(ch(0), true, 2));
        assert_eq!(t.nodes.len(), 3);
        assert!(t.nodes[1..].iter().all(|n| n.verdict == Verdict::Smooth && n.depth == 1));
        assert_eq!(t.summary(), Summary::Resolved);
    }

    #[test]
    fn depth_limit_is_inconclusive() {
        let mut cfg = RunConfig::new(ch(0), false, 1);
        cfg.max_depth = 1;
        let t = run(numerical(&[5, 7]).unwrap(), &cfg);
        assert!(t.max_depth_reached() <= 1);
        if t.nodes.iter().any(|n| n.verdict == Verdict::DepthLimit) {
            assert_eq!(t.summary(), Summary::Inconclusive);
        }
    }

    #[test]
    fn node_budget_is_respected() {
        let mut cfg = RunConfig::new(ch(0), false, 2);
        cfg.max_nodes = 3;
        let t = run(cyclic_quotient(2, 7).unwrap(), &cfg);
        assert!(t.nodes.len() <= 3);
    }

    #[test]
    fn dot_colors() {
        let t = run(numerical(&[2, 3]).unwrap(), &RunConfig::new(ch(2), false, 1));
        let dot = t.to_dot();
        assert!(dot.contains("fillcolor=red"));
        assert!(dot.contains("n0 -> n1 [label=\"(3)\"]"));
    }
}
