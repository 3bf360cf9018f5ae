mod common;

use common::small_corpus;
use nashlab::families;
use nashlab::iterate::{run, CycleScope, RunConfig, Summary, Verdict};
use nashlab::nash::Characteristic;
use proptest::prelude::*;

fn config(p: u64, normalized: bool, rank: usize) -> RunConfig {
    RunConfig::new(Characteristic::new(p).unwrap(), normalized, rank)
}

#[test]
fn one_thread_and_many_threads_build_the_same_tree() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut cases: Vec<_> = small_corpus().into_iter().map(|s| (s, 0, false)).collect();
    cases.push((families::cyclic_quotient(5, 12).unwrap(), 2, true));
    cases.push((families::reeve(2).unwrap(), 0, false));
    for (s, p, normalized) in cases {
        let mut cfg = config(p, normalized, s.rank());
        cfg.max_depth = cfg.max_depth.min(4);
        let a = one.install(|| run(s.clone(), &cfg));
        let b = many.install(|| run(s.clone(), &cfg));
        let c = many.install(|| run(s.clone(), &cfg));
        assert_eq!(a.to_json(), b.to_json(), "{s:?}");
        assert_eq!(b.to_json(), c.to_json());
        assert_eq!(a.to_dot(), b.to_dot());
    }
}

#[test]
fn cycle_certificates_are_verified() {
    let cusp = families::numerical(&[2, 3]).unwrap();
    let t = run(cusp, &config(2, false, 1));
    assert!(t.certificates_verified);
    for n in &t.nodes {
        if let Verdict::Cycle { target, certificate } | Verdict::Repeated { target, certificate } = &n.verdict {
            assert!(certificate.verify(&n.semigroup, &t.nodes[*target].semigroup));
        }
    }
}

#[test]
fn cyclic_quotients_resolve_after_normalizing() {
    for b in 2..=7i64 {
        for a in (1..b).filter(|a| num_integer::gcd(*a, b) == 1) {
            for p in [0, 2, 3, 5] {
                let s = families::cyclic_quotient(a, b).unwrap();
                let t = run(s, &config(p, true, 2));
                assert_eq!(t.summary(), Summary::Resolved, "({a},{b}) char {p}");
            }
        }
    }
}

#[test]
fn ancestor_scope_reports_the_same_cycles_on_a_chain() {
    let cusp = families::numerical(&[2, 3]).unwrap();
    let mut cfg = config(2, false, 1);
    cfg.cycle_scope = CycleScope::Ancestors;
    assert_eq!(run(cusp, &cfg).summary(), Summary::CounterexampleCycle);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn limits_are_respected(idx in 0usize..64, depth in 0usize..4, nodes in 1usize..12, p in prop::sample::select(vec![0u64, 2, 3]), normalized: bool, all: bool) {
        let corpus = small_corpus();
        let s = corpus[idx % corpus.len()].clone();
        let mut cfg = config(p, normalized, s.rank());
        cfg.max_depth = depth;
        cfg.max_nodes = nodes;
        cfg.cycle_scope = if all { CycleScope::AllVisited } else { CycleScope::Ancestors };
        let t = run(s, &cfg);
        prop_assert!(t.nodes.len() <= nodes.max(1));
        prop_assert!(t.max_depth_reached() <= depth);
        prop_assert!(t.certificates_verified);
        // Every node hangs below the root through expansions, so a truncated node blocks resolution.
        let truncated = t.nodes.iter().any(|n| matches!(n.verdict, Verdict::DepthLimit));
        prop_assert!(!(truncated && t.summary() == Summary::Resolved));
    }
}
