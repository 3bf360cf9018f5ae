mod common;

use common::{pipeline_matches_oracle, singular_saturated_corpus, small_corpus, smooth_corpus};
use nashlab::lattice::{dot, strict_separation};
use nashlab::nash::{blowup_charts, log_jacobian, minimalize, nash_step, Characteristic, MonomialIdeal};
use nashlab::{isomorphic, AffineSemigroup};
use num_traits::Signed;

fn ch(p: u64) -> Characteristic {
    Characteristic::new(p).unwrap()
}

#[test]
fn pipeline_matches_brute_force_charts() {
    for s in small_corpus() {
        for p in [0, 2, 3] {
            assert!(pipeline_matches_oracle(&s, ch(p)), "char {p}: {s:?}");
        }
    }
}

#[test]
fn single_isomorphic_chart_exactly_for_smooth_inputs() {
    let check = |s: &AffineSemigroup, p: u64| {
        let out = nash_step(s, ch(p), false).unwrap();
        let trivial = out.len() == 1 && isomorphic(&out[0], s).unwrap().is_some();
        assert_eq!(trivial, s.is_smooth().unwrap(), "char {p}: {s:?} -> {out:?}");
    };
    for s in smooth_corpus(11) {
        for p in [0, 2, 3] {
            check(&s, p);
        }
    }
    for s in singular_saturated_corpus() {
        for p in [0, 2, 3] {
            check(&s, p);
        }
    }
}

#[test]
fn principal_ideals_blow_up_trivially() {
    for s in small_corpus() {
        let m = s.generators().iter().fold(vec![0.into(); s.rank()], |acc, g| nashlab::lattice::add(&acc, g));
        let charts = blowup_charts(&MonomialIdeal::new(s.clone(), vec![m])).unwrap();
        assert_eq!(charts.len(), 1);
        assert!(charts[0].absorbed_by.is_none());
        assert!(isomorphic(&charts[0].semigroup, &s).unwrap().is_some(), "{s:?}");
    }
}

#[test]
fn positive_characteristic_loses_exponents() {
    for s in small_corpus() {
        let zero = log_jacobian(&s, ch(0)).unwrap().exponents;
        for p in [2, 3, 5, 7] {
            let e = log_jacobian(&s, ch(p)).unwrap().exponents;
            assert!(e.iter().all(|m| zero.contains(m)), "char {p}: {s:?}");
        }
    }
}

#[test]
fn vertex_flags_agree_with_linear_programming() {
    for s in small_corpus() {
        for p in [0, 2] {
            let ideal = minimalize(&log_jacobian(&s, ch(p)).unwrap()).unwrap();
            for (j, c) in blowup_charts(&ideal).unwrap().iter().enumerate() {
                let others: Vec<_> = ideal.exponents.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, m)| m.clone()).collect();
                let lp = strict_separation(&c.base_exponent, &others, s.generators()).unwrap();
                assert_eq!(c.vertex, lp.is_some(), "{s:?} at {:?}", c.base_exponent);
                if let Some(ell) = lp {
                    assert!(c.absorbed_by.is_none());
                    assert!(c.semigroup.is_pointed().unwrap());
                    assert!(c.semigroup.generators().iter().all(|g| dot(&ell, g).is_positive()));
                }
            }
        }
    }
}

mod random {
    use super::*;
    use common::v;
    use proptest::prelude::*;

    fn pointed(d: usize) -> impl Strategy<Value = AffineSemigroup> {
        prop::collection::vec(prop::collection::vec(0i64..=3, d), d..=d + 2).prop_filter_map("full rank and pointed", move |gs| {
            let gens: Vec<_> = gs.iter().map(|g| v(g)).collect();
            let s = AffineSemigroup::canonicalize(&gens).ok()?;
            (s.rank() == d && s.is_pointed().ok()?).then_some(s)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pipeline_matches_brute_force(s in (2usize..=3).prop_flat_map(pointed), p in prop::sample::select(vec![0u64, 2, 3])) {
            prop_assert!(pipeline_matches_oracle(&s, ch(p)), "char {}: {:?}", p, s);
        }
    }
}
