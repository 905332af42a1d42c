use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use infoval::document::{InformationDocument, ProblemDocument};
use infoval::dominance::{enumerate_full_dim_pairs, h_value, synthesize_candidates};
use infoval::rational::{self, ratio, Rational};
use infoval::{
    compose, decide_1d, decide_dominance, prune, value_equal, value_leq, voi, Belief,
    DecisionProblem, ExtendedValue, InformationStructure,
};

fn problem(states: usize, max_actions: usize) -> impl Strategy<Value = DecisionProblem> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, states), 1..=max_actions).prop_map(
        |rows| {
            DecisionProblem::from_vectors(rows.iter().map(|r| rational::ints(r)).collect()).unwrap()
        },
    )
}

fn belief(states: usize) -> impl Strategy<Value = Belief> {
    prop::collection::vec(0i64..=12, states)
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(|w| {
            let total: i64 = w.iter().sum();
            Belief::new(w.iter().map(|&x| ratio(x, total)).collect()).unwrap()
        })
}

fn structure(states: usize) -> impl Strategy<Value = InformationStructure> {
    prop::collection::vec((1i64..=9, belief(states)), 1..=5).prop_map(|points| {
        let total: i64 = points.iter().map(|(w, _)| w).sum();
        InformationStructure::new(
            points
                .into_iter()
                .map(|(w, p)| (ratio(w, total), p))
                .collect(),
        )
        .unwrap()
    })
}

fn lambda() -> impl Strategy<Value = Rational> {
    (0i64..=8).prop_map(|k| ratio(k, 8))
}

/// Dimension first, then everything drawn over that many states.
fn sized<T: std::fmt::Debug>(
    f: impl Fn(usize) -> BoxedStrategy<T> + 'static,
) -> impl Strategy<Value = T> {
    (2usize..=4).prop_flat_map(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_function_is_convex_along_segments(
        (u, p, q, t) in sized(|n| (problem(n, 6), belief(n), belief(n), lambda()).boxed())
    ) {
        let mid = p.toward(&q, &t);
        let chord = (Rational::one() - &t) * u.evaluate(&p).unwrap() + &t * u.evaluate(&q).unwrap();
        prop_assert!(u.evaluate(&mid).unwrap() <= chord);
    }

    #[test]
    fn composition_adds_value_functions(
        (l, n, p) in sized(|k| (problem(k, 5), problem(k, 5), belief(k)).boxed())
    ) {
        let composed = compose(&l, &n).unwrap();
        prop_assert_eq!(composed.action_count(), l.action_count() * n.action_count());
        prop_assert_eq!(
            composed.evaluate(&p).unwrap(),
            l.evaluate(&p).unwrap() + n.evaluate(&p).unwrap()
        );
    }

    #[test]
    fn extension_is_positively_homogeneous(
        (u, y, k) in sized(|n| (problem(n, 6), prop::collection::vec(0i64..=9, n), 1i64..=30).boxed())
    ) {
        let y: Vec<Rational> = y.into_iter().map(|v| ratio(v, 4)).collect();
        let lam = ratio(k, 7);
        let scaled: Vec<Rational> = y.iter().map(|v| v * &lam).collect();
        let (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) =
            (u.homogeneous_extension_eval(&y).unwrap(), u.homogeneous_extension_eval(&scaled).unwrap())
        else {
            return Err(TestCaseError::fail("infinite on the orthant"));
        };
        prop_assert_eq!(b, &lam * a);
        let mut off = y.clone();
        off[0] = ratio(-1, 3);
        prop_assert_eq!(u.homogeneous_extension_eval(&off).unwrap(), ExtendedValue::PlusInfinity);
    }

    #[test]
    fn prune_is_idempotent_and_value_preserving(u in sized(|n| problem(n, 7).boxed())) {
        let once = prune(&u).unwrap();
        prop_assert!(once.action_count() <= u.action_count());
        prop_assert!(value_equal(&once, &u).unwrap().holds);
        prop_assert_eq!(prune(&once).unwrap(), once);
    }

    #[test]
    fn value_order_is_a_preorder(
        (s, t, w) in sized(|n| (problem(n, 4), problem(n, 4), problem(n, 2)).boxed())
    ) {
        prop_assert!(value_leq(&s, &s).unwrap().holds);
        // Adding actions can only raise the value function.
        let mut rows: Vec<Vec<Rational>> = s.vectors().cloned().collect();
        rows.extend(t.vectors().cloned());
        let union = DecisionProblem::from_vectors(rows).unwrap();
        prop_assert!(value_leq(&s, &union).unwrap().holds);
        prop_assert!(value_leq(&t, &union).unwrap().holds);
        if value_leq(&s, &t).unwrap().holds && value_leq(&t, &w).unwrap().holds {
            prop_assert!(value_leq(&s, &w).unwrap().holds);
        }
        prop_assert_eq!(value_leq(&union, &t).unwrap().holds, value_equal(&union, &t).unwrap().holds);
    }

    #[test]
    fn value_of_information_is_nonnegative(
        (u, q) in sized(|n| (problem(n, 8), structure(n)).boxed())
    ) {
        prop_assert!(!voi(&u, &q).unwrap().voi.is_negative());
    }

    #[test]
    fn voi_is_equivariant_under_state_relabeling(
        (u, q, perm) in sized(|n| (problem(n, 5), structure(n), Just((0..n).collect::<Vec<_>>()).prop_shuffle()).boxed())
    ) {
        prop_assert_eq!(
            voi(&u, &q).unwrap().voi,
            voi(&u.permuted(&perm).unwrap(), &q.permuted(&perm)).unwrap().voi
        );
    }

    #[test]
    fn composed_problems_dominate_their_base(
        (l, n, q) in sized(|k| (problem(k, 3), problem(k, 3), structure(k)).boxed())
    ) {
        let m = compose(&l, &n).unwrap();
        let verdict = decide_dominance(&m, &l).unwrap();
        let d = verdict.decomposition().expect("sufficiency");
        prop_assert!(value_equal(&compose(&l, &d.n).unwrap(), &m).unwrap().holds);
        prop_assert!(voi(&m, &q).unwrap().voi >= voi(&l, &q).unwrap().voi);
    }

    #[test]
    fn verdicts_are_certificates(
        (m, l) in sized(|k| (problem(k, 4), problem(k, 4)).boxed())
    ) {
        match decide_dominance(&m, &l).unwrap() {
            infoval::DominanceVerdict::Dominates(d) => {
                prop_assert!(d.certificate.holds());
                prop_assert!(value_equal(&compose(&l, &d.n).unwrap(), &m).unwrap().holds);
            }
            infoval::DominanceVerdict::NotDominates(cx) => {
                prop_assert!(cx.gap.is_positive());
                prop_assert_eq!(cx.q.support().len(), 2);
                prop_assert!(voi(&m, &cx.q).unwrap().voi < voi(&l, &cx.q).unwrap().voi);
            }
        }
    }

    #[test]
    fn candidate_envelope_sandwiches_h(
        (m, l, p) in sized(|k| (problem(k, 4), problem(k, 4), belief(k)).boxed())
    ) {
        let (m, l) = (prune(&m).unwrap(), prune(&l).unwrap());
        let pairs = enumerate_full_dim_pairs(&m, &l).unwrap();
        let set = synthesize_candidates(&m, &l, pairs);
        let h = h_value(&m, &l, &p).unwrap();
        let env = set.envelope(&p).unwrap();
        prop_assert!(env >= h);
        if decide_dominance(&m, &l).unwrap().dominates() {
            prop_assert_eq!(env, h);
        }
    }

    #[test]
    fn one_dimensional_method_agrees_with_lp(
        (m, l) in (problem(2, 6), problem(2, 6))
    ) {
        let fast = decide_1d(&m, &l).unwrap();
        prop_assert_eq!(fast.dominates(), decide_dominance(&m, &l).unwrap().dominates());
        if let Some(cx) = fast.counterexample() {
            prop_assert!(voi(&m, &cx.q).unwrap().voi < voi(&l, &cx.q).unwrap().voi);
        }
    }
}

proptest! {
    #[test]
    fn rationals_round_trip(n in -1000i64..=1000, d in 1i64..=1000) {
        let r = ratio(n, d);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    #[test]
    fn documents_round_trip(
        (u, q) in sized(|n| (problem(n, 4), structure(n)).boxed())
    ) {
        let doc = ProblemDocument::from_problem(&u);
        let text = serde_json::to_string(&doc).unwrap();
        prop_assert_eq!(ProblemDocument::from_json(&text).unwrap().to_problem().unwrap(), u);
        let doc = InformationDocument::from_structure(&q);
        let text = serde_json::to_string(&doc).unwrap();
        prop_assert_eq!(InformationDocument::from_json(&text).unwrap().to_structure().unwrap(), q);
    }

    #[test]
    fn point_masses_are_worthless((u, p) in sized(|n| (problem(n, 6), belief(n)).boxed())) {
        prop_assert!(voi(&u, &InformationStructure::point_mass(p)).unwrap().voi.is_zero());
    }
}
