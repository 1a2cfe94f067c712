mod common;

use multiquiver::dsolver::criterion;
use multiquiver::kacmoody::{self, is_positive_root, param_power, reflect_dim, reflect_params};
use multiquiver::Scalar;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reflections_satisfy_coxeter_relations(seed in any::<u64>()) {
        if let Err(msg) = common::check_weyl_draw(seed) {
            prop_assert!(false, "{}", msg);
        }
    }

    #[test]
    fn positive_roots_are_permuted_away_from_the_simple_root(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let quiver = common::random_supernova(&mut rng, 6);
        let n = quiver.num_nodes();
        let d: Vec<i64> = (0..n).map(|_| rng.random_range(0..=2)).collect();
        let i = rng.random_range(0..n);
        let mut simple = vec![0; n];
        simple[i] = 1;
        prop_assume!(d.iter().any(|&x| x != 0) && d != simple);
        let reflected = reflect_dim(&quiver, i, &d).unwrap();
        prop_assert_eq!(is_positive_root(&quiver, &d).unwrap(), is_positive_root(&quiver, &reflected).unwrap());
    }

    #[test]
    fn criterion_is_reflection_equivariant(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let graphs = [common::interval(), common::triangle(), common::path(3)];
        let quiver = graphs[rng.random_range(0..graphs.len())].clone();
        let n = quiver.num_nodes();
        let choices = [Scalar::one(), Scalar::int(-1), Scalar::int(2), Scalar::ratio(1, 2), Scalar::int(3)];
        let q: Vec<Scalar> = (0..n).map(|_| choices[rng.random_range(0..choices.len())].clone()).collect();
        let d: Vec<i64> = (0..n).map(|_| rng.random_range(0..=2)).collect();
        let i = rng.random_range(0..n);
        prop_assume!(d.iter().any(|&x| x != 0) && !q[i].is_one(0.0));
        let before = criterion(&quiver, &q, &d).unwrap();
        let (rq, rd) = (reflect_params(&quiver, i, &q).unwrap(), reflect_dim(&quiver, i, &d).unwrap());
        let after = criterion(&quiver, &rq, &rd).unwrap();
        prop_assert_eq!(before.verdict, after.verdict, "q={:?} d={:?} i={}", q, d, i);
        prop_assert_eq!(before.delta, after.delta);
    }

    #[test]
    fn param_power_is_a_character(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.random_range(1..=6);
        let q: Vec<Scalar> = (0..n).map(|_| common::random_rational(&mut rng)).collect();
        let a: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
        let b: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let prod = param_power(&q, &a).unwrap().mul(&param_power(&q, &b).unwrap());
        prop_assert_eq!(param_power(&q, &sum).unwrap(), prod);
    }
}

#[test]
fn thousand_draws_on_small_supernova_graphs() {
    let failures: Vec<String> = (0..1000).filter_map(|s| common::check_weyl_draw(s).err()).collect();
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn marking_reflections_follow_the_weyl_group() {
    let run = common::marking_reflection_run(60, 3);
    assert!(run.failures.is_empty(), "{:?}", run.failures);
    assert!(run.at_core > 0);
}

#[test]
fn expected_dimension_is_weyl_invariant() {
    let q = common::triangle();
    let d = vec![2, 1, 1];
    let e = kacmoody::expected_dimension(&q, &d).unwrap();
    for i in 0..3 {
        let r = reflect_dim(&q, i, &d).unwrap();
        assert_eq!(kacmoody::expected_dimension(&q, &r).unwrap(), e);
    }
}
