mod common;

use std::collections::BTreeSet;

use multiquiver::blocklinalg::{jordan_child, ClassSpec, Partition};
use multiquiver::graph::ColouredQuiver;
use multiquiver::kacmoody::{self, classify_roots, form, root_kind, RootKind};
use multiquiver::linalg;
use multiquiver::representation::{moment_map, GraphRep};
use multiquiver::stokes::{det_identity_residual, leg_class, marking_to_leg};
use multiquiver::suite::{eigenvalue_palette, random_class};
use multiquiver::{Error, Scalar};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn box_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..(bound + 1).pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % (bound + 1);
                    k /= bound + 1;
                    d
                })
                .collect()
        })
        .filter(|v: &Vec<i64>| v.iter().any(|&x| x != 0))
        .collect()
}

/// Roots of a Dynkin or extended Dynkin graph inside a box: real roots are the
/// positive vectors of norm 2, imaginary roots the positive multiples of the null root.
fn kac_oracle(q: &ColouredQuiver, bound: i64, null_root: Option<&[i64]>) -> (BTreeSet<Vec<i64>>, BTreeSet<Vec<i64>>) {
    let n = q.num_nodes();
    let mut real = BTreeSet::new();
    let mut imaginary = BTreeSet::new();
    for v in box_vectors(n, bound) {
        if form(q, &v, &v).unwrap() == 2 {
            real.insert(v.clone());
        }
        if let Some(delta) = null_root {
            if (1..=bound).any(|k| v.iter().zip(delta).all(|(a, b)| *a == k * b)) {
                imaginary.insert(v);
            }
        }
    }
    (real, imaginary)
}

#[test]
fn root_classification_matches_kac_on_tame_graphs() {
    let cases: Vec<(ColouredQuiver, Option<Vec<i64>>)> = vec![
        (common::interval(), None),
        (common::path(3), None),
        (common::path(4), None),
        (ColouredQuiver::complete_multipartite(&[1, 3]).unwrap(), None),
        (common::triangle(), Some(vec![1, 1, 1])),
        (ColouredQuiver::complete_multipartite(&[2, 2]).unwrap(), Some(vec![1, 1, 1, 1])),
        (ColouredQuiver::complete_multipartite(&[1, 4]).unwrap(), Some(vec![2, 1, 1, 1, 1])),
    ];
    for (q, delta) in cases {
        for bound in 1..=3 {
            let got = classify_roots(&q, bound);
            let (real, imaginary) = kac_oracle(&q, bound, delta.as_deref());
            assert_eq!(got.real.iter().cloned().collect::<BTreeSet<_>>(), real, "{:?} bound {bound}", q.names());
            assert_eq!(got.imaginary.iter().cloned().collect::<BTreeSet<_>>(), imaginary, "{:?} bound {bound}", q.names());
        }
    }
}

#[test]
fn finite_type_root_counts() {
    // |Phi^+| for A_2, A_3, A_4 and D_4.
    for (q, count) in [
        (common::interval(), 3),
        (common::path(3), 6),
        (common::path(4), 10),
        (ColouredQuiver::complete_multipartite(&[1, 3]).unwrap(), 12),
    ] {
        let c = classify_roots(&q, 3);
        assert_eq!(c.real.len(), count);
        assert!(c.imaginary.is_empty());
    }
}

#[test]
fn root_kind_agrees_with_classification_on_wild_graphs() {
    let mut rng = common::rng(4);
    let mut graphs = vec![ColouredQuiver::complete_multipartite(&[1, 1, 1, 1]).unwrap()];
    graphs.extend((0..4).map(|_| common::random_supernova(&mut rng, 5)));
    for q in graphs {
        let c = classify_roots(&q, 2);
        for v in box_vectors(q.num_nodes(), 2) {
            let kind = root_kind(&q, &v).unwrap();
            let expected = if c.real.contains(&v) {
                Some(RootKind::Real)
            } else if c.imaginary.contains(&v) {
                Some(RootKind::Imaginary)
            } else {
                None
            };
            assert_eq!(kind, expected, "{v:?} on {:?}", q.names());
        }
    }
}

#[test]
fn hand_computed_forms_and_reflections() {
    let tri = common::triangle();
    assert_eq!(form(&tri, &[1, 1, 1], &[1, 1, 1]).unwrap(), 0);
    assert_eq!(kacmoody::reflect_dim(&tri, 0, &[1, 1, 1]).unwrap(), vec![1, 1, 1]);
    assert_eq!(kacmoody::expected_dimension(&tri, &[1, 1, 1]).unwrap(), 2);
    let int = common::interval();
    assert_eq!(form(&int, &[1, 1], &[1, 1]).unwrap(), 2);
    assert_eq!(kacmoody::reflect_dim(&int, 0, &[0, 1]).unwrap(), vec![1, 1]);
    assert_eq!(kacmoody::expected_dimension(&int, &[1, 1]).unwrap(), 0);
    let (t, u) = (Scalar::int(5), Scalar::ratio(2, 3));
    let r = kacmoody::reflect_params(&int, 0, &[t.clone(), u.clone()]).unwrap();
    assert_eq!(r, vec![t.recip().unwrap(), t.mul(&u)]);
}

#[test]
fn appendix_parent_child_example() {
    let parent = ClassSpec::new(vec![(Scalar::one(), Partition::new(vec![2, 2, 1]).unwrap())]).unwrap();
    let child = jordan_child(&parent);
    let expected = ClassSpec::new(vec![(Scalar::one(), Partition::new(vec![1, 1]).unwrap())]).unwrap();
    assert!(child.same_as(&expected, 0.0), "{child:?}");
}

fn random_invertible_rep<R: Rng>(rng: &mut R) -> Option<GraphRep> {
    let graphs = [common::interval(), common::triangle(), ColouredQuiver::complete_multipartite(&[1, 2]).unwrap()];
    let q = graphs[rng.random_range(0..graphs.len())].clone();
    let dims: Vec<usize> = (0..q.num_nodes()).map(|_| rng.random_range(1..=2)).collect();
    GraphRep::random(q, dims, 0.7, rng).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moment_determinants_multiply_to_one(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let rep = random_invertible_rep(&mut rng).unwrap();
        let mu = match moment_map(&rep) {
            Ok(m) => m.mu,
            Err(Error::NotInvertible { .. } | Error::Indeterminate(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let prod: Complex64 = mu.iter().map(linalg::det).product();
        let scale: f64 = mu.iter().map(|m| linalg::norm(m).max(1.0).powi(m.nrows() as i32)).product();
        prop_assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-9 * scale, "product {}", prod);
    }

    #[test]
    fn legs_round_trip_exactly(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let palette = eigenvalue_palette(true);
        let n = rng.random_range(1..=5);
        let class = random_class(&mut rng, n, &palette, 3);
        let mut marking = class.minimal_marking();
        for i in (1..marking.len()).rev() {
            marking.swap(i, rng.random_range(0..=i));
        }
        let leg = marking_to_leg(&class, &marking).unwrap();
        prop_assert_eq!(leg.dims[0], n as i64);
        prop_assert!(leg_class(&leg).unwrap().same_as(&class, 0.0));
        prop_assert_eq!(det_identity_residual(&class, &leg).unwrap(), 0.0);
    }
}
