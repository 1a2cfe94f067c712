mod common;

use multiquiver::linalg::CMat;
use multiquiver::representation::{is_irreducible, GraphRep};
use num_complex::Complex64;

fn interval_rep(x: f64, y: f64) -> GraphRep {
    let mut rep = GraphRep::zero(common::interval(), vec![1, 1]).unwrap();
    rep.set_map(0, 1, CMat::from_element(1, 1, Complex64::new(x, 0.0))).unwrap();
    rep.set_map(1, 0, CMat::from_element(1, 1, Complex64::new(y, 0.0))).unwrap();
    rep
}

/// With one-dimensional spaces the graded subspaces are the coordinate subsets,
/// so they can be listed and tested for invariance directly.
fn coordinate_subsets_irreducible(rep: &GraphRep) -> bool {
    let n = rep.dims().len();
    assert!(rep.dims().iter().all(|&d| d == 1));
    (1..(1u32 << n) - 1).all(|mask| {
        let inside = |v: usize| mask & (1 << v) != 0;
        let invariant = rep.maps().all(|(&(h, t), m)| !inside(t) || inside(h) || m[(0, 0)].norm() == 0.0);
        !invariant
    })
}

#[test]
fn norton_agrees_on_the_interval() {
    let mut rng = common::rng(1);
    for (x, y) in [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (2.0, -3.0)] {
        let rep = interval_rep(x, y);
        let expected = coordinate_subsets_irreducible(&rep);
        assert_eq!(common::norton_irreducible(&rep, &mut rng), expected, "x={x} y={y}");
        assert_eq!(is_irreducible(&rep), expected, "x={x} y={y}");
    }
}

#[test]
fn coordinate_subsets_match_on_the_triangle() {
    let mut rng = common::rng(2);
    for mask in 0..64u32 {
        let mut rep = GraphRep::zero(common::triangle(), vec![1, 1, 1]).unwrap();
        let edges: Vec<(usize, usize)> = rep.maps().map(|(&e, _)| e).collect();
        for (k, (h, t)) in edges.into_iter().enumerate() {
            let v = if mask & (1 << k) != 0 { Complex64::new(1.0 + k as f64, 0.5) } else { Complex64::new(0.0, 0.0) };
            rep.set_map(h, t, CMat::from_element(1, 1, v)).unwrap();
        }
        let expected = coordinate_subsets_irreducible(&rep);
        assert_eq!(is_irreducible(&rep), expected, "mask {mask:06b}");
        assert_eq!(common::norton_irreducible(&rep, &mut rng), expected, "mask {mask:06b}");
    }
}

#[test]
fn planted_subrepresentations_are_detected() {
    let mut rng = common::rng(3);
    let q = common::triangle();
    for _ in 0..20 {
        let rep = common::planted_reducible(&mut rng, q.clone(), &[2, 1, 1], &[1, 1, 0]);
        assert!(!is_irreducible(&rep));
        assert!(!common::norton_irreducible(&rep, &mut rng));
    }
}

#[test]
fn random_suite_has_no_disagreements() {
    let run = common::irreducibility_run(150, 11);
    assert!(run.disagreements.is_empty(), "{}", run.disagreements.join("\n"));
    assert!(run.irreducible > 10 && run.irreducible < 140);
}
