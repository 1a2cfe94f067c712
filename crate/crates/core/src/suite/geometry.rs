use num_complex::Complex64;
use rand::Rng;

use super::{eigenvalue_palette, random_class, rng, skippable, Check};
use crate::blocklinalg::{jordan_child, numeric_jordan, ClassSpec, Partition};
use crate::dsolver::{ds_search, DSInstance, SearchBudget, SearchOutcome};
use crate::error::Result;
use crate::graph::{ColouredQuiver, Leg};
use crate::kacmoody;
use crate::linalg::{self, CMat};
use crate::representation::{quotient_dimension_probe, triangle_invariants};
use crate::scalar::Scalar;
use crate::stokes::{
    det_identity_residual, leg_class, leg_to_class, marking_from_params, marking_to_leg, tame_to_stokes, TameTuple,
    CLASS_TOL,
};

fn markers(class: &ClassSpec) -> Vec<Scalar> {
    let mut m: Vec<Scalar> = class.eigen.iter().map(|(s, _)| s.clone()).collect();
    if !m.iter().any(|s| s.is_one(0.0)) {
        m.push(Scalar::one());
    }
    m
}

fn conjugate<R: Rng>(rng: &mut R, j: &CMat) -> CMat {
    let p = linalg::random_well_conditioned(rng, j.nrows(), 1.0);
    let p_inv = p.clone().try_inverse().expect("well conditioned");
    p * j * p_inv
}

/// `1 + b a` with `a`, `b` of a random rank between 1 and `n`.
fn random_pseudo_reflection<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let r = rng.random_range(1..=n);
    let a = linalg::random_matrix(rng, r, n) * Complex64::new(0.6, 0.0);
    let b = linalg::random_matrix(rng, n, r) * Complex64::new(0.6, 0.0);
    linalg::identity(n) + b * a
}

/// Tame tuples with `m <= 4` matrices on `dim V <= 4`. Half are random products of
/// pseudo-reflections; the other half have `T_m` chosen so that `T_m ... T_1`
/// lies in a planted class with repeated eigenvalues.
///
/// The residual is the characteristic polynomial distance of `T_m ... T_1` and
/// `1 + BA`; failures count Jordan data that break the column-deletion rule or miss
/// the planted class.
pub fn tame_suite(instances: usize, seed: u64) -> Result<Check> {
    let mut rng = rng(seed);
    let palette = eigenvalue_palette(true);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut skipped = 0;
    for k in 0..instances {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=4);
        let planted = k % 2 == 1 && m >= 2;
        let mut ts: Vec<CMat> = (0..m - usize::from(planted)).map(|_| random_pseudo_reflection(&mut rng, n)).collect();
        let target = if planted {
            let class = random_class(&mut rng, n, &palette, 3);
            let c_inf = conjugate(&mut rng, &class.jordan_matrix());
            let prod = ts.iter().fold(linalg::identity(n), |acc, t| t * acc);
            ts.push(c_inf * prod.try_inverse().expect("product of invertibles"));
            Some(class)
        } else {
            None
        };
        let tuple = TameTuple::new(ts, target.clone())?;
        let data = match tame_to_stokes(&tuple) {
            Ok(d) => d,
            Err(e) if skippable(&e) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        worst = worst.max(data.char_poly_distance);
        if !(data.a_injective && data.b_surjective) {
            continue;
        }
        match (&data.classes, &target) {
            (Ok(report), Some(class)) => {
                if !report.consistent || !report.child.same_as(class, 1e-4) {
                    failures += 1;
                }
            }
            (Ok(report), None) => failures += usize::from(!report.consistent),
            (Err(e), _) if skippable(e) => skipped += 1,
            (Err(_), _) => failures += 1,
        }
    }
    Ok(Check::finish("tame2stokes", instances, skipped, worst, 1e-8, failures))
}

/// `A: V -> W` injective and `B: W -> V` surjective with `1 + BA` in a planted class.
///
/// `A = G` is random and `B = (K - 1) G^+ + R (1 - G G^+)`, so that `BA = K - 1`.
fn planted_pair<R: Rng>(rng: &mut R, k: &CMat, w: usize) -> (CMat, CMat) {
    let n = k.nrows();
    let g = linalg::random_matrix(rng, w, n);
    let gh = g.adjoint();
    let pinv = (&gh * &g).try_inverse().expect("full column rank") * gh;
    let r = linalg::random_matrix(rng, n, w);
    let b = (k - linalg::identity(n)) * &pinv + r * (linalg::identity(w) - &g * &pinv);
    (g, b)
}

/// Jordan data of `1 + AB` against `1 + BA` for planted pairs with `dim W <= 5`.
/// The first instance is the class `(2,2,1)` at 1 on `W` shrinking to `(1,1)` on `V`.
///
/// Failures count pairs that are not injective/surjective, and Jordan data that
/// break the column-deletion rule or miss the planted class.
pub fn jordan_suite(instances: usize, seed: u64) -> Result<Check> {
    let mut rng = rng(seed);
    let palette = eigenvalue_palette(true);
    let mut failures = 0;
    let mut skipped = 0;
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let (class, w) = if k == 0 {
            let one = ClassSpec::new(vec![(Scalar::one(), Partition::new(vec![1, 1]).unwrap())])?;
            (one, 5)
        } else {
            // B is onto V only if dim W - n is at least the number of blocks at 1.
            loop {
                let n = rng.random_range(1..=4);
                let class = random_class(&mut rng, n, &palette, 3);
                let blocks_at_one = class.eigen.iter().find(|(s, _)| s.is_one(0.0)).map_or(0, |(_, p)| p.len());
                if n + blocks_at_one <= 5 {
                    break (class, rng.random_range(n + blocks_at_one..=5));
                }
            }
        };
        let kmat = conjugate(&mut rng, &class.jordan_matrix());
        let (a, b) = planted_pair(&mut rng, &kmat, w);
        let scale = linalg::norm(&a).max(linalg::norm(&b)).max(1.0);
        if linalg::rank_with(&a, 1e-9, scale) != class.n || linalg::rank_with(&b, 1e-9, scale) != class.n {
            failures += 1;
            continue;
        }
        let one_ab = linalg::identity(w) + &a * &b;
        let one_ba = linalg::identity(class.n) + &b * &a;
        worst = worst.max(linalg::norm(&(&one_ba - &kmat)) / linalg::norm(&kmat));
        let mk = markers(&class);
        let (parent, child) = match (numeric_jordan(&one_ab, &mk, CLASS_TOL), numeric_jordan(&one_ba, &mk, CLASS_TOL)) {
            (Ok(p), Ok(c)) => (p, c),
            (Err(e), _) | (_, Err(e)) if skippable(&e) => {
                skipped += 1;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let predicted = jordan_child(&parent);
        if !predicted.same_as(&child, 1e-4) || !child.same_as(&class, 1e-4) {
            failures += 1;
        }
        if k == 0 {
            let at_one = parent.partition_at(&Scalar::one(), 1e-4).map(|p| p.parts().to_vec());
            failures += usize::from(at_one != Some(vec![2, 2, 1]));
        }
    }
    Ok(Check::finish("jordan", instances, skipped, worst, 1e-8, failures))
}

/// Classes of size at most 5 turned into legs through a shuffled marking (the
/// minimal one padded with extra entries) and read back.
///
/// Failures count legs whose class or rebuilt leg differs from the start, or whose
/// witness monodromy has the wrong Jordan data; the residual is the determinant identity.
pub fn legs_suite(instances: usize, seed: u64) -> Result<Check> {
    let mut rng = rng(seed);
    let palette = eigenvalue_palette(true);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..instances {
        let n = rng.random_range(1..=5);
        let class = random_class(&mut rng, n, &palette, 3);
        let mut marking = class.minimal_marking();
        for _ in 0..rng.random_range(0..=2) {
            marking.push(palette[rng.random_range(0..palette.len())].clone());
        }
        for i in (1..marking.len()).rev() {
            marking.swap(i, rng.random_range(0..=i));
        }
        let leg = marking_to_leg(&class, &marking)?;
        let back = leg_class(&leg)?;
        let rebuilt = marking_to_leg(&back, &marking_from_params(&leg.params))?;
        let lc = leg_to_class(&leg)?;
        if !back.same_as(&class, 0.0) || rebuilt != leg || !lc.recovered.same_as(&class, 1e-4) {
            failures += 1;
        }
        worst = worst.max(det_identity_residual(&class, &leg)?);
        worst = worst.max(lc.witness.moment_residual);
    }
    Ok(Check::finish("legs", instances, 0, worst, 1e-10, failures))
}

/// Result of the triangle experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleReport {
    pub check: Check,
    pub params: Vec<Scalar>,
    pub probe: Option<i64>,
    pub expected_dimension: i64,
}

/// A fiber point on the triangle with `d = (1,1,1)` and random rational `q` with
/// `q_1 q_2 q_3 = 1`, the two invariant relations there and the local dimension.
pub fn triangle_check(seed: u64) -> Result<TriangleReport> {
    let mut rng = rng(seed);
    let mut rational = || loop {
        let num = rng.random_range(-7i64..=7);
        let den = rng.random_range(1i64..=5);
        if num != 0 && num != den {
            return Scalar::ratio(num, den);
        }
    };
    let q1 = rational();
    let q2 = rational();
    let q3 = q1.mul(&q2).recip().expect("nonzero");
    let params = vec![q1, q2, q3];
    let core = ColouredQuiver::complete_multipartite(&[1, 1, 1])?;
    let legs = params.iter().map(|q| Leg::new(vec![1], vec![q.clone()])).collect::<Result<Vec<_>>>()?;
    let inst = DSInstance::from_legs("triangle", core.clone(), legs)?;
    let expected_dimension = kacmoody::expected_dimension(&core, &[1, 1, 1])?;
    let outcome = ds_search(&inst, SearchBudget { restarts: 16, iterations: 200 }, seed)?;
    let SearchOutcome::Found(w) = outcome else {
        let check = Check::finish("triangle", 1, 0, f64::INFINITY, 1e-9, 1);
        return Ok(TriangleReport { check, params, probe: None, expected_dimension });
    };
    let inv = triangle_invariants(&w.rep)?;
    let residual = inv.h1_residual().max(inv.h12_residual()).max(inv.cubic_residual()) / inv.scale();
    let probe = quotient_dimension_probe(&w.rep, &params).ok().map(|p| p.value);
    let failures = usize::from(probe != Some(expected_dimension)) + usize::from(expected_dimension != 2);
    let check = Check::finish("triangle", 1, 0, residual.max(w.check.fiber_residual), 1e-9, failures);
    Ok(TriangleReport { check, params, probe, expected_dimension })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs() {
        let t = tame_suite(20, 4).unwrap();
        assert!(t.pass, "{t:?}");
        let j = jordan_suite(20, 5).unwrap();
        assert!(j.pass, "{j:?}");
        let l = legs_suite(20, 6).unwrap();
        assert!(l.pass, "{l:?}");
        let tri = triangle_check(7).unwrap();
        assert!(tri.check.pass, "{tri:?}");
        assert_eq!(tri.probe, Some(2));
    }
}
