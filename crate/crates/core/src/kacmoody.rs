//! Root combinatorics of the Kac-Moody algebra attached to a graph.
//!
//! The Cartan matrix is `2 - adjacency`, the form is `(a, b) = a^T C b`, simple
//! reflections act on dimension vectors by `s_i(b) = b - (b, e_i) e_i` and on
//! parameters by `r_i(q)_j = q_i^{-(e_i, e_j)} q_j`, so that `q^b` is invariant.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::ColouredQuiver;
use crate::scalar::Scalar;

pub type RootVector = Vec<i64>;
pub type Params = Vec<Scalar>;

/// Tolerance for `q^a = 1` when the parameters are floats.
pub const FLOAT_PARAM_TOL: f64 = 1e-10;

pub fn cartan_matrix(q: &ColouredQuiver) -> Vec<Vec<i64>> {
    let adj = q.adjacency();
    let n = q.num_nodes();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2 } else { -adj[i][j] }).collect())
        .collect()
}

fn check_len(q: &ColouredQuiver, v: usize) -> Result<()> {
    if v != q.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {v} on a graph with {} nodes",
            q.num_nodes()
        )));
    }
    Ok(())
}

fn form_with(c: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let mut s = 0;
    for (i, row) in c.iter().enumerate() {
        if a[i] == 0 {
            continue;
        }
        let mut t = 0;
        for (j, cij) in row.iter().enumerate() {
            t += cij * b[j];
        }
        s += a[i] * t;
    }
    s
}

pub fn form(q: &ColouredQuiver, a: &[i64], b: &[i64]) -> Result<i64> {
    check_len(q, a.len())?;
    check_len(q, b.len())?;
    Ok(form_with(&cartan_matrix(q), a, b))
}

/// `(e_i, b)` for every `i`.
fn pairings(c: &[Vec<i64>], b: &[i64]) -> Vec<i64> {
    c.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect()
}

fn reflect_with(c: &[Vec<i64>], i: usize, d: &[i64]) -> RootVector {
    let p: i64 = c[i].iter().zip(d).map(|(x, y)| x * y).sum();
    let mut out = d.to_vec();
    out[i] -= p;
    out
}

pub fn reflect_dim(q: &ColouredQuiver, i: usize, d: &[i64]) -> Result<RootVector> {
    check_len(q, d.len())?;
    if i >= q.num_nodes() {
        return Err(Error::InvalidInput(format!("node index {i} out of range")));
    }
    Ok(reflect_with(&cartan_matrix(q), i, d))
}

pub fn reflect_params(q: &ColouredQuiver, i: usize, params: &[Scalar]) -> Result<Params> {
    check_len(q, params.len())?;
    if i >= q.num_nodes() {
        return Err(Error::InvalidInput(format!("node index {i} out of range")));
    }
    let c = cartan_matrix(q);
    params
        .iter()
        .enumerate()
        .map(|(j, qj)| {
            let f = params[i].powi(-c[i][j]).ok_or_else(|| {
                Error::InvalidInput(format!("parameter at node {i} is zero"))
            })?;
            Ok(f.mul(qj))
        })
        .collect()
}

/// `q^b = prod_j q_j^{b_j}`.
pub fn param_power(params: &[Scalar], b: &[i64]) -> Result<Scalar> {
    if params.len() != b.len() {
        return Err(Error::DimensionMismatch("parameter and root lengths differ".into()));
    }
    let mut acc = Scalar::one();
    for (p, &e) in params.iter().zip(b) {
        if e == 0 {
            continue;
        }
        let f = p
            .powi(e)
            .ok_or_else(|| Error::InvalidInput("zero parameter raised to a negative power".into()))?;
        acc = acc.mul(&f);
    }
    if params.iter().any(|p| !p.is_exact()) {
        acc = Scalar::Float(acc.to_c64());
    }
    Ok(acc)
}

/// Whether `q^b = 1`: exact when all parameters are exact, within [`FLOAT_PARAM_TOL`] otherwise.
pub fn param_power_is_one(params: &[Scalar], b: &[i64]) -> Result<bool> {
    Ok(param_power(params, b)?.is_one(FLOAT_PARAM_TOL))
}

pub fn support(d: &[i64]) -> Vec<usize> {
    d.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i).collect()
}

/// Nonzero, nonnegative, connected support and `(e_i, b) <= 0` for all `i`.
pub fn in_fundamental_region(q: &ColouredQuiver, b: &[i64]) -> bool {
    if b.len() != q.num_nodes() || b.iter().any(|&x| x < 0) || b.iter().all(|&x| x == 0) {
        return false;
    }
    let c = cartan_matrix(q);
    pairings(&c, b).iter().all(|&p| p <= 0) && q.is_connected_on(&support(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootClassification {
    pub real: Vec<RootVector>,
    pub imaginary: Vec<RootVector>,
}

fn box_vectors(n: usize, upper: &[i64]) -> Vec<RootVector> {
    let mut out = vec![Vec::with_capacity(n)];
    for &u in upper.iter().take(n) {
        let mut next = Vec::with_capacity(out.len() * (u.max(0) as usize + 1));
        for v in &out {
            for k in 0..=u.max(0) {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn orbit_in_box(c: &[Vec<i64>], seeds: Vec<RootVector>, bound: i64) -> BTreeSet<RootVector> {
    let n = c.len();
    let mut seen: BTreeSet<RootVector> = BTreeSet::new();
    let mut queue: VecDeque<RootVector> = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for i in 0..n {
            let w = reflect_with(c, i, &v);
            if w.iter().all(|&x| (0..=bound).contains(&x)) && !seen.contains(&w) {
                seen.insert(w.clone());
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Positive roots with all coordinates at most `bound`.
///
/// Every positive root is reached from a simple root or a fundamental-region
/// element through a chain of reflections that only increases coordinates, so
/// closing under reflections inside the box is exhaustive.
pub fn classify_roots(q: &ColouredQuiver, bound: i64) -> RootClassification {
    let n = q.num_nodes();
    let c = cartan_matrix(q);
    if bound < 1 {
        return RootClassification { real: Vec::new(), imaginary: Vec::new() };
    }
    let simple: Vec<RootVector> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let real = orbit_in_box(&c, simple, bound);
    let fundamental: Vec<RootVector> = box_vectors(n, &vec![bound; n])
        .into_iter()
        .filter(|b| in_fundamental_region(q, b))
        .collect();
    let imaginary = orbit_in_box(&c, fundamental, bound);
    RootClassification {
        real: real.into_iter().collect(),
        imaginary: imaginary.into_iter().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Real,
    Imaginary,
}

/// Decides whether `d` is a positive root by reflecting it down to a simple root
/// or into the fundamental region.
pub fn root_kind(q: &ColouredQuiver, d: &[i64]) -> Result<Option<RootKind>> {
    check_len(q, d.len())?;
    if d.iter().any(|&x| x < 0) || d.iter().all(|&x| x == 0) {
        return Ok(None);
    }
    let c = cartan_matrix(q);
    let mut v = d.to_vec();
    loop {
        if v.iter().sum::<i64>() == 1 {
            return Ok(Some(RootKind::Real));
        }
        let p = pairings(&c, &v);
        match p.iter().position(|&x| x > 0) {
            None => {
                return Ok(if q.is_connected_on(&support(&v)) {
                    Some(RootKind::Imaginary)
                } else {
                    None
                })
            }
            Some(i) => {
                v[i] -= p[i];
                if v[i] < 0 {
                    return Ok(None);
                }
            }
        }
    }
}

pub fn is_positive_root(q: &ColouredQuiver, d: &[i64]) -> Result<bool> {
    Ok(root_kind(q, d)?.is_some())
}

pub fn expected_dimension(q: &ColouredQuiver, d: &[i64]) -> Result<i64> {
    Ok(2 - form(q, d, d)?)
}

/// `{a : (a, a) <= 2, 0 <= a <= d} \ {0, d}`.
pub fn bounded_roots(q: &ColouredQuiver, d: &[i64]) -> Result<Vec<RootVector>> {
    check_len(q, d.len())?;
    if d.iter().any(|&x| x < 0) {
        return Err(Error::InvalidInput("dimension vector with a negative entry".into()));
    }
    let c = cartan_matrix(q);
    Ok(box_vectors(d.len(), d)
        .into_iter()
        .filter(|a| a.iter().any(|&x| x != 0) && a.as_slice() != d && form_with(&c, a, a) <= 2)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Genericity {
    Generic,
    NotGeneric { witness: RootVector },
}

/// Genericity of `params` for `d`: no `a` in [`bounded_roots`] has `q^a = 1`.
pub fn is_generic(q: &ColouredQuiver, params: &[Scalar], d: &[i64]) -> Result<Genericity> {
    check_len(q, params.len())?;
    for a in bounded_roots(q, d)? {
        if param_power_is_one(params, &a)? {
            return Ok(Genericity::NotGeneric { witness: a });
        }
    }
    Ok(Genericity::Generic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ColouredQuiver {
        ColouredQuiver::complete_multipartite(&[1, 1, 1]).unwrap()
    }

    #[test]
    fn interval_form() {
        let q = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        assert_eq!(form(&q, &[1, 1], &[1, 1]).unwrap(), 2);
        assert_eq!(expected_dimension(&q, &[1, 1]).unwrap(), 0);
    }

    #[test]
    fn triangle_roots_bound_one() {
        let r = classify_roots(&triangle(), 1);
        assert_eq!(r.real.len(), 6);
        assert_eq!(r.imaginary, vec![vec![1, 1, 1]]);
        assert_eq!(expected_dimension(&triangle(), &[1, 1, 1]).unwrap(), 2);
    }

    #[test]
    fn isolated_nodes_have_only_simple_roots() {
        let q = ColouredQuiver::complete_multipartite(&[3]).unwrap();
        let r = classify_roots(&q, 2);
        assert_eq!(r.real.len(), 3);
        assert!(r.imaginary.is_empty());
    }

    #[test]
    fn reduction_agrees_with_enumeration_on_affine_d4() {
        let q = ColouredQuiver::complete_multipartite(&[1, 4]).unwrap();
        let r = classify_roots(&q, 3);
        for v in box_vectors(5, &[3; 5]) {
            let kind = root_kind(&q, &v).unwrap();
            assert_eq!(kind == Some(RootKind::Real), r.real.contains(&v), "{v:?}");
            assert_eq!(kind == Some(RootKind::Imaginary), r.imaginary.contains(&v), "{v:?}");
        }
        assert!(r.imaginary.contains(&vec![2, 1, 1, 1, 1]));
    }

    #[test]
    fn params_reflection_preserves_powers() {
        let q = triangle();
        let p = vec![Scalar::int(2), Scalar::ratio(1, 3), Scalar::ratio(3, 2)];
        let d = vec![1, 2, 1];
        for i in 0..3 {
            let p2 = reflect_params(&q, i, &p).unwrap();
            let d2 = reflect_dim(&q, i, &d).unwrap();
            assert_eq!(param_power(&p, &d).unwrap(), param_power(&p2, &d2).unwrap());
        }
    }

    #[test]
    fn genericity_witness() {
        let q = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let p = vec![Scalar::int(1), Scalar::int(5)];
        assert_eq!(
            is_generic(&q, &p, &[1, 1]).unwrap(),
            Genericity::NotGeneric { witness: vec![1, 0] }
        );
        let p = vec![Scalar::int(2), Scalar::ratio(1, 2)];
        assert_eq!(is_generic(&q, &p, &[1, 1]).unwrap(), Genericity::Generic);
    }
}
