//! Markings of conjugacy classes and the type-A legs they determine.

use num_complex::Complex64;

use crate::blocklinalg::{numeric_jordan, ClassSpec, Partition};
use crate::error::{Error, Result};
use crate::graph::{ColouredQuiver, Leg};
use crate::kacmoody;
use crate::linalg::{self, CMat};
use crate::scalar::Scalar;

use super::tame::CLASS_TOL;

const SAME: f64 = 1e-12;

/// Running products `xi_k = q_1 ... q_k`.
pub fn marking_from_params(params: &[Scalar]) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::with_capacity(params.len());
    for q in params {
        let next = match out.last() {
            Some(prev) => prev.mul(q),
            None => q.clone(),
        };
        out.push(next);
    }
    out
}

/// `q_1 = xi_1`, `q_k = xi_k / xi_{k-1}`.
pub fn params_from_marking(marking: &[Scalar]) -> Result<Vec<Scalar>> {
    let mut out = Vec::with_capacity(marking.len());
    for (k, xi) in marking.iter().enumerate() {
        if k == 0 {
            out.push(xi.clone());
        } else {
            out.push(
                xi.div(&marking[k - 1])
                    .ok_or_else(|| Error::InvalidMarking("marking contains zero".into()))?,
            );
        }
    }
    Ok(out)
}

/// Leg of a marked class: `d_k = rank (M - xi_1) ... (M - xi_{k-1})`, `q_k = xi_k / xi_{k-1}`.
pub fn marking_to_leg(class: &ClassSpec, marking: &[Scalar]) -> Result<Leg> {
    if marking.is_empty() {
        return Err(Error::InvalidMarking("empty marking".into()));
    }
    if marking.iter().any(|xi| xi.to_c64().norm() == 0.0) {
        return Err(Error::InvalidMarking("marking contains zero".into()));
    }
    for (s, p) in &class.eigen {
        let count = marking.iter().filter(|xi| xi.approx_eq(s, SAME)).count();
        if count < p.largest() {
            return Err(Error::InvalidMarking(format!(
                "eigenvalue {s} has a block of size {} but appears {count} times in the marking",
                p.largest()
            )));
        }
    }
    let mut dims = Vec::with_capacity(marking.len());
    for k in 0..marking.len() {
        let rank: usize = class
            .eigen
            .iter()
            .map(|(s, p)| {
                let used = marking[..k].iter().filter(|xi| xi.approx_eq(s, SAME)).count();
                p.parts().iter().map(|&b| b.saturating_sub(used)).sum::<usize>()
            })
            .sum();
        dims.push(rank as i64);
    }
    Leg::new(dims, params_from_marking(marking)?)
}

/// Class determined by a leg, from its dimensions and marking alone.
///
/// At eigenvalue `s` the number of blocks of size at least `j` is
/// `d_{i_j} - d_{i_j + 1}`, where `i_j` is the `j`-th occurrence of `s` in the marking.
pub fn leg_class(leg: &Leg) -> Result<ClassSpec> {
    leg.validate()?;
    let marking = marking_from_params(&leg.params);
    let w = leg.dims.len();
    let d = |k: usize| if k < w { leg.dims[k] } else { 0 };
    let mut eigen: Vec<(Scalar, Vec<i64>)> = Vec::new();
    for (k, xi) in marking.iter().enumerate() {
        let drop = d(k) - d(k + 1);
        if drop < 0 {
            return Err(Error::EmptyClass(format!(
                "dimension increases along the leg at position {}",
                k + 1
            )));
        }
        match eigen.iter_mut().find(|(s, _)| s.approx_eq(xi, SAME)) {
            Some((_, counts)) => counts.push(drop),
            None => eigen.push((xi.clone(), vec![drop])),
        }
    }
    let mut out = Vec::new();
    for (s, counts) in eigen {
        let counts: Vec<usize> = counts.into_iter().map(|c| c as usize).collect();
        let p = Partition::from_counts(&counts)?;
        if !p.is_empty() {
            out.push((s, p));
        }
    }
    ClassSpec::new(out)
}

/// The invertible leg representation built from an element `M` of the class.
///
/// `V_1 = C^n`, `b_k = (M / xi_k - 1)` restricted to `V_k` with image `V_{k+1}`,
/// and `a_k` the inclusion `V_{k+1} -> V_k`, all in orthonormal bases.
#[derive(Debug, Clone, PartialEq)]
pub struct LegWitness {
    /// `(a_k, b_k)` for each edge, `a_k: V_{k+1} -> V_k`, `b_k: V_k -> V_{k+1}`.
    pub maps: Vec<(CMat, CMat)>,
    pub dims: Vec<usize>,
    /// Largest residual of the node conditions `1 + b_{k-1} a_{k-1} = q_k (1 + a_k b_k)`.
    pub moment_residual: f64,
    /// `q_1 (1 + a_1 b_1)`.
    pub monodromy: CMat,
}

pub fn leg_witness(m: &CMat, leg: &Leg) -> Result<LegWitness> {
    let n = m.nrows();
    if leg.dims[0] as usize != n {
        return Err(Error::DimensionMismatch(format!(
            "leg starts at dimension {} but the matrix has size {n}",
            leg.dims[0]
        )));
    }
    let marking: Vec<Complex64> = marking_from_params(&leg.params).iter().map(|s| s.to_c64()).collect();
    let q: Vec<Complex64> = leg.params.iter().map(|s| s.to_c64()).collect();
    let w = leg.len();
    let mut bases = vec![linalg::identity(n)];
    let mut maps = Vec::new();
    for k in 0..w - 1 {
        let e = &bases[k];
        let img = (m - linalg::identity(n) * marking[k]) * e;
        let next = linalg::column_space(&img, 1e-9);
        if next.ncols() as i64 != leg.dims[k + 1] {
            return Err(Error::EmptyClass(format!(
                "image at position {} has dimension {}, leg expects {}",
                k + 2,
                next.ncols(),
                leg.dims[k + 1]
            )));
        }
        let b = next.adjoint() * (m / marking[k] - linalg::identity(n)) * e;
        let a = e.adjoint() * &next;
        maps.push((a, b));
        bases.push(next);
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.ncols()).collect();
    let one = |d: usize| linalg::identity(d);
    let mut residual: f64 = 0.0;
    let scale = linalg::norm(m).max(1.0);
    let monodromy = if let Some((a1, b1)) = maps.first() {
        (one(n) + a1 * b1) * q[0]
    } else {
        one(n) * q[0]
    };
    residual = residual.max(linalg::norm(&(&monodromy - m)) / scale);
    for k in 1..w {
        let (a, b) = &maps[k - 1];
        let lhs = one(dims[k]) + b * a;
        let rhs = match maps.get(k) {
            Some((an, bn)) => (one(dims[k]) + an * bn) * q[k],
            None => one(dims[k]) * q[k],
        };
        residual = residual.max(linalg::norm(&(lhs - rhs)) / scale);
    }
    Ok(LegWitness { maps, dims, moment_residual: residual, monodromy })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegClass {
    pub class: ClassSpec,
    pub witness: LegWitness,
    /// Jordan data of the witness monodromy, recovered numerically.
    pub recovered: ClassSpec,
}

/// Class of a leg together with a witness representation and its numerical Jordan data.
pub fn leg_to_class(leg: &Leg) -> Result<LegClass> {
    let class = leg_class(leg)?;
    let witness = leg_witness(&class.jordan_matrix(), leg)?;
    let markers: Vec<Scalar> = class.eigen.iter().map(|(s, _)| s.clone()).collect();
    let recovered = numeric_jordan(&witness.monodromy, &markers, CLASS_TOL)?;
    Ok(LegClass { class, witness, recovered })
}

/// `|det M - prod q_k^{d_k}|` relative to `max(1, |det M|)`.
pub fn det_identity_residual(class: &ClassSpec, leg: &Leg) -> Result<f64> {
    let lhs = class.determinant();
    let rhs = kacmoody::param_power(&leg.params, &leg.dims)?;
    if lhs.is_exact() && rhs.is_exact() {
        return Ok(if lhs == rhs { 0.0 } else { (lhs.to_c64() - rhs.to_c64()).norm() });
    }
    let l = lhs.to_c64();
    Ok((l - rhs.to_c64()).norm() / l.norm().max(1.0))
}

/// Outcome of a reflection performed by changing markings.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkingReflection {
    pub node: usize,
    pub params: Vec<Scalar>,
    pub dims: Vec<i64>,
    /// Scalar shift used for a core node.
    pub gamma: Option<Scalar>,
    pub expected_params: Vec<Scalar>,
    pub expected_dims: Vec<i64>,
    pub agrees: bool,
}

/// Reflection at `node` of a supernova graph carried out on markings.
///
/// At a leg-interior node the two marking entries defining `q_node` are
/// swapped. At a core node in part `I_j` the class on `U = (+)_{I \ I_j} V_l`
/// is re-marked, shifted by `gamma = q_node` to make the marking special, and
/// every leg outside `I_j` is scaled by `gamma`. The result is compared with
/// the Kac-Moody reflections.
pub fn reflect_marking(
    quiver: &ColouredQuiver,
    params: &[Scalar],
    dims: &[i64],
    node: usize,
    tol: f64,
) -> Result<MarkingReflection> {
    let info = quiver
        .core()
        .ok_or_else(|| Error::InvalidGraph("reflect_marking needs a supernova graph".into()))?
        .clone();
    let n = quiver.num_nodes();
    if params.len() != n || dims.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} parameters and dimensions")));
    }
    if node >= n {
        return Err(Error::InvalidInput(format!("node index {node} out of range")));
    }
    if params[node].is_one(tol) {
        return Err(Error::ReflectionRejected { node });
    }
    let (leg_idx, pos) = info
        .leg_position(node)
        .ok_or_else(|| Error::InvalidGraph(format!("node {node} lies on no leg")))?;
    let leg_of = |l: usize| -> Leg {
        let chain = &info.legs[l];
        Leg {
            dims: chain.iter().map(|&v| dims[v]).collect(),
            params: chain.iter().map(|&v| params[v].clone()).collect(),
        }
    };
    let mut new_params = params.to_vec();
    let mut new_dims = dims.to_vec();
    let mut gamma = None;

    if pos > 0 {
        let leg = leg_of(leg_idx);
        let class = leg_class(&leg)?;
        let mut marking = marking_from_params(&leg.params);
        marking.swap(pos - 1, pos);
        let new_leg = marking_to_leg(&class, &marking)?;
        for (k, &v) in info.legs[leg_idx].iter().enumerate() {
            new_params[v] = new_leg.params[k].clone();
            new_dims[v] = new_leg.dims[k];
        }
    } else {
        let core_node = info.legs[leg_idx][0];
        let part = info
            .part_of(core_node)
            .ok_or_else(|| Error::InvalidGraph("core node outside the core partition".into()))?;
        let u: i64 = info
            .core_nodes()
            .into_iter()
            .filter(|&l| info.part_of(l) != Some(part))
            .map(|l| dims[l])
            .sum();
        // Inverse class of the tame-side class on U, marked (1, xi_1, xi_2, ...).
        let leg = leg_of(leg_idx);
        let mut hat_dims = vec![u];
        hat_dims.extend(&leg.dims);
        let mut hat_params = vec![Scalar::one()];
        hat_params.extend(leg.params.iter().cloned());
        let hat = Leg::new(hat_dims, hat_params)?;
        let class = leg_class(&hat)?;
        let xi = marking_from_params(&leg.params);
        let g = xi[0].clone();
        let g_inv = g.recip().expect("nonzero parameter");
        // New marking (1, 1/gamma, xi_2/gamma, ...) of the shifted inverse class.
        let scaled = class.scaled(&g_inv);
        let mut marking = vec![Scalar::one(), g_inv.clone()];
        marking.extend(xi[1..].iter().map(|s| s.mul(&g_inv)));
        let new_hat = marking_to_leg(&scaled, &marking)?;
        for (k, &v) in info.legs[leg_idx].iter().enumerate() {
            new_params[v] = new_hat.params[k + 1].clone();
            new_dims[v] = new_hat.dims[k + 1];
        }
        for (l, chain) in info.legs.iter().enumerate() {
            let c = chain[0];
            if l != leg_idx && info.part_of(c) != Some(part) {
                new_params[c] = params[c].mul(&g);
            }
        }
        gamma = Some(g);
    }
    let expected_params = kacmoody::reflect_params(quiver, node, params)?;
    let expected_dims = kacmoody::reflect_dim(quiver, node, dims)?;
    let agrees = expected_dims == new_dims
        && expected_params
            .iter()
            .zip(&new_params)
            .all(|(a, b)| a.approx_eq(b, tol));
    Ok(MarkingReflection {
        node,
        params: new_params,
        dims: new_dims,
        gamma,
        expected_params,
        expected_dims,
        agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::attach_legs;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn semisimple_two_three() {
        let class = ClassSpec::semisimple(&[Scalar::int(2), Scalar::int(3)]).unwrap();
        let leg = marking_to_leg(&class, &[Scalar::int(2), Scalar::int(3)]).unwrap();
        assert_eq!(leg.dims, vec![2, 1]);
        assert_eq!(leg.params, vec![Scalar::int(2), Scalar::ratio(3, 2)]);
        assert_eq!(det_identity_residual(&class, &leg).unwrap(), 0.0);
    }

    #[test]
    fn scalar_class() {
        let class = ClassSpec::semisimple(&vec![Scalar::int(5); 3]).unwrap();
        let leg = marking_to_leg(&class, &[Scalar::int(5)]).unwrap();
        assert_eq!(leg.dims, vec![3]);
        let back = leg_to_class(&leg).unwrap();
        assert!(back.class.same_as(&class, 0.0));
        assert!(back.recovered.same_as(&class, 1e-9));
    }

    #[test]
    fn unipotent_block() {
        let class = ClassSpec::new(vec![(Scalar::one(), part(&[2]))]).unwrap();
        let leg = marking_to_leg(&class, &[Scalar::one(), Scalar::one()]).unwrap();
        assert_eq!(leg.dims, vec![2, 1]);
        assert_eq!(leg.params, vec![Scalar::one(), Scalar::one()]);
        let back = leg_to_class(&leg).unwrap();
        assert_eq!(back.class, class);
        assert!(back.recovered.same_as(&class, 1e-9));
        assert!(back.witness.moment_residual < 1e-12);
    }

    #[test]
    fn non_annihilating_marking() {
        let class = ClassSpec::new(vec![(Scalar::one(), part(&[2]))]).unwrap();
        assert!(matches!(marking_to_leg(&class, &[Scalar::one()]), Err(Error::InvalidMarking(_))));
    }

    #[test]
    fn increasing_dimensions_are_empty() {
        let leg = Leg::new(vec![1, 2], vec![Scalar::int(2), Scalar::int(3)]).unwrap();
        assert!(matches!(leg_class(&leg), Err(Error::EmptyClass(_))));
    }

    #[test]
    fn mixed_class_round_trip() {
        let class = ClassSpec::new(vec![
            (Scalar::int(2), part(&[2, 1])),
            (Scalar::ratio(-1, 3), part(&[1])),
        ])
        .unwrap();
        let marking = vec![Scalar::int(2), Scalar::ratio(-1, 3), Scalar::int(2)];
        let leg = marking_to_leg(&class, &marking).unwrap();
        assert_eq!(leg.dims, vec![4, 2, 1]);
        let back = leg_to_class(&leg).unwrap();
        assert_eq!(back.class, class);
        assert!(back.witness.moment_residual < 1e-10);
        assert!(back.recovered.same_as(&class, 1e-6));
        assert_eq!(marking_to_leg(&back.class, &marking).unwrap(), leg);
    }

    #[test]
    fn leg_interior_reflection() {
        // Interval core; leg at the first node carries a class with marking (2, 3).
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let legs = [
            Leg::new(vec![2, 1], vec![Scalar::int(2), Scalar::ratio(3, 2)]).unwrap(),
            Leg::new(vec![1], vec![Scalar::int(5)]).unwrap(),
        ];
        let sn = attach_legs(&core, &legs).unwrap();
        let r = reflect_marking(&sn.quiver, &sn.params, &sn.dims, 2, 1e-12).unwrap();
        assert!(r.agrees, "{r:?}");
        assert_eq!(r.params[2], Scalar::ratio(2, 3));
        assert_eq!(r.params[0], Scalar::int(3));
        assert!(r.gamma.is_none());
    }

    #[test]
    fn core_reflection_matches_weyl_group() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1, 1]).unwrap();
        let legs = [
            Leg::new(vec![1, 1], vec![Scalar::int(2), Scalar::int(3)]).unwrap(),
            Leg::new(vec![1], vec![Scalar::ratio(1, 5)]).unwrap(),
            Leg::new(vec![1], vec![Scalar::int(7)]).unwrap(),
        ];
        let sn = attach_legs(&core, &legs).unwrap();
        let r = reflect_marking(&sn.quiver, &sn.params, &sn.dims, 0, 1e-12).unwrap();
        assert!(r.agrees, "{r:?}");
        assert_eq!(r.gamma, Some(Scalar::int(2)));
        assert_eq!(r.params[0], Scalar::ratio(1, 2));
        assert_eq!(r.params[3], Scalar::int(6));
        assert_eq!(r.params[1], Scalar::ratio(2, 5));
    }

    #[test]
    fn unit_parameter_rejected() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let legs = [
            Leg::new(vec![1], vec![Scalar::one()]).unwrap(),
            Leg::new(vec![1], vec![Scalar::int(2)]).unwrap(),
        ];
        let sn = attach_legs(&core, &legs).unwrap();
        assert_eq!(
            reflect_marking(&sn.quiver, &sn.params, &sn.dims, 0, 1e-12).unwrap_err(),
            Error::ReflectionRejected { node: 0 }
        );
    }
}
