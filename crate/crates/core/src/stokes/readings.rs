use std::fmt;

use crate::blocklinalg::ClassSpec;
use crate::error::{Error, Result};
use crate::graph::{ColouredQuiver, Leg};
use crate::kacmoody;
use crate::scalar::Scalar;

use super::legs::leg_class;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadingKind {
    Generic,
    /// Read through the given part of the core (0-based).
    Part(usize),
}

/// Where a reading places a class.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingClass {
    pub node: usize,
    /// `true` for a class in `GL(U)` at an extra marked point, `false` for a formal-monodromy class on `V_i`.
    pub at_marked_point: bool,
    pub class: Result<ClassSpec>,
}

/// The basic data of one wild character variety attached to a supernova graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Reading {
    pub kind: ReadingKind,
    /// Rank of the structure group.
    pub rank: i64,
    /// Number of extra simple poles.
    pub m: usize,
    /// `(node, dim V_i)` for the factors of `H`.
    pub h_dims: Vec<(usize, i64)>,
    pub classes: Vec<ReadingClass>,
    /// Number of distinct eigenvalues of the leading coefficient.
    pub num_a: usize,
    /// Number of eigenvalues of the next coefficient on each eigenspace of the leading one.
    pub num_t: Vec<usize>,
    pub empty: bool,
    pub empty_reasons: Vec<String>,
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ReadingKind::Generic => "generic".to_string(),
            ReadingKind::Part(j) => format!("part{}", j + 1),
        };
        let h: Vec<String> = self.h_dims.iter().map(|(_, d)| d.to_string()).collect();
        let t: Vec<String> = self.num_t.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "READING {kind} rank={} m={} H=({}) A={} T=({}) empty={}",
            self.rank,
            self.m,
            h.join(","),
            self.num_a,
            t.join(","),
            self.empty
        )?;
        for c in &self.classes {
            let tag = if c.at_marked_point { "C" } else { "Cbreve" };
            match &c.class {
                Ok(cl) => write!(f, " {tag}[{}]={{{cl}}}", c.node)?,
                Err(_) => write!(f, " {tag}[{}]=empty", c.node)?,
            }
        }
        Ok(())
    }
}

/// The generic reading and one reading per part of the core.
pub fn emit_readings(quiver: &ColouredQuiver, params: &[Scalar], dims: &[i64]) -> Result<Vec<Reading>> {
    let info = quiver
        .core()
        .ok_or_else(|| Error::InvalidGraph("readings need a supernova graph".into()))?;
    let n = quiver.num_nodes();
    if params.len() != n || dims.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} parameters and dimensions")));
    }
    let leg_of = |l: usize| Leg {
        dims: info.legs[l].iter().map(|&v| dims[v]).collect(),
        params: info.legs[l].iter().map(|&v| params[v].clone()).collect(),
    };
    let leg_index = |v: usize| info.legs.iter().position(|c| c[0] == v).expect("core node has a leg");
    let mut det_reason = Vec::new();
    match kacmoody::param_power(params, dims) {
        Ok(p) if !p.is_one(1e-10) => det_reason.push(format!("q^d = {p} is not 1")),
        Ok(_) => {}
        Err(e) => return Err(e),
    }

    let k = info.parts.len();
    let mut out = Vec::with_capacity(k + 1);

    let core_nodes = info.core_nodes();
    let mut generic = Reading {
        kind: ReadingKind::Generic,
        rank: core_nodes.iter().map(|&v| dims[v]).sum(),
        m: 0,
        h_dims: core_nodes.iter().map(|&v| (v, dims[v])).collect(),
        classes: core_nodes
            .iter()
            .map(|&v| ReadingClass { node: v, at_marked_point: false, class: leg_class(&leg_of(leg_index(v))) })
            .collect(),
        num_a: k,
        num_t: info.parts.iter().map(|p| p.len()).collect(),
        empty: false,
        empty_reasons: det_reason.clone(),
    };
    finish(&mut generic);
    out.push(generic);

    for (j, part) in info.parts.iter().enumerate() {
        let rest: Vec<usize> = core_nodes.iter().copied().filter(|v| !part.contains(v)).collect();
        let u: i64 = rest.iter().map(|&v| dims[v]).sum();
        let mut classes: Vec<ReadingClass> = rest
            .iter()
            .map(|&v| ReadingClass { node: v, at_marked_point: false, class: leg_class(&leg_of(leg_index(v))) })
            .collect();
        let mut reasons = det_reason.clone();
        for &v in part {
            if dims[v] > u {
                reasons.push(format!("dim V at {} exceeds rank {u}", quiver.name(v)));
            }
            let leg = leg_of(leg_index(v));
            let mut hat_dims = vec![u];
            hat_dims.extend(&leg.dims);
            let mut hat_params = vec![Scalar::one()];
            hat_params.extend(leg.params.iter().cloned());
            let class = Leg::new(hat_dims, hat_params)
                .and_then(|hat| leg_class(&hat))
                .map(|c| c.inverse());
            classes.push(ReadingClass { node: v, at_marked_point: true, class });
        }
        let mut r = Reading {
            kind: ReadingKind::Part(j),
            rank: u,
            m: part.len(),
            h_dims: rest.iter().map(|&v| (v, dims[v])).collect(),
            classes,
            num_a: k - 1,
            num_t: info
                .parts
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != j)
                .map(|(_, p)| p.len())
                .collect(),
            empty: false,
            empty_reasons: reasons,
        };
        finish(&mut r);
        out.push(r);
    }
    Ok(out)
}

fn finish(r: &mut Reading) {
    for c in &r.classes {
        if let Err(e) = &c.class {
            r.empty_reasons.push(format!("class at node {} is empty: {e}", c.node));
        }
    }
    r.empty = !r.empty_reasons.is_empty();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::attach_legs;

    fn trivial_legs(dims: &[i64], params: &[Scalar]) -> Vec<Leg> {
        dims.iter()
            .zip(params)
            .map(|(&d, q)| Leg::new(vec![d], vec![q.clone()]).unwrap())
            .collect()
    }

    #[test]
    fn triangle_has_four_readings() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1, 1]).unwrap();
        let params = [Scalar::int(2), Scalar::int(3), Scalar::ratio(1, 6)];
        let sn = attach_legs(&core, &trivial_legs(&[1, 1, 1], &params)).unwrap();
        let rs = emit_readings(&sn.quiver, &sn.params, &sn.dims).unwrap();
        let ranks: Vec<i64> = rs.iter().map(|r| r.rank).collect();
        assert_eq!(ranks, vec![3, 2, 2, 2]);
        assert!(rs.iter().all(|r| !r.empty), "{:?}", rs.iter().map(|r| r.empty_reasons.clone()).collect::<Vec<_>>());
        assert_eq!(rs[1].m, 1);
        assert_eq!(rs[1].num_a, 2);
    }

    #[test]
    fn star_has_three_readings() {
        let core = ColouredQuiver::complete_multipartite(&[1, 3]).unwrap();
        let legs = vec![
            Leg::new(vec![2, 1], vec![Scalar::int(2), Scalar::int(3)]).unwrap(),
            Leg::new(vec![1], vec![Scalar::int(5)]).unwrap(),
            Leg::new(vec![1], vec![Scalar::int(7)]).unwrap(),
            Leg::new(vec![1], vec![Scalar::int(11)]).unwrap(),
        ];
        let sn = attach_legs(&core, &legs).unwrap();
        let rs = emit_readings(&sn.quiver, &sn.params, &sn.dims).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs[2].m, 3);
        assert_eq!(rs[2].rank, 2);
        assert_eq!(rs[2].num_a, 1);
    }

    #[test]
    fn single_node_core() {
        let core = ColouredQuiver::complete_multipartite(&[1]).unwrap();
        let sn = attach_legs(&core, &trivial_legs(&[2], &[Scalar::one()])).unwrap();
        let rs = emit_readings(&sn.quiver, &sn.params, &sn.dims).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].rank, 2);
        assert_eq!(rs[1].rank, 0);
        assert!(rs[1].empty);
    }
}
