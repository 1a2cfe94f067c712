use std::collections::BTreeMap;

use num_complex::Complex64;

use super::GraphRep;
use crate::error::{Error, Result};
use crate::graph::Colour;
use crate::linalg::{self, CMat};
use crate::scalar::Scalar;

pub const DEFAULT_FIBER_TOL: f64 = 1e-8;

/// Position of each node of a colour class inside `V_c = (+)_{i in I_c} V_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourLayout {
    pub colour: Colour,
    /// `(node, offset, dim)` in the class order.
    pub blocks: Vec<(usize, usize, usize)>,
    pub total: usize,
}

impl ColourLayout {
    fn new(rep: &GraphRep, colour: Colour) -> Result<Self> {
        let class = rep
            .quiver()
            .colour_class(colour)
            .ok_or_else(|| Error::InvalidInput(format!("unknown colour {colour}")))?;
        let mut blocks = Vec::new();
        let mut o = 0;
        for v in class.ordered_nodes() {
            let d = rep.dims()[v];
            blocks.push((v, o, d));
            o += d;
        }
        Ok(ColourLayout { colour, blocks, total: o })
    }
}

/// `v_+ = 1 + sum_{i<j} v_ij` and `v_- = 1 + sum_{i>j} v_ij` on `V_c`.
pub fn assemble_unitriangular(rep: &GraphRep, colour: Colour) -> Result<(CMat, CMat, ColourLayout)> {
    let layout = ColourLayout::new(rep, colour)?;
    let n = layout.total;
    let mut vp = linalg::identity(n);
    let mut vm = linalg::identity(n);
    for (a, &(i, oi, di)) in layout.blocks.iter().enumerate() {
        for (b, &(j, oj, dj)) in layout.blocks.iter().enumerate() {
            if a == b || di == 0 || dj == 0 {
                continue;
            }
            // Nodes in the same part are not joined, so their block stays zero.
            let Some(m) = rep.map(i, j) else { continue };
            if rep.quiver().edge_colour(i, j) != Some(colour) {
                continue;
            }
            if a < b {
                vp.view_mut((oi, oj), (di, dj)).copy_from(m);
            } else {
                vm.view_mut((oi, oj), (di, dj)).copy_from(m);
            }
        }
    }
    Ok((vp, vm, layout))
}

/// Trailing principal minors `Delta_i` of `v_- v_+` and their product `f_c`.
pub fn invertibility_minors(rep: &GraphRep, colour: Colour) -> Result<(Vec<(usize, Complex64)>, Complex64)> {
    let (vp, vm, layout) = assemble_unitriangular(rep, colour)?;
    let prod = vm * vp;
    let n = layout.total;
    let mut minors = Vec::new();
    let mut f = Complex64::new(1.0, 0.0);
    for &(v, o, _) in &layout.blocks {
        let k = n - o;
        let sub = prod.view((o, o), (k, k)).into_owned();
        let det = linalg::det(&sub);
        f *= det;
        minors.push((v, det));
    }
    Ok((minors, f))
}

/// `v_- v_+ = w_+ g w_-` with `w_+` upper and `w_-` lower block-unitriangular.
#[derive(Debug, Clone, PartialEq)]
pub struct BigCell {
    pub layout: ColourLayout,
    pub w_plus: CMat,
    pub w_minus: CMat,
    /// Diagonal blocks of `g`, one per node in class order.
    pub g: Vec<(usize, CMat)>,
}

impl BigCell {
    pub fn g_full(&self) -> CMat {
        let blocks: Vec<CMat> = self.g.iter().map(|(_, m)| m.clone()).collect();
        linalg::block_diag(&blocks)
    }

    pub fn g_at(&self, node: usize) -> Option<&CMat> {
        self.g.iter().find(|(v, _)| *v == node).map(|(_, m)| m)
    }
}

/// Block UDL factorisation, eliminating from the last node of the class upwards.
pub fn big_cell_factor(rep: &GraphRep, colour: Colour) -> Result<BigCell> {
    let (vp, vm, layout) = assemble_unitriangular(rep, colour)?;
    let sizes: Vec<usize> = layout.blocks.iter().map(|b| b.2).collect();
    match linalg::block_udl(&(&vm * &vp), &sizes) {
        Ok(f) => Ok(BigCell {
            g: layout.blocks.iter().map(|b| b.0).zip(f.g).collect(),
            layout,
            w_plus: f.w_plus,
            w_minus: f.w_minus,
        }),
        Err((k, false)) => Err(Error::NotInvertible { colour, node: layout.blocks[k].0 }),
        Err((k, true)) => Err(Error::Indeterminate(format!(
            "block at node {} of colour {colour} is nearly singular",
            layout.blocks[k].0
        ))),
    }
}

/// Values of the moment map together with the per-colour factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Moment {
    /// `mu_i` for every node.
    pub mu: Vec<CMat>,
    pub factors: BTreeMap<Colour, BigCell>,
}

/// `mu_i = prod_{c at i} g_{c,i}`, colours taken in the node's colour order.
pub fn moment_map(rep: &GraphRep) -> Result<Moment> {
    let q = rep.quiver();
    let mut factors = BTreeMap::new();
    for class in q.colours() {
        factors.insert(class.colour, big_cell_factor(rep, class.colour)?);
    }
    let mut mu = Vec::with_capacity(q.num_nodes());
    for i in 0..q.num_nodes() {
        let mut m = linalg::identity(rep.dims()[i]);
        for c in q.node_colour_order(i) {
            let gi = factors[c].g_at(i).expect("node belongs to its colours");
            m *= gi;
        }
        mu.push(m);
    }
    Ok(Moment { mu, factors })
}

/// Largest relative deviation `|mu_i - q_i| / max(1, |mu_i|)` over the nodes.
pub fn fiber_residual(rep: &GraphRep, params: &[Scalar]) -> Result<f64> {
    if params.len() != rep.quiver().num_nodes() {
        return Err(Error::DimensionMismatch("one parameter per node expected".into()));
    }
    let m = moment_map(rep)?;
    let mut worst: f64 = 0.0;
    for (i, mu) in m.mu.iter().enumerate() {
        let d = mu.nrows();
        let target = linalg::identity(d) * params[i].to_c64();
        let scale = linalg::norm(mu).max(1.0);
        worst = worst.max(linalg::norm(&(mu - target)) / scale);
    }
    Ok(worst)
}

/// `|mu_i - q_i| < tol * max(1, |mu_i|)` at every node.
pub fn in_fiber(rep: &GraphRep, params: &[Scalar], tol: f64) -> Result<bool> {
    Ok(fiber_residual(rep, params)? < tol)
}
