use num_complex::Complex64;

use super::{big_cell_factor, GraphRep};
use crate::error::{Error, Result};

/// Invariant functions of a rank-one representation of the monochromatic triangle.
///
/// Nodes are labelled 1, 2, 3 in the reverse of the colour order, so that `h_1`
/// and `h_2` are the big-cell factors at nodes 1 and 2 and `h_1 h_2` is the
/// trailing 2x2 minor of `v_- v_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleInvariants {
    /// Graph nodes carrying labels 1, 2, 3.
    pub labels: [usize; 3],
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub p: Complex64,
    pub r: Complex64,
    pub h1: Complex64,
    pub h2: Complex64,
}

impl TriangleInvariants {
    /// `|abc - pr|`.
    pub fn cubic_residual(&self) -> f64 {
        (self.a * self.b * self.c - self.p * self.r).norm()
    }

    /// `|1 + a + b - h_1|`.
    pub fn h1_residual(&self) -> f64 {
        (1.0 + self.a + self.b - self.h1).norm()
    }

    /// `|1 + b + c + ac - p - r - h_1 h_2|`.
    pub fn h12_residual(&self) -> f64 {
        (1.0 + self.b + self.c + self.a * self.c - self.p - self.r - self.h1 * self.h2).norm()
    }

    pub fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.p, self.r, self.h1, self.h1 * self.h2]
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max)
    }
}

pub fn triangle_invariants(rep: &GraphRep) -> Result<TriangleInvariants> {
    let q = rep.quiver();
    let shape_ok = q.num_nodes() == 3
        && q.colours().len() == 1
        && q.colours()[0].parts.iter().all(|p| p.len() == 1)
        && q.colours()[0].parts.len() == 3;
    if !shape_ok {
        return Err(Error::InvalidInput("expected a single-coloured triangle".into()));
    }
    if rep.dims() != [1, 1, 1] {
        return Err(Error::DimensionMismatch("triangle invariants need d = (1,1,1)".into()));
    }
    let order = q.colours()[0].ordered_nodes();
    let labels = [order[2], order[1], order[0]];
    let v = |i: usize, j: usize| -> Complex64 { rep.map(labels[i - 1], labels[j - 1]).expect("edge")[(0, 0)] };
    let a = v(1, 2) * v(2, 1);
    let b = v(1, 3) * v(3, 1);
    let c = v(2, 3) * v(3, 2);
    let p = v(1, 2) * v(2, 3) * v(3, 1);
    let r = v(2, 1) * v(1, 3) * v(3, 2);
    let bc = big_cell_factor(rep, q.colours()[0].colour)?;
    let h1 = bc.g_at(labels[0]).expect("node")[(0, 0)];
    let h2 = bc.g_at(labels[1]).expect("node")[(0, 0)];
    Ok(TriangleInvariants { labels, a, b, c, p, r, h1, h2 })
}
