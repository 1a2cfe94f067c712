use num_complex::Complex64;

use super::ColouredQuiver;
use crate::error::{Error, Result};

/// One simultaneous eigenspace: eigenvalue of the subleading term and its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenNode {
    pub t_eig: Complex64,
    pub dim: usize,
}

/// Eigenvalue of the leading term together with the eigenspaces it splits into.
#[derive(Debug, Clone, PartialEq)]
pub struct IrregularPart {
    pub a_eig: Complex64,
    pub nodes: Vec<EigenNode>,
}

/// Diagonal irregular type `A / z^2 + T / z`, recorded by its simultaneous eigenspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct IrregularType {
    pub parts: Vec<IrregularPart>,
}

fn same(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

impl IrregularType {
    pub fn new(parts: Vec<IrregularPart>) -> Result<Self> {
        let t = IrregularType { parts };
        t.validate(1e-12)?;
        Ok(t)
    }

    /// Groups the diagonal entries of `A` and `T` into simultaneous eigenspaces.
    ///
    /// Parts follow first appearance of each `A` eigenvalue; nodes within a part
    /// follow first appearance of each `T` eigenvalue.
    pub fn from_diagonals(a_diag: &[Complex64], t_diag: &[Complex64], tol: f64) -> Result<Self> {
        if a_diag.len() != t_diag.len() {
            return Err(Error::InvalidIrregularType(format!(
                "A has {} diagonal entries but T has {}",
                a_diag.len(),
                t_diag.len()
            )));
        }
        let mut parts: Vec<IrregularPart> = Vec::new();
        for (&a, &t) in a_diag.iter().zip(t_diag) {
            let part = match parts.iter_mut().position(|p| same(p.a_eig, a, tol)) {
                Some(k) => &mut parts[k],
                None => {
                    parts.push(IrregularPart { a_eig: a, nodes: Vec::new() });
                    parts.last_mut().unwrap()
                }
            };
            match part.nodes.iter_mut().find(|n| same(n.t_eig, t, tol)) {
                Some(node) => node.dim += 1,
                None => part.nodes.push(EigenNode { t_eig: t, dim: 1 }),
            }
        }
        let out = IrregularType { parts };
        out.validate(tol)?;
        Ok(out)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.parts.is_empty() {
            return Err(Error::InvalidIrregularType("no eigenvalues".into()));
        }
        for (j, p) in self.parts.iter().enumerate() {
            if p.nodes.is_empty() {
                return Err(Error::InvalidIrregularType(format!("part {} has no eigenspaces", j + 1)));
            }
            for q in &self.parts[j + 1..] {
                if same(p.a_eig, q.a_eig, tol) {
                    return Err(Error::InvalidIrregularType(format!(
                        "leading eigenvalue {} repeated across parts",
                        p.a_eig
                    )));
                }
            }
            for (i, n) in p.nodes.iter().enumerate() {
                if n.dim == 0 {
                    return Err(Error::InvalidIrregularType("zero-dimensional eigenspace".into()));
                }
                for m in &p.nodes[i + 1..] {
                    if same(n.t_eig, m.t_eig, tol) {
                        return Err(Error::InvalidIrregularType(format!(
                            "eigenvalue {} of T repeated within part {}",
                            n.t_eig,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Shifts every leading eigenvalue by `shift`.
    pub fn translate(&self, shift: Complex64) -> Self {
        IrregularType {
            parts: self
                .parts
                .iter()
                .map(|p| IrregularPart {
                    a_eig: p.a_eig + shift,
                    nodes: p.nodes.clone(),
                })
                .collect(),
        }
    }
}

/// Fission graph: one node per eigenspace, parts given by the leading eigenvalues.
///
/// Returns the graph together with the eigenspace dimensions in node order.
pub fn fission_graph(irr: &IrregularType) -> Result<(ColouredQuiver, Vec<usize>)> {
    irr.validate(1e-12)?;
    let sizes: Vec<usize> = irr.parts.iter().map(|p| p.nodes.len()).collect();
    let q = ColouredQuiver::complete_multipartite(&sizes)?;
    let dims = irr.parts.iter().flat_map(|p| p.nodes.iter().map(|n| n.dim)).collect();
    Ok((q, dims))
}
