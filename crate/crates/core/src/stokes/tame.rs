use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::blocklinalg::{build_phi_chain, gauss_gram, jordan_child, numeric_jordan, ClassSpec};
use crate::error::{Error, Result};
use crate::field::InvertBand;
use crate::graph::ColouredQuiver;
use crate::linalg::{self, CMat};
use crate::representation::GraphRep;
use crate::scalar::Scalar;

/// Clustering radius used when comparing conjugacy classes of float matrices.
pub const CLASS_TOL: f64 = 1e-6;

/// Relative band for the rank of `T_i - 1`.
const RANK_HI: f64 = 1e-8;
const RANK_LO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TameTuple {
    pub t: Vec<CMat>,
    /// Expected class of `T_m ... T_1`; its eigenvalues are used as markers.
    pub target: Option<ClassSpec>,
}

impl TameTuple {
    pub fn new(t: Vec<CMat>, target: Option<ClassSpec>) -> Result<Self> {
        let Some(first) = t.first() else {
            return Err(Error::InvalidInput("a tame tuple needs at least one matrix".into()));
        };
        let n = first.nrows();
        for (i, m) in t.iter().enumerate() {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!("T_{} is not {n}x{n}", i + 1)));
            }
            if m.clone().try_inverse().is_none() {
                return Err(Error::InvalidInput(format!("T_{} is singular", i + 1)));
            }
        }
        if let Some(c) = &target {
            if c.n != n {
                return Err(Error::DimensionMismatch(format!("target class has size {}, not {n}", c.n)));
            }
        }
        Ok(TameTuple { t, target })
    }

    pub fn dim(&self) -> usize {
        self.t[0].nrows()
    }

    /// `T_m ... T_1`.
    pub fn product(&self) -> CMat {
        let n = self.dim();
        self.t.iter().fold(linalg::identity(n), |acc, ti| ti * acc)
    }

    /// Whether the `T_i` have no common invariant subspace other than `0` and `V`.
    pub fn is_irreducible(&self) -> bool {
        let n = self.dim();
        n > 0 && linalg::span_closure_dimension(vec![linalg::identity(n)], &self.t) == n * n
    }
}

/// `T - 1 = b a` with `a = S^{1/2} V^*` (rank rows) and `b = U S^{1/2}`.
pub fn factor_minus_one(t: &CMat) -> Result<(CMat, CMat)> {
    let n = t.nrows();
    let e = t - linalg::identity(n);
    let scale = linalg::norm(t).max(1.0);
    let d = linalg::rank_banded(&e, RANK_LO * scale, RANK_HI * scale)?;
    if d == 0 {
        return Ok((CMat::zeros(0, n), CMat::zeros(n, 0)));
    }
    let (u, sv, vt) = linalg::svd(&e);
    let mut a = CMat::zeros(d, n);
    let mut b = CMat::zeros(n, d);
    for k in 0..d {
        let root = Complex64::new(sv[k].sqrt(), 0.0);
        a.row_mut(k).copy_from(&(vt.row(k) * root));
        b.column_mut(k).copy_from(&(u.column(k) * root));
    }
    Ok((a, b))
}

/// Jordan data on both sides and the column-deletion comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    /// Class of `1 + AB = u_-^{-1} h u_+` on `W`.
    pub parent: ClassSpec,
    /// Class of `T_m ... T_1 = 1 + BA` on `V`.
    pub child: ClassSpec,
    /// Whether `child` is obtained from `parent` by deleting the first column at eigenvalue 1.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StokesData {
    pub dims: Vec<usize>,
    pub a_blocks: Vec<CMat>,
    pub b_blocks: Vec<CMat>,
    /// `A: V -> W` with components `a_i T_{i-1} ... T_1`.
    pub a: CMat,
    /// `B: W -> V` with components `b_i`.
    pub b: CMat,
    pub h_blocks: Vec<CMat>,
    pub u_plus: CMat,
    pub u_minus: CMat,
    pub s1: CMat,
    pub s2: CMat,
    /// `|T_m ... T_1 - (1 + BA)|`.
    pub product_residual: f64,
    /// `|u_-^{-1} h u_+ - (1 + AB)|`.
    pub gauss_residual: f64,
    /// `|h u_+ - u_- - [a_i b_j]|`.
    pub relation_residual: f64,
    /// Relative distance of the characteristic polynomials of `T_m ... T_1` and `1 + BA`.
    pub char_poly_distance: f64,
    pub a_injective: bool,
    pub b_surjective: bool,
    pub classes: std::result::Result<ClassReport, Error>,
}

impl StokesData {
    /// The star-graph representation with centre `V` and one leaf `W_i` per matrix.
    pub fn star_representation(&self) -> Result<GraphRep> {
        let m = self.dims.len();
        let n = self.a.ncols();
        let q = ColouredQuiver::complete_multipartite(&[1, m])?;
        let mut dims = vec![n];
        dims.extend(&self.dims);
        let mut maps = BTreeMap::new();
        let off = linalg::offsets(&self.dims);
        for i in 0..m {
            maps.insert((i + 1, 0), self.a.rows(off[i], self.dims[i]).into_owned());
            maps.insert((0, i + 1), self.b_blocks[i].clone());
        }
        GraphRep::new(q, dims, maps)
    }
}

/// Stokes data `(h, u_+, u_-)` and the maps `A`, `B` of a tame tuple.
pub fn tame_to_stokes(t: &TameTuple) -> Result<StokesData> {
    let n = t.dim();
    let band = InvertBand::default();
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    for ti in &t.t {
        let (a, b) = factor_minus_one(ti)?;
        a_blocks.push(a);
        b_blocks.push(b);
    }
    let dims: Vec<usize> = a_blocks.iter().map(|a| a.nrows()).collect();
    let w: usize = dims.iter().sum();
    if w == 0 {
        return Err(Error::InvalidInput("every T_i equals 1, so d = 0".into()));
    }
    let mut prod = linalg::identity(n);
    let mut a_rows = Vec::new();
    for (ai, ti) in a_blocks.iter().zip(&t.t) {
        a_rows.push(ai * &prod);
        prod = ti * prod;
    }
    let a = crate::blocklinalg::vstack(n, &a_rows);
    let b = crate::blocklinalg::hstack(n, &b_blocks);
    let chain = build_phi_chain(&b, &a, &dims, band)?;
    let gg = gauss_gram(&chain, band)?;

    let one_ab = linalg::identity(w) + &a * &b;
    let one_ba = linalg::identity(n) + &b * &a;
    let u_minus_inv = gg
        .u_minus
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("u_- is singular".into()))?;
    let h_inv = gg.h.clone().try_inverse().ok_or(Error::NotInBigCell(0))?;
    let gauss_residual = linalg::norm(&(&u_minus_inv * &gg.h * &gg.u_plus - &one_ab));
    let off = linalg::offsets(&dims);
    let mut ab = CMat::zeros(w, w);
    for i in 0..dims.len() {
        for j in 0..dims.len() {
            let block = &a_blocks[i] * &b_blocks[j];
            ab.view_mut((off[i], off[j]), (dims[i], dims[j])).copy_from(&block);
        }
    }
    let relation_residual = linalg::norm(&(&gg.h * &gg.u_plus - &gg.u_minus - ab));
    let product = t.product();
    let scale = linalg::norm(&a).max(linalg::norm(&b)).max(1.0);
    let classes = class_report(&one_ab, &product, t.target.as_ref());
    Ok(StokesData {
        a_injective: linalg::rank_with(&a, 1e-9, scale) == n,
        b_surjective: linalg::rank_with(&b, 1e-9, scale) == n,
        product_residual: linalg::norm(&(&product - &one_ba)),
        char_poly_distance: linalg::char_poly_distance(&product, &one_ba),
        gauss_residual,
        relation_residual,
        s2: &h_inv * u_minus_inv * &gg.h,
        s1: gg.u_plus.clone(),
        h_blocks: gg.h_blocks,
        u_plus: gg.u_plus,
        u_minus: gg.u_minus,
        dims,
        a_blocks,
        b_blocks,
        a,
        b,
        classes,
    })
}

fn class_report(parent_m: &CMat, child_m: &CMat, target: Option<&ClassSpec>) -> Result<ClassReport> {
    let mut markers = vec![Scalar::one()];
    if let Some(c) = target {
        markers.extend(c.eigen.iter().map(|(s, _)| s.clone()).filter(|s| !s.is_one(1e-12)));
    }
    let parent = numeric_jordan(parent_m, &markers, CLASS_TOL)?;
    let child = numeric_jordan(child_m, &markers, CLASS_TOL)?;
    let consistent = jordan_child(&parent).same_as(&child, 1e-4);
    Ok(ClassReport { parent, child, consistent })
}
