use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::{frobenius, Field, InvertBand, Invertibility};

fn eye<T: Field>(n: usize) -> DMatrix<T> {
    DMatrix::identity(n, n)
}

fn inverse<T: Field>(m: &DMatrix<T>, band: InvertBand, block: usize) -> Result<DMatrix<T>> {
    match T::classify_inverse(m, band) {
        Invertibility::Invertible(inv) => Ok(inv),
        Invertibility::Singular => Err(Error::NotInBigCell(block)),
        Invertibility::Indeterminate => Err(Error::Indeterminate(format!(
            "invertibility of block {block} is inside the tolerance band"
        ))),
    }
}

/// Columns of `x` (or rows of `y`) grouped by the grading of `W`.
pub fn split_columns<T: Field>(x: &DMatrix<T>, grading: &[usize]) -> Vec<DMatrix<T>> {
    let mut out = Vec::with_capacity(grading.len());
    let mut o = 0;
    for &w in grading {
        out.push(x.columns(o, w).into_owned());
        o += w;
    }
    out
}

pub fn split_rows<T: Field>(y: &DMatrix<T>, grading: &[usize]) -> Vec<DMatrix<T>> {
    let mut out = Vec::with_capacity(grading.len());
    let mut o = 0;
    for &w in grading {
        out.push(y.rows(o, w).into_owned());
        o += w;
    }
    out
}

pub fn hstack<T: Field>(rows: usize, blocks: &[DMatrix<T>]) -> DMatrix<T> {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut o = 0;
    for b in blocks {
        out.view_mut((0, o), (rows, b.ncols())).copy_from(b);
        o += b.ncols();
    }
    out
}

pub fn vstack<T: Field>(cols: usize, blocks: &[DMatrix<T>]) -> DMatrix<T> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, 0), (b.nrows(), cols)).copy_from(b);
        o += b.nrows();
    }
    out
}

pub fn block_diagonal<T: Field>(blocks: &[DMatrix<T>]) -> DMatrix<T> {
    let n = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
        o += b.nrows();
    }
    out
}

/// Whether `1 + xy` and `1 + yx` are invertible; they must agree.
pub fn dual_invertibility<T: Field>(x: &DMatrix<T>, y: &DMatrix<T>, band: InvertBand) -> Result<bool> {
    let (n, w) = x.shape();
    if y.shape() != (w, n) {
        return Err(Error::DimensionMismatch(format!(
            "x is {n}x{w} but y is {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    let a = T::classify_inverse(&(eye::<T>(n) + x * y), band);
    let b = T::classify_inverse(&(eye::<T>(w) + y * x), band);
    match (a, b) {
        (Invertibility::Invertible(_), Invertibility::Invertible(_)) => Ok(true),
        (Invertibility::Singular, Invertibility::Singular) => Ok(false),
        _ => Err(Error::Indeterminate(
            "invertibility of 1+xy and 1+yx is ambiguous at this tolerance".into(),
        )),
    }
}

/// The chain `phi_i = 1 + sum_{k<=i} x_k y^k` and the blocks derived from it.
///
/// Index `i` in the vectors below is block `i + 1`; `phi` has `s + 1` entries
/// starting from `phi_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiChain<T: Field> {
    pub grading: Vec<usize>,
    pub x: Vec<DMatrix<T>>,
    pub y: Vec<DMatrix<T>>,
    pub phi: Vec<DMatrix<T>>,
    pub phi_inv: Vec<DMatrix<T>>,
    pub x_hat: Vec<DMatrix<T>>,
    pub y_hat: Vec<DMatrix<T>>,
    /// `h_i = 1 + y_hat^i x_i` on `W_i`.
    pub h: Vec<DMatrix<T>>,
    /// `T_i = 1 + x_i y_hat^i` on `V`.
    pub t: Vec<DMatrix<T>>,
    /// `M_i = 1 + x_hat_i y^i` on `V`.
    pub m: Vec<DMatrix<T>>,
}

impl<T: Field> PhiChain<T> {
    pub fn dim_v(&self) -> usize {
        self.phi[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.grading.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grading.is_empty()
    }

    pub fn x_full(&self) -> DMatrix<T> {
        hstack(self.dim_v(), &self.x)
    }

    pub fn y_full(&self) -> DMatrix<T> {
        vstack(self.dim_v(), &self.y)
    }

    /// `T_i ... T_1` for `i = 0..=s`.
    pub fn t_products(&self) -> Vec<DMatrix<T>> {
        let n = self.dim_v();
        let mut out = vec![eye::<T>(n)];
        for t in &self.t {
            let next = t * out.last().unwrap();
            out.push(next);
        }
        out
    }

    /// `M_1 ... M_i` for `i = 0..=s`.
    pub fn m_products(&self) -> Vec<DMatrix<T>> {
        let n = self.dim_v();
        let mut out = vec![eye::<T>(n)];
        for m in &self.m {
            let next = out.last().unwrap() * m;
            out.push(next);
        }
        out
    }

    /// Largest of `|phi_i - T_i...T_1|` and `|phi_i - M_1...M_i|` over `i`.
    pub fn product_residual(&self) -> f64 {
        let tp = self.t_products();
        let mp = self.m_products();
        let mut r: f64 = 0.0;
        for i in 0..self.phi.len() {
            r = r.max(frobenius(&(&self.phi[i] - &tp[i])));
            r = r.max(frobenius(&(&self.phi[i] - &mp[i])));
        }
        r
    }

    /// Size used to scale residuals: `max(1, |x|, |y|, |phi_s|)`.
    pub fn scale(&self) -> f64 {
        let x = frobenius(&self.x_full());
        let y = frobenius(&self.y_full());
        let p = frobenius(self.phi.last().unwrap());
        1f64.max(x).max(y).max(p).max(x * y)
    }
}

/// Builds the phi-chain for `x: W -> V`, `y: V -> W` with `W` graded by `grading`.
///
/// Fails with `NotInBigCell(i)` when `phi_i` is singular.
pub fn build_phi_chain<T: Field>(
    x: &DMatrix<T>,
    y: &DMatrix<T>,
    grading: &[usize],
    band: InvertBand,
) -> Result<PhiChain<T>> {
    let (n, w) = x.shape();
    if y.shape() != (w, n) {
        return Err(Error::DimensionMismatch(format!(
            "x is {n}x{w} but y is {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    if grading.iter().sum::<usize>() != w {
        return Err(Error::DimensionMismatch(format!(
            "grading {grading:?} does not sum to dim W = {w}"
        )));
    }
    let xs = split_columns(x, grading);
    let ys = split_rows(y, grading);
    let s = grading.len();
    let mut phi = vec![eye::<T>(n)];
    let mut phi_inv = vec![eye::<T>(n)];
    for i in 0..s {
        let next = phi.last().unwrap() + &xs[i] * &ys[i];
        let inv = inverse(&next, band, i + 1)?;
        phi.push(next);
        phi_inv.push(inv);
    }
    let mut x_hat = Vec::with_capacity(s);
    let mut y_hat = Vec::with_capacity(s);
    let mut h = Vec::with_capacity(s);
    let mut t = Vec::with_capacity(s);
    let mut m = Vec::with_capacity(s);
    for i in 0..s {
        let xh = &phi_inv[i] * &xs[i];
        let yh = &ys[i] * &phi_inv[i];
        h.push(eye::<T>(grading[i]) + &yh * &xs[i]);
        t.push(eye::<T>(n) + &xs[i] * &yh);
        m.push(eye::<T>(n) + &xh * &ys[i]);
        x_hat.push(xh);
        y_hat.push(yh);
    }
    Ok(PhiChain {
        grading: grading.to_vec(),
        x: xs,
        y: ys,
        phi,
        phi_inv,
        x_hat,
        y_hat,
        h,
        t,
        m,
    })
}

/// The chain for the opposite grading: `V` graded, roles of `x` and `y` exchanged.
///
/// Its `phi` are the `gamma_j`, its `t` the `R_j`, its `m` the `N_j`, and
/// `1 + yx = N_1 ... N_r`.
pub fn build_dual_chain<T: Field>(
    x: &DMatrix<T>,
    y: &DMatrix<T>,
    grading_v: &[usize],
    band: InvertBand,
) -> Result<PhiChain<T>> {
    build_phi_chain(y, x, grading_v, band)
}

/// Recovers `y^i = y_hat^i T_{i-1} ... T_1` from the hatted rows and the `x_i`.
pub fn y_from_hats<T: Field>(y_hat: &[DMatrix<T>], x: &[DMatrix<T>]) -> Result<Vec<DMatrix<T>>> {
    if y_hat.len() != x.len() {
        return Err(Error::DimensionMismatch("unequal numbers of x and y blocks".into()));
    }
    let n = x.first().map_or(0, |b| b.nrows());
    let mut prod = eye::<T>(n);
    let mut out = Vec::with_capacity(x.len());
    for (yh, xi) in y_hat.iter().zip(x) {
        if xi.nrows() != n || yh.ncols() != n || yh.nrows() != xi.ncols() {
            return Err(Error::DimensionMismatch("inconsistent block shapes".into()));
        }
        out.push(yh * &prod);
        let ti = eye::<T>(n) + xi * yh;
        prod = ti * prod;
    }
    Ok(out)
}

/// `1 + yx = u_-^{-1} h u_+ = v_- h v_+^{-1}` with unitriangular `u`, `v` and block-diagonal `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussGram<T: Field> {
    pub grading: Vec<usize>,
    pub u_minus: DMatrix<T>,
    pub u_plus: DMatrix<T>,
    pub v_minus: DMatrix<T>,
    pub v_plus: DMatrix<T>,
    pub h: DMatrix<T>,
    pub h_blocks: Vec<DMatrix<T>>,
}

pub fn gauss_gram<T: Field>(chain: &PhiChain<T>, band: InvertBand) -> Result<GaussGram<T>> {
    let g = &chain.grading;
    let s = g.len();
    let w: usize = g.iter().sum();
    let off: Vec<usize> = std::iter::once(0)
        .chain(g.iter().scan(0, |acc, &k| {
            *acc += k;
            Some(*acc)
        }))
        .collect();
    let mut h_inv = Vec::with_capacity(s);
    for (i, hi) in chain.h.iter().enumerate() {
        h_inv.push(inverse(hi, band, i + 1)?);
    }
    let mut u_minus = eye::<T>(w);
    let mut u_plus = eye::<T>(w);
    let mut v_minus = eye::<T>(w);
    let mut v_plus = eye::<T>(w);
    for i in 0..s {
        for j in 0..s {
            let (ri, cj) = ((off[i], off[j]), (g[i], g[j]));
            let yx = &chain.y_hat[i] * &chain.x[j];
            let yxh = &chain.y[i] * &chain.x_hat[j];
            if i > j {
                u_minus.view_mut(ri, cj).copy_from(&(-yx));
                v_minus.view_mut(ri, cj).copy_from(&(&yxh * &h_inv[j]));
            } else if i < j {
                u_plus.view_mut(ri, cj).copy_from(&(&h_inv[i] * &yx));
                v_plus.view_mut(ri, cj).copy_from(&(-yxh));
            }
        }
    }
    Ok(GaussGram {
        grading: g.clone(),
        u_minus,
        u_plus,
        v_minus,
        v_plus,
        h: block_diagonal(&chain.h),
        h_blocks: chain.h.clone(),
    })
}

impl<T: Field> GaussGram<T> {
    /// `(|u_-(1+yx) - h u_+|, |(1+yx) v_+ - v_- h|)`.
    pub fn residuals(&self, x: &DMatrix<T>, y: &DMatrix<T>) -> (f64, f64) {
        let w = y.nrows();
        let a = eye::<T>(w) + y * x;
        let r1 = frobenius(&(&self.u_minus * &a - &self.h * &self.u_plus));
        let r2 = frobenius(&(&a * &self.v_plus - &self.v_minus * &self.h));
        (r1, r2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QComplex;

    fn q(n: i64, d: i64) -> QComplex {
        QComplex::from_ratio(n, d)
    }

    #[test]
    fn scalar_worked_example_exact() {
        // dim V = 1, W = C + C, x = (1, 1), y = (1, 1)^T.
        let x = DMatrix::from_row_slice(1, 2, &[q(1, 1), q(1, 1)]);
        let y = DMatrix::from_row_slice(2, 1, &[q(1, 1), q(1, 1)]);
        let chain = build_phi_chain(&x, &y, &[1, 1], InvertBand::default()).unwrap();
        assert_eq!(chain.h[0][(0, 0)], q(2, 1));
        assert_eq!(chain.h[1][(0, 0)], q(3, 2));
        assert_eq!(chain.phi[2][(0, 0)], q(3, 1));
        assert_eq!(chain.product_residual(), 0.0);
        let gg = gauss_gram(&chain, InvertBand::default()).unwrap();
        assert_eq!(gg.residuals(&x, &y), (0.0, 0.0));
        assert_eq!(gg.u_minus[(1, 0)], q(-1, 2));
        assert_eq!(gg.u_plus[(0, 1)], q(1, 2));
    }

    #[test]
    fn singular_block_reports_index() {
        let x = DMatrix::from_row_slice(1, 2, &[q(1, 1), q(1, 1)]);
        let y = DMatrix::from_row_slice(2, 1, &[q(-1, 1), q(1, 1)]);
        let err = build_phi_chain(&x, &y, &[1, 1], InvertBand::default()).unwrap_err();
        assert_eq!(err, Error::NotInBigCell(1));
    }

    #[test]
    fn dual_chain_factorises_one_plus_yx() {
        let x = DMatrix::from_row_slice(2, 1, &[q(1, 2), q(2, 1)]);
        let y = DMatrix::from_row_slice(1, 2, &[q(1, 1), q(-1, 3)]);
        let dual = build_dual_chain(&x, &y, &[1, 1], InvertBand::default()).unwrap();
        let prod = dual.m_products().pop().unwrap();
        let target = DMatrix::<QComplex>::identity(1, 1) + &y * &x;
        assert_eq!(prod, target);
    }

    #[test]
    fn y_recovered_from_hats() {
        let x = DMatrix::from_row_slice(2, 3, &[q(1, 1), q(0, 1), q(2, 1), q(1, 3), q(1, 1), q(1, 1)]);
        let y = DMatrix::from_row_slice(3, 2, &[q(1, 1), q(1, 2), q(0, 1), q(1, 1), q(-1, 1), q(1, 1)]);
        let chain = build_phi_chain(&x, &y, &[1, 2], InvertBand::default()).unwrap();
        let ys = y_from_hats(&chain.y_hat, &chain.x).unwrap();
        assert_eq!(ys, chain.y);
    }
}
