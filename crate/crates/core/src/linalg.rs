//! Floating-point helpers on dense complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Thin SVD `m = U diag(s) V^*` with singular values in decreasing order.
///
/// Computed with faer: nalgebra's complex SVD returns inaccurate singular values
/// on some rank-deficient inputs.
pub fn svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (r, cols) = m.shape();
    let k = r.min(cols);
    if k == 0 {
        return (CMat::zeros(r, 0), Vec::new(), CMat::zeros(0, cols));
    }
    let fm = faer::Mat::<Complex64>::from_fn(r, cols, |i, j| m[(i, j)]);
    let d = fm.thin_svd().expect("svd converges");
    let (u, v, sv) = (d.U(), d.V(), d.S().column_vector());
    let s: Vec<f64> = (0..k).map(|i| sv[i].re).collect();
    let u = CMat::from_fn(r, k, |i, j| u[(i, j)]);
    let vt = CMat::from_fn(k, cols, |i, j| v[(j, i)].conj());
    (u, s, vt)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    svd(m).1
}

/// Number of singular values above `tol * scale`.
pub fn rank_with(m: &CMat, tol: f64, scale: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol * scale).count()
}

/// Numerical rank; errors if a singular value falls in the gap `(lo, hi]`.
pub fn rank_banded(m: &CMat, lo: f64, hi: f64) -> Result<usize> {
    let sv = singular_values(m);
    let mut r = 0;
    for s in sv {
        if s > hi {
            r += 1;
        } else if s > lo {
            return Err(Error::Indeterminate(format!(
                "singular value {s:e} inside rank band ({lo:e}, {hi:e}]"
            )));
        }
    }
    Ok(r)
}

pub fn norm(m: &CMat) -> f64 {
    m.norm()
}

/// Eigenvalues from a complex Schur form (computed with faer).
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let fm = faer::Mat::<Complex64>::from_fn(n, n, |i, j| m[(i, j)]);
    fm.eigenvalues().expect("eigenvalues converge")
}

/// Coefficients `c_0..c_n` of `det(x - M) = sum c_k x^k` (Faddeev-LeVerrier).
pub fn char_poly(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = CMat::zeros(n, n);
    for k in 1..=n {
        let mut next = m * &mk;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        mk = next;
        let tr = (m * &mk).trace();
        coeffs[n - k] = -tr / k as f64;
    }
    coeffs
}

/// Distance between characteristic polynomials relative to `max(1, |A|, |B|)^n`,
/// which bounds every coefficient up to binomial factors.
pub fn char_poly_distance(a: &CMat, b: &CMat) -> f64 {
    if a.nrows() != b.nrows() {
        return f64::INFINITY;
    }
    let pa = char_poly(a);
    let pb = char_poly(b);
    let scale = norm(a).max(norm(b)).max(1.0).powi(a.nrows() as i32);
    pa.iter().zip(&pb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

pub fn det(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Orthonormal basis (as columns) of the column space, with a relative rank threshold.
pub fn column_space(m: &CMat, tol: f64) -> CMat {
    let (r, c_) = m.shape();
    if r == 0 || c_ == 0 {
        return CMat::zeros(r, 0);
    }
    let (u, sv, _) = svd(m);
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    let mut cols = Vec::new();
    for (k, s) in sv.iter().enumerate() {
        if *s > tol * scale {
            cols.push(u.column(k).into_owned());
        }
    }
    if cols.is_empty() {
        CMat::zeros(r, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Orthonormal basis of the kernel, with a relative rank threshold.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let (r, n) = m.shape();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if r == 0 {
        return identity(n);
    }
    let mh = m.adjoint();
    // Column space of M^* is the orthogonal complement of ker M.
    let range = column_space(&mh, tol);
    let proj = &range * range.adjoint();
    let comp = identity(n) - proj;
    column_space(&comp, 1e-6)
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / std::f64::consts::SQRT_2
}

/// Matrix of unit complex Gaussians.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// A random invertible matrix with condition number bounded by roughly `1 + 2 * spread`.
pub fn random_well_conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> CMat {
    let g = random_matrix(rng, n, n);
    let q = g.qr().q();
    let mut d = identity(n);
    for i in 0..n {
        d[(i, i)] = Complex64::new(1.0 + spread * rng.random::<f64>(), 0.0);
    }
    let g2 = random_matrix(rng, n, n);
    let q2 = g2.qr().q();
    q * d * q2
}

/// Relative size below which a new operator counts as already spanned.
const SPAN_TOL: f64 = 1e-8;

/// Dimension of the smallest subspace of `End(C^n)` containing `seeds` and closed
/// under left multiplication by every generator.
///
/// Keeps an orthonormal basis in the Frobenius inner product. Remainders are
/// measured against the largest generator, so a generator that is negligible next
/// to the others contributes nothing.
pub fn span_closure_dimension(seeds: Vec<CMat>, generators: &[CMat]) -> usize {
    let full = seeds.first().map_or(0, |m| m.len());
    let scale = generators.iter().map(|g| g.norm()).fold(1.0, f64::max);
    let mut basis: Vec<CMat> = Vec::new();
    let mut frontier: Vec<CMat> = Vec::new();
    for s in seeds {
        if let Some(b) = orthonormalise(&basis, s, 1.0) {
            basis.push(b.clone());
            frontier.push(b);
        }
    }
    while let Some(b) = frontier.pop() {
        if basis.len() == full {
            break;
        }
        for a in generators {
            if let Some(nb) = orthonormalise(&basis, a * &b, scale) {
                basis.push(nb.clone());
                frontier.push(nb);
            }
        }
    }
    basis.len()
}

fn orthonormalise(basis: &[CMat], mut m: CMat, scale: f64) -> Option<CMat> {
    let original = m.norm();
    if original == 0.0 {
        return None;
    }
    // Two passes of Gram-Schmidt keep the basis orthonormal to working precision.
    for _ in 0..2 {
        for b in basis {
            let coeff = b.dotc(&m);
            m -= b * coeff;
        }
    }
    let r = m.norm();
    if r <= SPAN_TOL * original.max(scale) {
        None
    } else {
        Some(m / Complex64::new(r, 0.0))
    }
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((o, o), (k, k)).copy_from(b);
        o += k;
    }
    out
}

/// Offsets of consecutive blocks of the given sizes.
pub fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut o = 0;
    out.push(0);
    for s in sizes {
        o += s;
        out.push(o);
    }
    out
}

/// Block factors `w_+`, diagonal blocks of `g`, and `w_-` with `m = w_+ g w_-`.
pub struct BlockUdl {
    pub w_plus: CMat,
    pub g: Vec<CMat>,
    pub w_minus: CMat,
}

/// Block UDL factorisation, eliminating from the last block upwards.
///
/// On failure returns the failing block index and whether the pivot was only
/// nearly singular (inside the tolerance band) rather than singular.
pub fn block_udl(m: &CMat, sizes: &[usize]) -> std::result::Result<BlockUdl, (usize, bool)> {
    use crate::field::{Field, InvertBand, Invertibility};
    let n = m.nrows();
    let off = offsets(sizes);
    let mut s = m.clone();
    let mut w_plus = identity(n);
    let mut w_minus = identity(n);
    let mut g = vec![CMat::zeros(0, 0); sizes.len()];
    for k in (0..sizes.len()).rev() {
        let (o, d) = (off[k], sizes[k]);
        let gk = s.view((o, o), (d, d)).into_owned();
        let inv = match Complex64::classify_inverse(&gk, InvertBand::default()) {
            Invertibility::Invertible(inv) => inv,
            Invertibility::Singular => return Err((k, false)),
            Invertibility::Indeterminate => return Err((k, true)),
        };
        if o > 0 {
            let col = s.view((0, o), (o, d)).into_owned();
            let row = s.view((o, 0), (d, o)).into_owned();
            let up = &col * &inv;
            let low = &inv * &row;
            w_plus.view_mut((0, o), (o, d)).copy_from(&up);
            w_minus.view_mut((o, 0), (d, o)).copy_from(&low);
            let update = &up * &row;
            let mut top = s.view_mut((0, 0), (o, o));
            top -= update;
        }
        g[k] = gk;
    }
    Ok(BlockUdl { w_plus, g, w_minus })
}

#[cfg(test)]
mod tests {
    use super::*;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn svd_of_rank_one_two_by_two() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                c(0.015621717226730114, -0.006652517251938536),
                c(0.2584962565361135, -0.10146707657071295),
                c(0.00607697808276057, -0.004331098630182804),
                c(0.10137083893358612, -0.06797042301898336),
            ],
        );
        let (u, s, vt) = svd(&m);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(2, s.iter().map(|&x| c(x, 0.0))));
        assert!(norm(&(u * d * vt - &m)) < 1e-14);
        assert!(s[0] >= s[1]);
    }

    #[test]
    fn char_poly_of_diagonal() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(3.0, 0.0)]));
        let p = char_poly(&m);
        assert!((p[0] - c(6.0, 0.0)).norm() < 1e-12);
        assert!((p[1] - c(-5.0, 0.0)).norm() < 1e-12);
        assert!((p[2] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_random_match_char_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&mut rng, 4, 4);
        let p = char_poly(&m);
        for l in eigenvalues(&m) {
            let v = p.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * l + a);
            assert!(v.norm() < 1e-9, "{v}");
        }
    }

    #[test]
    fn kernel_and_image() {
        let m = CMat::from_row_slice(2, 3, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(null_space(&m, 1e-10).ncols(), 1);
        assert_eq!(column_space(&m, 1e-10).ncols(), 2);
    }
}
