//! Numerical certificate for the two-form identity behind the two-block splaying map.
//!
//! For `x: W -> V`, `y: V -> W` with `W = W_1 (+) W_2`, both sides are evaluated
//! as antisymmetric bilinear forms on pairs of tangent vectors `(dx, dy)`:
//!
//! * left: `Tr (1+yx)^{-1} dy^dx - Tr (1+xy)^{-1} dx^dy + Tr(dU_- U_-^{-1} h dU_+ U_+^{-1} h^{-1})`
//! * right: `sum_i [Tr h_i^{-1} dy_hat^i ^ dx_i - Tr T_i^{-1} dx_i ^ dy_hat^i] - Tr T_1^{-1} T_2^{-1} dT_2 ^ dT_1`

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::invert;
use crate::blocklinalg::{block_diagonal, build_phi_chain, split_columns, split_rows};
use crate::error::{Error, Result};
use crate::field::{random_qcomplex_matrix, Field, InvertBand, QComplex};
use crate::linalg::{self, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Quantities derived from `(x, y)` whose differentials enter the identity.
#[derive(Debug, Clone)]
struct Derived<T: Field> {
    x: Vec<DMatrix<T>>,
    y_hat: Vec<DMatrix<T>>,
    t: Vec<DMatrix<T>>,
    h: Vec<DMatrix<T>>,
    u_minus: DMatrix<T>,
    u_plus: DMatrix<T>,
}

/// Block offsets of the grading.
fn offsets(grading: &[usize]) -> Vec<usize> {
    linalg::offsets(grading)
}

fn eye<T: Field>(n: usize) -> DMatrix<T> {
    DMatrix::identity(n, n)
}

fn derive<T: Field>(x: &DMatrix<T>, y: &DMatrix<T>, grading: &[usize], band: InvertBand) -> Result<Derived<T>> {
    let chain = build_phi_chain(x, y, grading, band)?;
    let w: usize = grading.iter().sum();
    let off = offsets(grading);
    let s = grading.len();
    let mut u_minus = eye::<T>(w);
    let mut k = eye::<T>(w);
    for i in 0..s {
        for j in 0..s {
            let yx = &chain.y_hat[i] * &chain.x[j];
            let view = ((off[i], off[j]), (grading[i], grading[j]));
            if i > j {
                u_minus.view_mut(view.0, view.1).copy_from(&(-yx));
            } else {
                let mut b = k.view_mut(view.0, view.1);
                b += yx;
            }
        }
    }
    let h_inv = invert(&block_diagonal(&chain.h), band, 0)?;
    Ok(Derived {
        u_plus: h_inv * k,
        u_minus,
        x: chain.x,
        y_hat: chain.y_hat,
        t: chain.t,
        h: chain.h,
    })
}

/// Directional derivatives of the derived quantities along `(dx, dy)`, in closed form.
fn derive_tangent<T: Field>(
    base: &Derived<T>,
    y: &DMatrix<T>,
    dx: &DMatrix<T>,
    dy: &DMatrix<T>,
    grading: &[usize],
    band: InvertBand,
) -> Result<Derived<T>> {
    let s = grading.len();
    let n = dx.nrows();
    let ys = split_rows(y, grading);
    let dxs = split_columns(dx, grading);
    let dys = split_rows(dy, grading);
    let mut phi = eye::<T>(n);
    let mut dphi = DMatrix::<T>::zeros(n, n);
    let mut dy_hat = Vec::with_capacity(s);
    let mut dt = Vec::with_capacity(s);
    let mut dh = Vec::with_capacity(s);
    for i in 0..s {
        let phi_inv = invert(&phi, band, i)?;
        let d = &dys[i] * &phi_inv - &base.y_hat[i] * &dphi * &phi_inv;
        dt.push(&dxs[i] * &base.y_hat[i] + &base.x[i] * &d);
        dh.push(&d * &base.x[i] + &base.y_hat[i] * &dxs[i]);
        dy_hat.push(d);
        dphi += &dxs[i] * &ys[i] + &base.x[i] * &dys[i];
        phi += &base.x[i] * &ys[i];
    }
    let w: usize = grading.iter().sum();
    let off = offsets(grading);
    let mut du_minus = DMatrix::<T>::zeros(w, w);
    let mut k = eye::<T>(w);
    let mut dk = DMatrix::<T>::zeros(w, w);
    for i in 0..s {
        for j in 0..s {
            let view = ((off[i], off[j]), (grading[i], grading[j]));
            let d = &dy_hat[i] * &base.x[j] + &base.y_hat[i] * &dxs[j];
            if i > j {
                du_minus.view_mut(view.0, view.1).copy_from(&(-d));
            } else {
                let mut b = k.view_mut(view.0, view.1);
                b += &base.y_hat[i] * &base.x[j];
                dk.view_mut(view.0, view.1).copy_from(&d);
            }
        }
    }
    let h_inv = invert(&block_diagonal(&base.h), band, 0)?;
    let dh_full = block_diagonal(&dh);
    let du_plus = -(&h_inv * dh_full * &h_inv * &k) + &h_inv * dk;
    Ok(Derived {
        x: dxs,
        y_hat: dy_hat,
        t: dt,
        h: dh,
        u_minus: du_minus,
        u_plus: du_plus,
    })
}

/// Central differences of the derived quantities with step `step`.
fn derive_tangent_fd(
    x: &CMat,
    y: &CMat,
    dx: &CMat,
    dy: &CMat,
    grading: &[usize],
    step: f64,
    band: InvertBand,
) -> Result<Derived<Complex64>> {
    let e = Complex64::new(step, 0.0);
    let p = derive(&(x + dx * e), &(y + dy * e), grading, band)?;
    let m = derive(&(x - dx * e), &(y - dy * e), grading, band)?;
    let diff = |a: &CMat, b: &CMat| (a - b) / Complex64::new(2.0 * step, 0.0);
    let list = |a: &[CMat], b: &[CMat]| a.iter().zip(b).map(|(u, v)| diff(u, v)).collect::<Vec<_>>();
    Ok(Derived {
        x: list(&p.x, &m.x),
        y_hat: list(&p.y_hat, &m.y_hat),
        t: list(&p.t, &m.t),
        h: list(&p.h, &m.h),
        u_minus: diff(&p.u_minus, &m.u_minus),
        u_plus: diff(&p.u_plus, &m.u_plus),
    })
}

fn tr<T: Field>(m: DMatrix<T>) -> T {
    m.trace()
}

/// `(left, right)` evaluated on the tangent pair `(a, b)`.
#[allow(clippy::too_many_arguments)]
fn sides<T: Field>(
    x: &DMatrix<T>,
    y: &DMatrix<T>,
    base: &Derived<T>,
    a: (&DMatrix<T>, &DMatrix<T>, &Derived<T>),
    b: (&DMatrix<T>, &DMatrix<T>, &Derived<T>),
    band: InvertBand,
) -> Result<(T, T)> {
    let (n, w) = x.shape();
    let inv_yx = invert(&(eye::<T>(w) + y * x), band, 0)?;
    let inv_xy = invert(&(eye::<T>(n) + x * y), band, 0)?;
    let (dxa, dya, qa) = a;
    let (dxb, dyb, qb) = b;
    let mut left = tr(&inv_yx * dya * dxb) - tr(&inv_yx * dyb * dxa);
    left -= tr(&inv_xy * dxa * dyb) - tr(&inv_xy * dxb * dya);
    let h = block_diagonal(&base.h);
    let h_inv = invert(&h, band, 0)?;
    let um_inv = invert(&base.u_minus, band, 0)?;
    let up_inv = invert(&base.u_plus, band, 0)?;
    let uma = &qa.u_minus * &um_inv;
    let umb = &qb.u_minus * &um_inv;
    let upa = &qa.u_plus * &up_inv;
    let upb = &qb.u_plus * &up_inv;
    left += tr(&uma * &h * &upb * &h_inv) - tr(&umb * &h * &upa * &h_inv);

    let mut right = T::zero();
    for i in 0..base.h.len() {
        let hi_inv = invert(&base.h[i], band, i + 1)?;
        let ti_inv = invert(&base.t[i], band, i + 1)?;
        right += tr(&hi_inv * &qa.y_hat[i] * &qb.x[i]) - tr(&hi_inv * &qb.y_hat[i] * &qa.x[i]);
        right -= tr(&ti_inv * &qa.x[i] * &qb.y_hat[i]) - tr(&ti_inv * &qb.x[i] * &qa.y_hat[i]);
    }
    let k = invert(&base.t[0], band, 1)? * invert(&base.t[1], band, 2)?;
    right -= tr(&k * &qa.t[1] * &qb.t[0]) - tr(&k * &qb.t[1] * &qa.t[0]);
    Ok((left, right))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoFormReport {
    pub samples: usize,
    /// `max |left - right|` over the samples.
    pub max_residual: f64,
    /// Largest `|left|` seen, for scale.
    pub max_value: f64,
}

fn check_grading(x_cols: usize, grading: &[usize]) -> Result<()> {
    if grading.len() != 2 {
        return Err(Error::InvalidInput("the two-form identity is stated for two blocks".into()));
    }
    if grading.iter().sum::<usize>() != x_cols {
        return Err(Error::DimensionMismatch("grading does not match x".into()));
    }
    Ok(())
}

/// Evaluates both sides on `samples` random tangent pairs at `(x, y)` (floating point).
pub fn check_two_form_identity(
    x: &CMat,
    y: &CMat,
    grading: &[usize],
    samples: usize,
    mode: DerivativeMode,
    seed: u64,
) -> Result<TwoFormReport> {
    check_grading(x.ncols(), grading)?;
    let band = InvertBand::default();
    let base = derive(x, y, grading, band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = linalg::norm(x).max(linalg::norm(y)).max(1.0);
    let (n, w) = x.shape();
    let mut report = TwoFormReport { samples, max_residual: 0.0, max_value: 0.0 };
    for _ in 0..samples {
        let dxa = linalg::random_matrix(&mut rng, n, w);
        let dya = linalg::random_matrix(&mut rng, w, n);
        let dxb = linalg::random_matrix(&mut rng, n, w);
        let dyb = linalg::random_matrix(&mut rng, w, n);
        let (qa, qb) = match mode {
            DerivativeMode::Analytic => (
                derive_tangent(&base, y, &dxa, &dya, grading, band)?,
                derive_tangent(&base, y, &dxb, &dyb, grading, band)?,
            ),
            DerivativeMode::FiniteDifference => {
                let step = 1e-6 * scale;
                (
                    derive_tangent_fd(x, y, &dxa, &dya, grading, step, band)?,
                    derive_tangent_fd(x, y, &dxb, &dyb, grading, step, band)?,
                )
            }
        };
        let (l, r) = sides(x, y, &base, (&dxa, &dya, &qa), (&dxb, &dyb, &qb), band)?;
        report.max_residual = report.max_residual.max((l - r).norm());
        report.max_value = report.max_value.max(l.norm());
    }
    Ok(report)
}

/// Exact analytic check over Gaussian rationals: returns the number of samples on which
/// the two sides differ (zero when the identity holds).
pub fn check_two_form_identity_exact(
    x: &DMatrix<QComplex>,
    y: &DMatrix<QComplex>,
    grading: &[usize],
    samples: usize,
    seed: u64,
) -> Result<usize> {
    check_grading(x.ncols(), grading)?;
    let band = InvertBand::default();
    let base = derive(x, y, grading, band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, w) = x.shape();
    let mut failures = 0;
    for _ in 0..samples {
        let dxa = random_qcomplex_matrix(&mut rng, n, w);
        let dya = random_qcomplex_matrix(&mut rng, w, n);
        let dxb = random_qcomplex_matrix(&mut rng, n, w);
        let dyb = random_qcomplex_matrix(&mut rng, w, n);
        let qa = derive_tangent(&base, y, &dxa, &dya, grading, band)?;
        let qb = derive_tangent(&base, y, &dxb, &dyb, grading, band)?;
        let (l, r) = sides(x, y, &base, (&dxa, &dya, &qa), (&dxb, &dyb, &qb), band)?;
        if l != r {
            failures += 1;
        }
    }
    Ok(failures)
}
