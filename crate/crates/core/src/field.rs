//! Scalar fields used by the block linear algebra.
//!
//! Everything that has to run both in floating point and in exact arithmetic is
//! written against [`Field`]. Two implementations are provided: `Complex64` and
//! [`QComplex`], complex numbers with arbitrary-precision rational parts.

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign, DMatrix};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type QComplex = Complex<BigRational>;

/// Thresholds on `sigma_min / sigma_max` used to classify a float matrix.
///
/// Above `invertible` the matrix is invertible, below `singular` it is singular
/// and anything in between is reported as indeterminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertBand {
    pub invertible: f64,
    pub singular: f64,
}

impl Default for InvertBand {
    fn default() -> Self {
        InvertBand {
            invertible: 1e-8,
            singular: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Invertibility<T: nalgebra::Scalar> {
    Invertible(DMatrix<T>),
    Singular,
    Indeterminate,
}

pub trait Field:
    nalgebra::Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + Neg<Output = Self>
    + Debug
{
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    /// `n / d` as a field element.
    fn from_ratio(n: i64, d: i64) -> Self;

    fn to_c64(&self) -> Complex64;

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    fn recip(&self) -> Option<Self>;

    fn classify_inverse(m: &DMatrix<Self>, band: InvertBand) -> Invertibility<Self>;
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Complex64::new(n as f64 / d as f64, 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn recip(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(self.inv())
        }
    }

    fn classify_inverse(m: &DMatrix<Self>, band: InvertBand) -> Invertibility<Self> {
        assert!(m.is_square(), "classify_inverse on a non-square matrix");
        if m.nrows() == 0 {
            return Invertibility::Invertible(m.clone());
        }
        let sv = crate::linalg::singular_values(m);
        let max = sv[0];
        let min = sv[sv.len() - 1];
        if !(max.is_finite() && min.is_finite()) || max == 0.0 {
            return Invertibility::Singular;
        }
        let ratio = min / max;
        if ratio < band.singular {
            Invertibility::Singular
        } else if ratio <= band.invertible {
            Invertibility::Indeterminate
        } else {
            match m.clone().try_inverse() {
                Some(inv) => Invertibility::Invertible(inv),
                None => Invertibility::Singular,
            }
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Field for QComplex {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        QComplex::new(rat(n), rat(0))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        QComplex::new(BigRational::new(BigInt::from(n), BigInt::from(d)), rat(0))
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let den = &self.re * &self.re + &self.im * &self.im;
        Some(QComplex::new(&self.re / &den, -(&self.im / &den)))
    }

    fn classify_inverse(m: &DMatrix<Self>, _band: InvertBand) -> Invertibility<Self> {
        match exact_inverse(m) {
            Some(inv) => Invertibility::Invertible(inv),
            None => Invertibility::Singular,
        }
    }
}

/// Gauss-Jordan inverse over the exact field.
pub fn exact_inverse(m: &DMatrix<QComplex>) -> Option<DMatrix<QComplex>> {
    assert!(m.is_square(), "exact_inverse on a non-square matrix");
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = DMatrix::<QComplex>::identity(n, n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
        if pivot != col {
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
        }
        let p = a[(col, col)].recip()?;
        for j in 0..n {
            a[(col, j)] = &a[(col, j)] * &p;
            inv[(col, j)] = &inv[(col, j)] * &p;
        }
        for r in 0..n {
            if r == col || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for j in 0..n {
                let t = &f * &a[(col, j)];
                a[(r, j)] -= t;
                let t = &f * &inv[(col, j)];
                inv[(r, j)] -= t;
            }
        }
    }
    Some(inv)
}

/// Determinant over the exact field by fraction-free elimination on a copy.
pub fn exact_det(m: &DMatrix<QComplex>) -> QComplex {
    assert!(m.is_square());
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = QComplex::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
            return QComplex::zero();
        };
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)].clone();
        det = &det * &p;
        let pinv = p.recip().expect("nonzero pivot");
        for r in col + 1..n {
            if a[(r, col)].is_zero() {
                continue;
            }
            let f = &a[(r, col)] * &pinv;
            for j in col..n {
                let t = &f * &a[(col, j)];
                a[(r, j)] -= t;
            }
        }
    }
    det
}

pub fn is_exact_zero(z: &QComplex) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

pub fn qc_abs_bound(z: &QComplex) -> f64 {
    z.re.abs().to_f64().unwrap_or(f64::INFINITY) + z.im.abs().to_f64().unwrap_or(f64::INFINITY)
}

/// Entrywise conversion of an exact matrix to floating point.
pub fn to_float_matrix<T: Field>(m: &DMatrix<T>) -> DMatrix<Complex64> {
    m.map(|z| z.to_c64())
}

/// Frobenius norm computed through the float image of the entries.
pub fn frobenius<T: Field>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|z| z.magnitude().powi(2)).sum::<f64>().sqrt()
}


/// Gaussian rational with numerators in `-6..=6` and denominators in `1..=4`.
pub fn random_qcomplex<R: rand::Rng + ?Sized>(rng: &mut R) -> QComplex {
    let mut part = || BigRational::new(BigInt::from(rng.random_range(-6i64..=6)), BigInt::from(rng.random_range(1i64..=4)));
    let re = part();
    QComplex::new(re, part())
}

pub fn random_qcomplex_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<QComplex> {
    DMatrix::from_fn(rows, cols, |_, _| random_qcomplex(rng))
}
