//! Coxeter elements as products of reflections, checked against the Gram matrix.

use nalgebra::DMatrix;

use super::chain::{build_phi_chain, gauss_gram, y_from_hats};
use crate::error::{Error, Result};
use crate::field::{frobenius, Field, InvertBand};

#[derive(Debug, Clone, PartialEq)]
pub struct CoxeterCheck<T: Field> {
    /// `T_s ... T_1` with `T_i = 1 - x_i (x_i, .)`.
    pub product: DMatrix<T>,
    /// `|T_s...T_1 - (1 + y)|`.
    pub residual_one_plus_y: f64,
    /// `|T_s...T_1 + u_-^{-1} u_+|` with `u_+ + u_-` the Gram matrix.
    pub residual_gram: f64,
    /// `|h + 1|` for the block-diagonal part of the Gauss decomposition.
    pub residual_h: f64,
}

/// Checks the Coxeter-Killing factorisation for a basis with symmetric Gram matrix.
///
/// The basis vectors `x_i` are the standard basis of `C^s`, `(u, v) = u^T G v`,
/// and `y_hat^i = -(x_i, .)`. The Gram matrix must be symmetric with 2 on the diagonal.
pub fn coxeter_killing_check<T: Field>(gram: &DMatrix<T>) -> Result<CoxeterCheck<T>> {
    let s = gram.nrows();
    if gram.ncols() != s {
        return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
    }
    let two = T::from_i64(2);
    for i in 0..s {
        if gram[(i, i)] != two {
            return Err(Error::InvalidInput(format!("Gram diagonal entry {i} is not 2")));
        }
        for j in 0..i {
            if gram[(i, j)] != gram[(j, i)] {
                return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
            }
        }
    }
    let eye = DMatrix::<T>::identity(s, s);
    let x_blocks: Vec<DMatrix<T>> = (0..s).map(|i| eye.columns(i, 1).into_owned()).collect();
    let y_hat: Vec<DMatrix<T>> = (0..s).map(|i| -gram.rows(i, 1).into_owned()).collect();
    let y_blocks = y_from_hats(&y_hat, &x_blocks)?;

    let mut product = eye.clone();
    for (xi, yh) in x_blocks.iter().zip(&y_hat) {
        product = (&eye + xi * yh) * product;
    }

    let mut y = DMatrix::<T>::zeros(s, s);
    for (i, yi) in y_blocks.iter().enumerate() {
        y.rows_mut(i, 1).copy_from(yi);
    }
    let residual_one_plus_y = frobenius(&(&product - (&eye + &y)));

    let mut u_plus = DMatrix::<T>::identity(s, s);
    let mut u_minus = DMatrix::<T>::identity(s, s);
    for i in 0..s {
        for j in 0..s {
            if i < j {
                u_plus[(i, j)] = gram[(i, j)].clone();
            } else if i > j {
                u_minus[(i, j)] = gram[(i, j)].clone();
            }
        }
    }
    let band = InvertBand::default();
    let u_minus_inv = match T::classify_inverse(&u_minus, band) {
        crate::field::Invertibility::Invertible(m) => m,
        _ => return Err(Error::InvalidInput("unitriangular factor not invertible".into())),
    };
    let residual_gram = frobenius(&(&product + u_minus_inv * &u_plus));

    let chain = build_phi_chain(&eye, &y, &vec![1; s], band)?;
    let gg = gauss_gram(&chain, band)?;
    let residual_h = frobenius(&(gg.h + &eye));

    Ok(CoxeterCheck {
        product,
        residual_one_plus_y,
        residual_gram,
        residual_h,
    })
}
