use nalgebra::DMatrix;

use super::invert;
use crate::blocklinalg::{build_phi_chain, gauss_gram, hstack, vstack, y_from_hats};
use crate::error::{Error, Result};
use crate::field::{frobenius, Field, InvertBand};

/// A point `(y, x)` of a single factor with `y: V -> W_i` and `x: W_i -> V`.
pub type Pair<T> = (DMatrix<T>, DMatrix<T>);

/// Splits `(x, y)` into the pairs `(y_hat^i, x_i)`, one per graded piece of `W`.
pub fn splay<T: Field>(x: &DMatrix<T>, y: &DMatrix<T>, grading: &[usize], band: InvertBand) -> Result<Vec<Pair<T>>> {
    let chain = build_phi_chain(x, y, grading, band)?;
    Ok(chain.y_hat.into_iter().zip(chain.x).collect())
}

/// The data recovered from a list of pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Fused<T: Field> {
    pub grading: Vec<usize>,
    pub x: DMatrix<T>,
    pub y: DMatrix<T>,
    pub h_blocks: Vec<DMatrix<T>>,
    pub h: DMatrix<T>,
    pub u_plus: DMatrix<T>,
    pub u_minus: DMatrix<T>,
    /// `S_1 = u_+`.
    pub s1: DMatrix<T>,
    /// `S_2 = h^{-1} u_-^{-1} h`, so that `h S_2 S_1 = u_-^{-1} h u_+`.
    pub s2: DMatrix<T>,
}

impl<T: Field> Fused<T> {
    /// `|h S_2 S_1 - (1 + yx)|`.
    pub fn product_residual(&self) -> f64 {
        let w = self.y.nrows();
        let lhs = &self.h * &self.s2 * &self.s1;
        frobenius(&(lhs - (DMatrix::<T>::identity(w, w) + &self.y * &self.x)))
    }
}

/// Inverse of [`splay`]: rebuilds `x`, `y = [y_hat^i T_{i-1} ... T_1]` and the Stokes factors.
pub fn fuse<T: Field>(pairs: &[Pair<T>], band: InvertBand) -> Result<Fused<T>> {
    let Some(first) = pairs.first() else {
        return Err(Error::InvalidInput("fuse needs at least one pair".into()));
    };
    let n = first.1.nrows();
    let y_hat: Vec<DMatrix<T>> = pairs.iter().map(|p| p.0.clone()).collect();
    let xs: Vec<DMatrix<T>> = pairs.iter().map(|p| p.1.clone()).collect();
    let ys = y_from_hats(&y_hat, &xs)?;
    let grading: Vec<usize> = xs.iter().map(|b| b.ncols()).collect();
    let x = hstack(n, &xs);
    let y = vstack(n, &ys);
    let chain = build_phi_chain(&x, &y, &grading, band)?;
    let gg = gauss_gram(&chain, band)?;
    let h_inv = invert(&gg.h, band, 0)?;
    let u_minus_inv = invert(&gg.u_minus, band, 0)?;
    let s2 = &h_inv * u_minus_inv * &gg.h;
    Ok(Fused {
        grading,
        x,
        y,
        h_blocks: gg.h_blocks,
        h: gg.h,
        s1: gg.u_plus.clone(),
        u_plus: gg.u_plus,
        u_minus: gg.u_minus,
        s2,
    })
}

/// `g . (y, x) = (y g^{-1}, g x)` for `g` in `GL(V)`.
pub fn act_v<T: Field>(g: &DMatrix<T>, p: &Pair<T>, band: InvertBand) -> Result<Pair<T>> {
    let g_inv = invert(g, band, 0)?;
    Ok((&p.0 * g_inv, g * &p.1))
}

/// `k o (y, x) = (k y, x k^{-1})` for `k` in `GL(W_i)`.
pub fn act_w<T: Field>(k: &DMatrix<T>, p: &Pair<T>, band: InvertBand) -> Result<Pair<T>> {
    let k_inv = invert(k, band, 0)?;
    Ok((k * &p.0, &p.1 * k_inv))
}

/// `1 + x y` on `V`.
pub fn pair_moment<T: Field>(p: &Pair<T>) -> DMatrix<T> {
    let n = p.1.nrows();
    DMatrix::identity(n, n) + &p.1 * &p.0
}

/// The braid move `(p_1, p_2) -> ((1 + x_1 y^1) . p_2, p_1)`, exchanging the fusion order.
pub fn swap_factors<T: Field>(pairs: &[Pair<T>], band: InvertBand) -> Result<Vec<Pair<T>>> {
    let [p1, p2] = pairs else {
        return Err(Error::InvalidInput(format!("swap needs two pairs, got {}", pairs.len())));
    };
    Ok(vec![act_v(&pair_moment(p1), p2, band)?, p1.clone()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapReport {
    /// Difference of the fused products `M_1 M_2` before and after the swap.
    pub product_residual: f64,
    /// Distance of the double swap from `g . (k_1 o p_1, k_2 o p_2)` with `g = M_1 M_2`, `k_i = 1 + y^i x_i`,
    /// relative to the size of the target times the condition numbers of `g` and `k_i`.
    pub involution_residual: f64,
    /// Relative distance between the characteristic polynomials of the products.
    pub char_poly_distance: f64,
}

pub fn check_swap<T: Field>(pairs: &[Pair<T>], band: InvertBand) -> Result<SwapReport> {
    let once = swap_factors(pairs, band)?;
    let twice = swap_factors(&once, band)?;
    let before = pair_moment(&pairs[0]) * pair_moment(&pairs[1]);
    let after = pair_moment(&once[0]) * pair_moment(&once[1]);
    let to_f = |m: &DMatrix<T>| m.map(|z| z.to_c64());
    let cond = |m: &DMatrix<T>| {
        let s = crate::linalg::singular_values(&to_f(m));
        s.first().map_or(1.0, |&hi| hi / s[s.len() - 1])
    };
    let cond_g = cond(&before);
    let mut involution: f64 = 0.0;
    for (p, q) in pairs.iter().zip(&twice) {
        let w = p.0.nrows();
        let k = DMatrix::<T>::identity(w, w) + &p.0 * &p.1;
        let expected = act_v(&before, &act_w(&k, p, band)?, band)?;
        let diff = frobenius(&(&q.0 - &expected.0)).max(frobenius(&(&q.1 - &expected.1)));
        let size = frobenius(&expected.0).max(frobenius(&expected.1)).max(1.0);
        involution = involution.max(diff / (size * cond_g * cond(&k)));
    }
    Ok(SwapReport {
        product_residual: frobenius(&(&before - &after)),
        involution_residual: involution,
        char_poly_distance: crate::linalg::char_poly_distance(&to_f(&before), &to_f(&after)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QComplex;
    use crate::linalg::{self, CMat};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> QComplex {
        QComplex::from_ratio(n, d)
    }

    #[test]
    fn worked_scalar_pairs() {
        let x = DMatrix::from_row_slice(1, 2, &[q(1, 1), q(1, 1)]);
        let y = DMatrix::from_row_slice(2, 1, &[q(1, 1), q(1, 1)]);
        let pairs = splay(&x, &y, &[1, 1], InvertBand::default()).unwrap();
        assert_eq!(pairs[0].0[(0, 0)], q(1, 1));
        assert_eq!(pairs[1].0[(0, 0)], q(1, 2));
        let fused = fuse(&pairs, InvertBand::default()).unwrap();
        assert_eq!(fused.x, x);
        assert_eq!(fused.y, y);
        assert_eq!(fused.product_residual(), 0.0);
    }

    #[test]
    fn single_block_is_identity_like() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = linalg::random_matrix(&mut rng, 3, 2);
        let y = linalg::random_matrix(&mut rng, 2, 3);
        let pairs = splay(&x, &y, &[2], InvertBand::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].0, y);
        assert_eq!(pairs[0].1, x);
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grading = [1, 2, 1];
        let x = linalg::random_matrix(&mut rng, 3, 4);
        let y = linalg::random_matrix(&mut rng, 4, 3);
        let pairs = splay(&x, &y, &grading, InvertBand::default()).unwrap();
        let fused = fuse(&pairs, InvertBand::default()).unwrap();
        assert!(linalg::norm(&(&fused.x - &x)) < 1e-10);
        assert!(linalg::norm(&(&fused.y - &y)) < 1e-10);
        assert!(fused.product_residual() < 1e-10);
    }

    #[test]
    fn swap_with_zero_second_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p1 = (linalg::random_matrix(&mut rng, 1, 2), linalg::random_matrix(&mut rng, 2, 1));
        let p2: (CMat, CMat) = (CMat::zeros(2, 2), CMat::zeros(2, 2));
        let out = swap_factors(&[p1.clone(), p2.clone()], InvertBand::default()).unwrap();
        assert_eq!(out[0], p2);
        assert_eq!(out[1], p1);
    }

    #[test]
    fn swap_scalar_conjugation() {
        let c = |v: f64| CMat::from_element(1, 1, Complex64::new(v, 0.0));
        let p1 = (c(1.0), c(1.0));
        let p2 = (c(3.0), c(4.0));
        let out = swap_factors(&[p1, p2], InvertBand::default()).unwrap();
        // T_1 = 2, so (3, 4) becomes (3/2, 8).
        assert!((out[0].0[(0, 0)] - 1.5).norm() < 1e-15);
        assert!((out[0].1[(0, 0)] - 8.0).norm() < 1e-15);
    }

    #[test]
    fn swap_squared_is_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pairs = vec![
            (linalg::random_matrix(&mut rng, 2, 3), linalg::random_matrix(&mut rng, 3, 2)),
            (linalg::random_matrix(&mut rng, 1, 3), linalg::random_matrix(&mut rng, 3, 1)),
        ];
        let r = check_swap(&pairs, InvertBand::default()).unwrap();
        assert!(r.product_residual < 1e-10);
        assert!(r.involution_residual < 1e-10);
        assert!(r.char_poly_distance < 1e-10);
    }

    #[test]
    fn swap_squared_exact() {
        let pairs = vec![
            (DMatrix::from_row_slice(1, 2, &[q(1, 2), q(-1, 1)]), DMatrix::from_row_slice(2, 1, &[q(2, 1), q(1, 3)])),
            (DMatrix::from_row_slice(1, 2, &[q(1, 1), q(1, 1)]), DMatrix::from_row_slice(2, 1, &[q(0, 1), q(3, 1)])),
        ];
        let r = check_swap(&pairs, InvertBand::default()).unwrap();
        assert_eq!(r.product_residual, 0.0);
        assert_eq!(r.involution_residual, 0.0);
    }
}
