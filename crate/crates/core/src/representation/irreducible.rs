use num_complex::Complex64;

use super::GraphRep;
use crate::linalg::{self, CMat};

/// Dimension of the image of the path algebra in `End(V)`, `V = (+)_i V_i`.
///
/// Starts from the idempotents `e_i` and closes the span under left
/// multiplication by every arrow, keeping an orthonormal basis in the
/// Frobenius inner product.
pub fn path_algebra_dimension(rep: &GraphRep) -> usize {
    let n = rep.total_dim();
    if n == 0 {
        return 0;
    }
    let off = linalg::offsets(rep.dims());
    let mut arrows = Vec::new();
    for (&(h, t), m) in rep.maps() {
        if m.is_empty() {
            continue;
        }
        let mut a = CMat::zeros(n, n);
        a.view_mut((off[h], off[t]), (m.nrows(), m.ncols())).copy_from(m);
        arrows.push(a);
    }
    let mut seeds = Vec::new();
    for (i, &d) in rep.dims().iter().enumerate() {
        let mut e = CMat::zeros(n, n);
        for k in 0..d {
            e[(off[i] + k, off[i] + k)] = Complex64::new(1.0, 0.0);
        }
        seeds.push(e);
    }
    linalg::span_closure_dimension(seeds, &arrows)
}

/// Simple (irreducible) representation test.
///
/// Over an algebraically closed field a nonzero module is simple exactly when the
/// algebra acting on it maps onto the full endomorphism algebra, so this compares
/// the span of all path operators with `(dim V)^2`.
pub fn is_irreducible(rep: &GraphRep) -> bool {
    let n = rep.total_dim();
    n > 0 && path_algebra_dimension(rep) == n * n
}
