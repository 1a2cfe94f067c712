use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// A point `(C, S_1, ..., S_2r, h)` of the fission space for a graded `W`.
///
/// `S_odd` are block upper unitriangular, `S_even` block lower unitriangular and
/// `h` is block diagonal (stored by blocks).
#[derive(Debug, Clone, PartialEq)]
pub struct FissionPoint {
    pub grading: Vec<usize>,
    pub c: CMat,
    pub s: Vec<CMat>,
    pub h: Vec<CMat>,
}

/// Block-triangular shape tolerance, relative to the matrix size.
const SHAPE_TOL: f64 = 1e-12;

fn check_unitriangular(m: &CMat, grading: &[usize], upper: bool) -> bool {
    let off = linalg::offsets(grading);
    let scale = linalg::norm(m).max(1.0);
    let k = grading.len();
    for i in 0..k {
        for j in 0..k {
            let block = m.view((off[i], off[j]), (grading[i], grading[j]));
            let target_zero = if upper { i > j } else { i < j };
            if i == j {
                let dev = (block.into_owned() - linalg::identity(grading[i])).norm();
                if dev > SHAPE_TOL * scale {
                    return false;
                }
            } else if target_zero && block.norm() > SHAPE_TOL * scale {
                return false;
            }
        }
    }
    true
}

impl FissionPoint {
    pub fn new(grading: Vec<usize>, c: CMat, s: Vec<CMat>, h: Vec<CMat>) -> Result<Self> {
        let w: usize = grading.iter().sum();
        if c.shape() != (w, w) || s.iter().any(|m| m.shape() != (w, w)) {
            return Err(Error::DimensionMismatch(format!("all matrices must be {w}x{w}")));
        }
        if s.is_empty() || !s.len().is_multiple_of(2) {
            return Err(Error::InvalidInput("an even, nonzero number of Stokes factors is required".into()));
        }
        if h.len() != grading.len() || h.iter().zip(&grading).any(|(m, &d)| m.shape() != (d, d)) {
            return Err(Error::DimensionMismatch("h blocks do not match the grading".into()));
        }
        for (k, m) in s.iter().enumerate() {
            if !check_unitriangular(m, &grading, k % 2 == 0) {
                return Err(Error::InvalidInput(format!(
                    "S_{} is not block {}-unitriangular",
                    k + 1,
                    if k % 2 == 0 { "upper" } else { "lower" }
                )));
            }
        }
        Ok(FissionPoint { grading, c, s, h })
    }

    pub fn r(&self) -> usize {
        self.s.len() / 2
    }

    pub fn h_full(&self) -> CMat {
        linalg::block_diag(&self.h)
    }

    /// `h S_2r ... S_1`.
    pub fn monodromy_core(&self) -> CMat {
        let mut m = self.h_full();
        for s in self.s.iter().rev() {
            m *= s;
        }
        m
    }

    /// Builds a reduced point from graph coordinates `v_+`, `v_-` (so `r = 2`).
    ///
    /// `S_1 = v_+`, `S_2 = v_-`, and `S_3`, `S_4`, `h` are chosen from the
    /// factorisation `v_- v_+ = w_+ g w_-` so that `h S_4 S_3 S_2 S_1 = 1`.
    pub fn from_graph_coordinates(grading: Vec<usize>, v_plus: CMat, v_minus: CMat, c: CMat) -> Result<Self> {
        let prod = &v_minus * &v_plus;
        let f = linalg::block_udl(&prod, &grading).map_err(|(k, band)| {
            if band {
                Error::Indeterminate(format!("block {} nearly singular", k + 1))
            } else {
                Error::NotInBigCell(k + 1)
            }
        })?;
        let g_full = linalg::block_diag(&f.g);
        let kappa = g_full.clone().try_inverse().ok_or(Error::NotInBigCell(0))?;
        let s3 = f.w_plus.clone().try_inverse().ok_or(Error::NotInBigCell(0))?;
        let w_minus_inv = f.w_minus.clone().try_inverse().ok_or(Error::NotInBigCell(0))?;
        // w_- = kappa S_4^{-1} kappa^{-1}
        let s4 = &g_full * w_minus_inv * &kappa;
        let h: Vec<CMat> = f.g.iter().map(|b| b.clone().try_inverse().expect("invertible block")).collect();
        Self::new(grading, c, vec![v_plus, v_minus, s3, s4], h)
    }
}

/// `(C^{-1} h S_2r ... S_1 C, h^{-1})`.
pub fn fission_moment(p: &FissionPoint) -> Result<(CMat, Vec<CMat>)> {
    let c_inv = p
        .c
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("C is singular".into()))?;
    let g = c_inv * p.monodromy_core() * &p.c;
    let h_inv = p
        .h
        .iter()
        .map(|b| b.clone().try_inverse().ok_or_else(|| Error::InvalidInput("h is singular".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok((g, h_inv))
}

/// A reduced fission point read as a representation of the complete graph on the blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    pub v_plus: CMat,
    pub v_minus: CMat,
    /// `w_+ = S_3^{-1}`.
    pub w_plus: CMat,
    /// `w_- = h S_4^{-1} h^{-1}`.
    pub w_minus: CMat,
    /// `g = h^{-1}` by blocks: the group-valued moment.
    pub g: Vec<CMat>,
    /// For two blocks, `(a, b)` with `a: W_2 -> W_1`, `b: W_1 -> W_2`.
    pub pair: Option<(CMat, CMat)>,
}

/// Reduces a point with `r = 2` at the identity value of the `G`-moment.
pub fn reduce_b(p: &FissionPoint, tol: f64) -> Result<ReducedPoint> {
    if p.r() != 2 {
        return Err(Error::InvalidInput(format!("reduction needs r = 2, got r = {}", p.r())));
    }
    let (g_moment, h_inv) = fission_moment(p)?;
    let w: usize = p.grading.iter().sum();
    let residual = linalg::norm(&(g_moment - linalg::identity(w)));
    if residual > tol {
        return Err(Error::NotReduced(residual));
    }
    let h = p.h_full();
    let h_inv_full = linalg::block_diag(&h_inv);
    let s3_inv = p.s[2].clone().try_inverse().expect("unitriangular");
    let s4_inv = p.s[3].clone().try_inverse().expect("unitriangular");
    let pair = if p.grading.len() == 2 {
        let (d1, d2) = (p.grading[0], p.grading[1]);
        let a = p.s[0].view((0, d1), (d1, d2)).into_owned();
        let b = p.s[1].view((d1, 0), (d2, d1)).into_owned();
        Some((a, b))
    } else {
        None
    };
    Ok(ReducedPoint {
        v_plus: p.s[0].clone(),
        v_minus: p.s[1].clone(),
        w_plus: s3_inv,
        w_minus: &h * s4_inv * h_inv_full,
        g: h_inv,
        pair,
    })
}

/// The two-block moment `((1 + ab)^{-1}, 1 + ba)`.
pub fn two_block_moment(a: &CMat, b: &CMat) -> Option<(CMat, CMat)> {
    let one_ab = linalg::identity(a.nrows()) + a * b;
    let one_ba = linalg::identity(b.nrows()) + b * a;
    Some((one_ab.try_inverse()?, one_ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_matrix(z: Complex64) -> CMat {
        CMat::from_element(1, 1, z)
    }

    fn unitri(a: &CMat, b: &CMat) -> (CMat, CMat) {
        let (d1, d2) = (a.nrows(), a.ncols());
        let n = d1 + d2;
        let mut vp = linalg::identity(n);
        vp.view_mut((0, d1), (d1, d2)).copy_from(a);
        let mut vm = linalg::identity(n);
        vm.view_mut((d1, 0), (d2, d1)).copy_from(b);
        (vp, vm)
    }

    #[test]
    fn scalar_reduction_matches_two_block_moment() {
        let a = scalar_matrix(Complex64::new(1.0, 0.0));
        let b = scalar_matrix(Complex64::new(1.0, 0.0));
        let (vp, vm) = unitri(&a, &b);
        let p = FissionPoint::from_graph_coordinates(vec![1, 1], vp, vm, linalg::identity(2)).unwrap();
        let red = reduce_b(&p, 1e-12).unwrap();
        assert!((red.g[0][(0, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((red.g[1][(0, 0)] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn random_block_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = linalg::random_matrix(&mut rng, 2, 3);
        let b = linalg::random_matrix(&mut rng, 3, 2);
        let (vp, vm) = unitri(&a, &b);
        let c = linalg::random_well_conditioned(&mut rng, 5, 1.0);
        let p = FissionPoint::from_graph_coordinates(vec![2, 3], vp, vm, c).unwrap();
        let red = reduce_b(&p, 1e-10).unwrap();
        let (g1, g2) = two_block_moment(&a, &b).unwrap();
        assert!(linalg::norm(&(&red.g[0] - g1)) < 1e-10);
        assert!(linalg::norm(&(&red.g[1] - g2)) < 1e-10);
        let (pa, pb) = red.pair.unwrap();
        assert_eq!(pa, a);
        assert_eq!(pb, b);
    }

    #[test]
    fn unreduced_point_rejected() {
        let s = vec![linalg::identity(2); 4];
        let h = vec![scalar_matrix(Complex64::new(2.0, 0.0)), scalar_matrix(Complex64::new(1.0, 0.0))];
        let p = FissionPoint::new(vec![1, 1], linalg::identity(2), s, h).unwrap();
        assert!(matches!(reduce_b(&p, 1e-10), Err(Error::NotReduced(_))));
    }

    #[test]
    fn triangularity_checked() {
        let mut bad = linalg::identity(2);
        bad[(1, 0)] = Complex64::new(1.0, 0.0);
        let s = vec![bad, linalg::identity(2)];
        let h = vec![scalar_matrix(Complex64::new(1.0, 0.0)); 2];
        assert!(FissionPoint::new(vec![1, 1], linalg::identity(2), s, h).is_err());
    }
}
