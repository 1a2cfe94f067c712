use num_complex::Complex64;

use super::{fiber_residual, moment_map, GraphRep};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub coordinates: usize,
    pub jacobian_rank: usize,
    pub kernel_dim: usize,
    /// `dim ker(d mu) - (dim H - 1)`.
    pub value: i64,
    pub fiber_residual: f64,
}

/// Singular values (relative to the largest) above this count towards the rank.
const RANK_HI: f64 = 1e-5;
/// Relative singular values between this and `RANK_HI` make the rank indeterminate.
const RANK_LO: f64 = 1e-9;

fn flatten_moment(rep: &GraphRep) -> Result<Vec<Complex64>> {
    Ok(moment_map(rep)?.mu.iter().flat_map(|m| m.iter().copied()).collect())
}

/// Local dimension estimate of the quotient at `rep` from a central-difference Jacobian.
///
/// The moment map is holomorphic, so one complex direction per coordinate suffices.
pub fn quotient_dimension_probe(rep: &GraphRep, params: &[Scalar]) -> Result<ProbeResult> {
    let fiber = fiber_residual(rep, params)?;
    let z0 = rep.to_coordinates();
    let n = z0.len();
    let dim_h: usize = rep.dims().iter().map(|d| d * d).sum();
    let scale = z0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let step = 1e-6 * scale;
    let mut jac = CMat::zeros(dim_h, n);
    for k in 0..n {
        let mut zp = z0.clone();
        let mut zm = z0.clone();
        zp[k] += step;
        zm[k] -= step;
        let fp = flatten_moment(&rep.with_coordinates(&zp)?)?;
        let fm = flatten_moment(&rep.with_coordinates(&zm)?)?;
        for (r, (a, b)) in fp.iter().zip(&fm).enumerate() {
            jac[(r, k)] = (a - b) / (2.0 * step);
        }
    }
    let sv = linalg::singular_values(&jac);
    let top = sv.first().copied().unwrap_or(0.0);
    let mut rank = 0;
    for s in &sv {
        let rel = if top > 0.0 { s / top } else { 0.0 };
        if rel > RANK_HI {
            rank += 1;
        } else if rel > RANK_LO {
            return Err(Error::Indeterminate(format!(
                "Jacobian singular value ratio {rel:e} inside the rank band"
            )));
        }
    }
    let kernel_dim = n - rank;
    Ok(ProbeResult {
        coordinates: n,
        jacobian_rank: rank,
        kernel_dim,
        value: kernel_dim as i64 - (dim_h as i64 - 1),
        fiber_residual: fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ColouredQuiver;

    #[test]
    fn interval_is_zero_dimensional() {
        let q = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let mut rep = GraphRep::zero(q, vec![1, 1]).unwrap();
        rep.set_map(0, 1, CMat::from_element(1, 1, Complex64::new(1.0, 0.0))).unwrap();
        rep.set_map(1, 0, CMat::from_element(1, 1, Complex64::new(2.0, 0.0))).unwrap();
        let p = quotient_dimension_probe(&rep, &[Scalar::ratio(1, 3), Scalar::int(3)]).unwrap();
        assert_eq!(p.value, 0);
        assert!(p.fiber_residual < 1e-12);
    }

    #[test]
    fn single_node_dimension_one() {
        let q = ColouredQuiver::complete_multipartite(&[1]).unwrap();
        let rep = GraphRep::zero(q, vec![1]).unwrap();
        let p = quotient_dimension_probe(&rep, &[Scalar::one()]).unwrap();
        assert_eq!(p.value, 0);
    }
}
