//! Stokes data, fission spaces and the explicit maps relating them to graph representations.

mod fission_point;
mod legs;
mod readings;
mod splay;
mod tame;
mod twoform;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::{Field, InvertBand, Invertibility};

pub use fission_point::{fission_moment, reduce_b, two_block_moment, FissionPoint, ReducedPoint};
pub use legs::{
    det_identity_residual, leg_class, leg_to_class, leg_witness, marking_from_params, marking_to_leg,
    params_from_marking, reflect_marking, LegClass, LegWitness, MarkingReflection,
};
pub use readings::{emit_readings, Reading, ReadingClass, ReadingKind};
pub use splay::{act_v, act_w, check_swap, fuse, pair_moment, splay, swap_factors, Fused, Pair, SwapReport};
pub use tame::{factor_minus_one, tame_to_stokes, ClassReport, StokesData, TameTuple, CLASS_TOL};
pub use twoform::{check_two_form_identity, check_two_form_identity_exact, DerivativeMode, TwoFormReport};

pub(crate) fn invert<T: Field>(m: &DMatrix<T>, band: InvertBand, block: usize) -> Result<DMatrix<T>> {
    match T::classify_inverse(m, band) {
        Invertibility::Invertible(inv) => Ok(inv),
        Invertibility::Singular => Err(Error::NotInBigCell(block)),
        Invertibility::Indeterminate => Err(Error::Indeterminate(format!(
            "matrix for block {block} is nearly singular"
        ))),
    }
}
