//! Block linear algebra around `x: W -> V`, `y: V -> W` with `W` graded.

mod chain;
mod coxeter;
pub mod jordan;

pub use chain::{
    block_diagonal, build_dual_chain, build_phi_chain, dual_invertibility, gauss_gram, hstack, split_columns,
    split_rows, vstack, y_from_hats, GaussGram, PhiChain,
};
pub use coxeter::{coxeter_killing_check, CoxeterCheck};
pub use jordan::{jordan_child, numeric_jordan, ClassSpec, Partition};
