pub mod blocklinalg;
pub mod dsolver;
pub mod error;
pub mod field;
pub mod graph;
pub mod kacmoody;
pub mod linalg;
pub mod representation;
pub mod scalar;
pub mod stokes;
pub mod suite;

pub use error::{Error, Result};
pub use scalar::Scalar;
