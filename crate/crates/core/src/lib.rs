//! Line-SIAC filtering of modal discontinuous Galerkin fields and the
//! multiresolution transfer built on it.

pub mod basis;
pub mod error;
pub mod experiments;
pub mod field;
pub mod io;
pub mod kernel;
pub mod line_filter;
pub mod mesh;
pub mod mra;
pub mod refine;
pub mod projection;
pub mod quadrature;

pub use error::{Error, Result};
pub use field::ModalField;
pub use mesh::UniformMesh;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;
/// Largest supported polynomial degree per variable.
pub const MAX_DEGREE: usize = 6;
