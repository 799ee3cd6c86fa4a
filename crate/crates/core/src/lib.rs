//! Structured factorizations of quaternion matrices.
//!
//! Quaternion matrices are handled through their complex `2N x 2N` images
//! under [`embedding::chi`]. Every factorization works on complex matrices
//! satisfying the quaternionic condition `X* = X#` (or the self-dual
//! condition `X# = X`) and returns factors that carry the same structure,
//! together with residuals that certify it.

mod blocks;
pub mod certificate;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod io;
pub mod jordan;
pub mod kernels;
pub mod quaternion;
pub mod quaternionic;
pub mod selfdual;
pub mod symplectic;
pub mod tensor;
pub mod testkit;

pub use embedding::{CMatrix, CVector, StructureReport};
pub use error::{Error, Result};
pub use quaternion::{QuatMatrix, QuatVector, Quaternion};
