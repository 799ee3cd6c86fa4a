//! Tensor products of dual-structured matrices.

use num_complex::Complex64;

use crate::embedding::{dual, dual_wrt, ensure_even_square, ensure_square, z_matrix, CMatrix};
use crate::error::Result;

/// `(1/sqrt 2)(I (x) I - i Z_N (x) Z_M)`, a symmetric unitary of dimension `4NM`.
pub fn tensor_transpose_unitary(n: usize, m: usize) -> CMatrix {
    let d = 4 * n * m;
    let zz = z_matrix(n).kronecker(&z_matrix(m));
    (CMatrix::identity(d, d) - zz * Complex64::new(0.0, 1.0)) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// `|U*(X# (x) Y#)U - (U*(X (x) Y)U)^T|_F` with `U` from
/// [`tensor_transpose_unitary`].
pub fn verify_tensor_transpose(x: &CMatrix, y: &CMatrix) -> Result<f64> {
    let n = ensure_even_square(x)?;
    let m = ensure_even_square(y)?;
    let u = tensor_transpose_unitary(n, m);
    let lhs = u.adjoint() * dual(x)?.kronecker(&dual(y)?) * &u;
    let rhs = (u.adjoint() * x.kronecker(y) * &u).transpose();
    Ok((lhs - rhs).norm())
}

/// `|X^T (x) Y# - (X (x) Y)#|_F` where the dual on the right is taken with
/// respect to `I (x) Z_M`.
pub fn tensor_mixed_dual(x: &CMatrix, y: &CMatrix) -> Result<f64> {
    let k = ensure_square(x)?;
    let m = ensure_even_square(y)?;
    let form = CMatrix::identity(k, k).kronecker(&z_matrix(m));
    let lhs = x.transpose().kronecker(&dual(y)?);
    Ok((lhs - dual_wrt(&form, &x.kronecker(y))?).norm())
}
