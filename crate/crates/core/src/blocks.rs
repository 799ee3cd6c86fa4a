// Block bookkeeping for 2n x 2n matrices split as [[A, B], [C, D]].

use crate::embedding::{CMatrix, ZERO};

pub(crate) fn split(x: &CMatrix, n: usize) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    (
        x.view((0, 0), (n, n)).into_owned(),
        x.view((0, n), (n, n)).into_owned(),
        x.view((n, 0), (n, n)).into_owned(),
        x.view((n, n), (n, n)).into_owned(),
    )
}

pub(crate) fn assemble(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut x = CMatrix::zeros(2 * n, 2 * n);
    x.view_mut((0, 0), (n, n)).copy_from(a);
    x.view_mut((0, n), (n, n)).copy_from(b);
    x.view_mut((n, 0), (n, n)).copy_from(c);
    x.view_mut((n, n), (n, n)).copy_from(d);
    x
}

/// `chi`-shaped block matrix `[[A, B], [-conj(B), conj(A)]]`.
pub(crate) fn quaternionic_form(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assemble(a, b, &(-b.conjugate()), &a.conjugate())
}

/// Upper triangle including the diagonal; `strict` drops the diagonal too.
pub(crate) fn upper(x: &CMatrix, strict: bool) -> CMatrix {
    CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        if j > i || (!strict && i == j) {
            x[(i, j)]
        } else {
            ZERO
        }
    })
}

/// Frobenius norm of what [`upper`] discards.
pub(crate) fn below_norm(x: &CMatrix, strict: bool) -> f64 {
    (x - upper(x, strict)).norm()
}

/// Indices of a 2n space with the pair `(0, n)` removed.
fn kept(n: usize) -> Vec<usize> {
    (1..n).chain(n + 1..2 * n).collect()
}

/// Deletes rows and columns `0` and `n`, leaving a `2(n-1)` matrix that keeps
/// the upper/lower block convention.
pub(crate) fn remove_pair(x: &CMatrix, n: usize) -> CMatrix {
    let idx = kept(n);
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| x[(idx[i], idx[j])])
}

/// Inverse of [`remove_pair`] for unitaries: identity on indices `0` and `n`.
pub(crate) fn embed_pair(u: &CMatrix, n: usize) -> CMatrix {
    let idx = kept(n);
    let mut out = CMatrix::identity(2 * n, 2 * n);
    for (i, &ii) in idx.iter().enumerate() {
        for (j, &jj) in idx.iter().enumerate() {
            out[(ii, jj)] = u[(i, j)];
        }
    }
    out
}

/// Applies the same permutation to the upper and lower index blocks. Such a
/// permutation matrix is a symplectic unitary.
pub(crate) fn paired_permutation(order: &[usize]) -> CMatrix {
    let n = order.len();
    let mut p = CMatrix::zeros(2 * n, 2 * n);
    for (new, &old) in order.iter().enumerate() {
        p[(old, new)] = crate::embedding::ONE;
        p[(n + old, n + new)] = crate::embedding::ONE;
    }
    p
}
