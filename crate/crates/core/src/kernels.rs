//! Unstructured complex dense kernels.
//!
//! Eigen and singular value computations are delegated to `faer`;
//! everything structured in this crate is assembled from the wrappers here.
//! Rank decisions use a relative singular-value threshold `tol * sigma_max`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{ensure_square, tol_scale, CMatrix, CVector, ONE};
use crate::error::{Error, Result};

/// Default relative rank threshold.
pub const RANK_TOL: f64 = 1e-10;

/// Default relative commutator tolerance for families of matrices.
pub const COMMUTATOR_TOL: f64 = 1e-8;

/// Slack factor in the common-eigenvector residual bound
/// `|X_j v - lambda_j v| <= COMMON_EIG_SLACK * tol * |X_j|`.
pub const COMMON_EIG_SLACK: f64 = 1e4;

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Eigenvectors as columns.
    pub vectors: CMatrix,
    pub values: Vec<Complex64>,
}

impl EigResult {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

/// Singular value decomposition `X = U diag(sigma) V*`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    /// Descending, nonnegative.
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cut = tol * self.sigma_max();
        self.sigma.iter().filter(|&&s| s > cut).count()
    }

    pub fn recompose(&self) -> CMatrix {
        let k = self.sigma.len();
        let mut us = self.u.columns(0, k).into_owned();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.columns(0, k).adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix with ascending real eigenvalues.
pub fn hermitian_eig(h: &CMatrix, tol: f64) -> Result<EigResult> {
    let n = ensure_square(h)?;
    let deviation = (h - h.adjoint()).norm();
    let threshold = tol * tol_scale(h);
    if deviation > threshold {
        return Err(Error::NotHermitian {
            deviation,
            threshold,
        });
    }
    if n == 0 {
        return Ok(EigResult {
            vectors: CMatrix::zeros(0, 0),
            values: vec![],
        });
    }
    let sym = to_faer(&(h + h.adjoint()).scale(0.5));
    let eig = sym
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))?;
    let s = eig.S().column_vector();
    Ok(EigResult {
        vectors: from_faer(eig.U()),
        values: (0..n).map(|k| Complex64::new(s[k].re, 0.0)).collect(),
    })
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(x: &CMatrix) -> Result<Vec<Complex64>> {
    ensure_square(x)?;
    if x.nrows() == 0 {
        return Ok(vec![]);
    }
    to_faer(x)
        .eigenvalues()
        .map_err(|_| Error::NoConvergence("complex eigenvalue iteration"))
}

pub fn svd_complex(x: &CMatrix) -> Result<Svd> {
    let (m, n) = x.shape();
    if m == 0 || n == 0 {
        return Ok(Svd {
            u: CMatrix::identity(m, m),
            sigma: vec![],
            v: CMatrix::identity(n, n),
        });
    }
    if let Ok(svd) = to_faer(x).svd() {
        return Ok(unpack_svd(&svd, false));
    }
    // X* = V S U*: a second attempt on the adjoint
    let svd = to_faer(&x.adjoint())
        .svd()
        .map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    Ok(unpack_svd(&svd, true))
}

fn unpack_svd(svd: &faer::linalg::solvers::Svd<Complex64>, adjoint: bool) -> Svd {
    let sigma = svd.S().column_vector();
    let (u, v) = (from_faer(svd.U()), from_faer(svd.V()));
    let (u, v) = if adjoint { (v, u) } else { (u, v) };
    Svd {
        u,
        sigma: (0..sigma.nrows()).map(|i| sigma[i].re).collect(),
        v,
    }
}

fn to_faer(x: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)])
}

fn from_faer(f: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(f.nrows(), f.ncols(), |i, j| f[(i, j)])
}

/// SVD whose `v` factor is square (`n x n`) for any input shape. Wide input
/// is padded with zero rows, which leaves the kernel unchanged.
fn svd_full_v(x: &CMatrix) -> Result<Svd> {
    let (m, n) = x.shape();
    if m >= n {
        return svd_complex(x);
    }
    let mut padded = CMatrix::zeros(n, n);
    padded.view_mut((0, 0), (m, n)).copy_from(x);
    svd_complex(&padded)
}

/// Orthonormal basis of `ker X`: right singular vectors whose singular value
/// is at most `tol * sigma_max`. The zero matrix has the whole space as kernel.
pub fn nullspace(x: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = x.ncols();
    if x.nrows() == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    let s = svd_full_v(x)?;
    let rank = s.rank(tol);
    Ok(s.v.columns(rank, n - rank).into_owned())
}

/// Orthonormal basis of the right singular vectors of `X` whose singular
/// value is at most the absolute `threshold`.
pub fn nullspace_below(x: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let n = x.ncols();
    if x.nrows() == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    let s = svd_full_v(x)?;
    let rank = s.sigma.iter().filter(|&&v| v > threshold).count();
    Ok(s.v.columns(rank, n - rank).into_owned())
}

/// Orthonormal basis of the column space of `X`.
pub fn range_basis(x: &CMatrix, tol: f64) -> Result<CMatrix> {
    let m = x.nrows();
    if x.ncols() == 0 {
        return Ok(CMatrix::zeros(m, 0));
    }
    let s = svd_complex(x)?;
    let rank = s.rank(tol);
    Ok(s.u.columns(0, rank).into_owned())
}

/// `Q f(lambda) Q*` for Hermitian PSD `H = Q lambda Q*`.
///
/// Eigenvalues at or below `zero_cut * lambda_max` (including small negative
/// rounding) are treated as exactly zero and contribute `0`, i.e. `f` is
/// extended by `f(0) = 0`. `f` is only evaluated on the retained eigenvalues.
pub fn herm_fun(h: &CMatrix, f: impl Fn(f64) -> f64, zero_cut: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(h, crate::embedding::DEFAULT_TOL)?;
    Ok(spectral_apply(&eig.vectors, &eig.real_values(), f, zero_cut))
}

/// `Q f(lambda) Q*` for orthonormal `Q` with the same zero-cut convention as
/// [`herm_fun`].
pub(crate) fn spectral_apply(
    q: &CMatrix,
    lambda: &[f64],
    f: impl Fn(f64) -> f64,
    zero_cut: f64,
) -> CMatrix {
    let lmax = lambda.iter().copied().fold(0.0, f64::max);
    let cut = zero_cut * lmax;
    let mut qf = q.clone();
    for (j, &l) in lambda.iter().enumerate() {
        let fl = if lmax > 0.0 && l > cut { f(l) } else { 0.0 };
        qf.column_mut(j).scale_mut(fl);
    }
    qf * q.adjoint()
}

pub fn determinant(x: &CMatrix) -> Result<Complex64> {
    ensure_square(x)?;
    Ok(x.clone().lu().determinant())
}

/// Checks `|X_i X_j - X_j X_i|_F <= tol * max(1,|X_i|_F) * max(1,|X_j|_F)`
/// for every pair.
pub fn check_commuting(family: &[CMatrix], tol: f64) -> Result<()> {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if a.shape() != b.shape() {
                return Err(Error::DimensionMismatch(format!(
                    "family members {} and {} have shapes {:?} and {:?}",
                    i,
                    j,
                    a.shape(),
                    b.shape()
                )));
            }
            let deviation = (a * b - b * a).norm();
            let threshold = tol * tol_scale(a) * tol_scale(b);
            if deviation > threshold {
                return Err(Error::NotCommuting {
                    first: i,
                    second: j,
                    deviation,
                    threshold,
                });
            }
        }
    }
    Ok(())
}

/// Picks the eigenvalue with the largest real part, breaking near-ties by the
/// largest imaginary part. Stable under unitary similarity.
fn canonical_eigenvalue(values: &[Complex64], scale: f64) -> Complex64 {
    let max_re = values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-8 * scale;
    values
        .iter()
        .filter(|z| z.re >= max_re - slack)
        .copied()
        .max_by(|a, b| a.im.total_cmp(&b.im))
        .unwrap_or(values[0])
}

fn is_scalar(x: &CMatrix) -> bool {
    let m = x.nrows();
    let mean = x.trace() / m as f64;
    let dev = (x - CMatrix::identity(m, m) * mean).norm();
    dev <= 1e-12 * tol_scale(x)
}

/// A unit vector `v` with `X_j v = lambda_j v` for every member of a
/// commuting family.
///
/// A random real combination `C` of the family (coefficients from `seed`) is
/// formed, an eigenspace of `C` is extracted, and the family is restricted to
/// it. This repeats until the restricted family is scalar or one-dimensional.
/// Each round strictly shrinks the subspace with probability one.
pub fn common_eigenvector(family: &[CMatrix], tol: f64, seed: u64) -> Result<(CVector, Vec<Complex64>)> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    let n = ensure_square(first)?;
    check_commuting(family, tol)?;
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrices have no eigenvectors".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = CMatrix::identity(n, n);
    let mut restricted: Vec<CMatrix> = family.to_vec();
    let mut stalls = 0;
    while basis.ncols() > 1 && !restricted.iter().all(is_scalar) {
        let m = basis.ncols();
        let mut comb = CMatrix::zeros(m, m);
        for x in &restricted {
            let c: f64 = rng.random_range(0.5..1.5);
            comb += x * Complex64::new(c, 0.0);
        }
        let values = eigenvalues(&comb)?;
        let mu = canonical_eigenvalue(&values, tol_scale(&comb));
        let shifted = &comb - CMatrix::identity(m, m) * mu;
        let mut space = nullspace(&shifted, RANK_TOL)?;
        if space.ncols() == 0 {
            // defective or badly separated: fall back to the best approximate
            // eigenvector
            let s = svd_complex(&shifted)?;
            space = s.v.columns(m - 1, 1).into_owned();
        }
        if space.ncols() == m {
            stalls += 1;
            if stalls > 8 {
                return Err(Error::NoConvergence("common eigenvector search"));
            }
            continue;
        }
        restricted = restricted
            .iter()
            .map(|x| space.adjoint() * x * &space)
            .collect();
        basis = &basis * &space;
    }
    let v: CVector = basis.column(0).into_owned();
    let v = &v / Complex64::new(v.norm(), 0.0);
    let lambdas = family.iter().map(|x| v.dotc(&(x * &v))).collect();
    Ok((v, lambdas))
}

/// Component of `v` orthogonal to the orthonormal columns of `q`, with one
/// reorthogonalization pass.
pub(crate) fn project_out(v: &CVector, q: &[CVector]) -> CVector {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in q {
            let c = b.dotc(&r);
            r -= b * c;
        }
    }
    r
}

pub(crate) fn unit(n: usize, k: usize) -> CVector {
    let mut e = CVector::zeros(n);
    e[k] = ONE;
    e
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::ZERO;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(vals: &[f64]) -> CMatrix {
        let n = vals.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { c(vals[i]) } else { ZERO })
    }

    #[test]
    fn hermitian_eig_identity_and_ordering() {
        let e = hermitian_eig(&CMatrix::identity(3, 3), 1e-12).unwrap();
        assert_eq!(e.real_values(), vec![1.0, 1.0, 1.0]);
        let e = hermitian_eig(&diag(&[3.0, 1.0]), 1e-12).unwrap();
        assert_eq!(e.real_values(), vec![1.0, 3.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        let mut x = diag(&[1.0, 2.0]);
        x[(0, 1)] = c(1.0);
        assert!(matches!(hermitian_eig(&x, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_trivial_cases() {
        let s = svd_complex(&CMatrix::zeros(3, 3)).unwrap();
        assert!(s.sigma.iter().all(|&x| x == 0.0));
        let z = crate::embedding::z_matrix(2);
        let s = svd_complex(&z).unwrap();
        assert!(s.sigma.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn herm_fun_cuts_zero_eigenvalues() {
        let h = herm_fun(&CMatrix::identity(2, 2), |x| x, 1e-12).unwrap();
        assert!((h - CMatrix::identity(2, 2)).norm() < 1e-15);
        let h = herm_fun(&diag(&[4.0, 0.0]), |x| x.powf(-0.5), 1e-12).unwrap();
        assert!((h - diag(&[0.5, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn nullspace_trivial_cases() {
        assert_eq!(nullspace(&CMatrix::identity(3, 3), RANK_TOL).unwrap().ncols(), 0);
        assert_eq!(nullspace(&CMatrix::zeros(4, 4), RANK_TOL).unwrap().ncols(), 4);
        // wide input keeps its full kernel
        let wide = CMatrix::from_row_slice(1, 3, &[c(1.0), c(1.0), ZERO]);
        let k = nullspace(&wide, RANK_TOL).unwrap();
        assert_eq!(k.ncols(), 2);
        assert!((&wide * &k).norm() < 1e-14);
    }

    #[test]
    fn common_eigenvector_of_diagonal_pair() {
        let fam = vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])];
        let (v, l) = common_eigenvector(&fam, COMMUTATOR_TOL, 1).unwrap();
        let e1 = (v[0].norm() - 1.0).abs() < 1e-12;
        let e2 = (v[1].norm() - 1.0).abs() < 1e-12;
        assert!(e1 || e2);
        if e1 {
            assert!((l[0] - c(1.0)).norm() < 1e-12 && (l[1] - c(3.0)).norm() < 1e-12);
        } else {
            assert!((l[0] - c(2.0)).norm() < 1e-12 && (l[1] - c(4.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn common_eigenvector_of_identity() {
        let (v, l) = common_eigenvector(&[CMatrix::identity(3, 3)], COMMUTATOR_TOL, 5).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert!((l[0] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn common_eigenvector_rejects_non_commuting() {
        let mut a = diag(&[1.0, 2.0]);
        a[(0, 1)] = c(1.0);
        let b = diag(&[3.0, 4.0]);
        assert!(matches!(
            common_eigenvector(&[a, b], COMMUTATOR_TOL, 0),
            Err(Error::NotCommuting { .. })
        ));
    }
}
