//! The complex representation of quaternion matrices.
//!
//! `chi(A + B ĵ) = [[A, B], [-conj(B), conj(A)]]` maps `N x N` quaternion
//! matrices into `2N x 2N` complex matrices. Its image is cut out by the
//! quaternionic condition `X* = X#`, where `X# = -Z X^T Z` is the dual
//! operation and
//!
//! ```text
//! Z = [[ 0, I],
//!      [-I, 0]]
//! ```
//!
//! Other choices of `Z` appear in the literature; this crate fixes the one
//! above. Indices `0..N` form the upper block and `N..2N` the lower block, so
//! the time-reversal map `T` pairs index `j` with `N + j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quaternion::{QuatMatrix, QuatVector, Quaternion};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default structural tolerance, relative to `max(1, |X|_F)`.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn half_dim(n2: usize) -> Result<usize> {
    if !n2.is_multiple_of(2) {
        Err(Error::OddDimension(n2))
    } else {
        Ok(n2 / 2)
    }
}

pub(crate) fn ensure_square(x: &CMatrix) -> Result<usize> {
    if x.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(x.nrows())
}

pub(crate) fn ensure_even_square(x: &CMatrix) -> Result<usize> {
    half_dim(ensure_square(x)?)
}

/// `max(1, |X|_F)`, the scale every relative tolerance is measured against.
pub fn tol_scale(x: &CMatrix) -> f64 {
    x.norm().max(1.0)
}

/// The antisymmetric unitary `Z` of dimension `2n`.
pub fn z_matrix(n: usize) -> CMatrix {
    let mut z = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        z[(j, n + j)] = ONE;
        z[(n + j, j)] = -ONE;
    }
    z
}

/// The complex image of a square quaternion matrix.
pub fn chi(q: &QuatMatrix) -> CMatrix {
    assert!(q.is_square(), "chi is defined on square quaternion matrices");
    let n = q.rows();
    let mut x = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = q[(i, j)].split();
            x[(i, j)] = a;
            x[(i, n + j)] = b;
            x[(n + i, j)] = -b.conj();
            x[(n + i, n + j)] = a.conj();
        }
    }
    x
}

/// Inverse of [`chi`] on quaternionic matrices.
///
/// The input is first projected onto the quaternionic matrices (the `X` part
/// of [`quaternionic_split`]), so rounding noise below `tol` is discarded.
pub fn chi_inv(x: &CMatrix, tol: f64) -> Result<QuatMatrix> {
    let n = ensure_even_square(x)?;
    let deviation = quaternionic_defect(x)?;
    let threshold = tol * tol_scale(x);
    if deviation > threshold {
        return Err(Error::NotQuaternionic {
            deviation,
            threshold,
        });
    }
    let (proj, _) = quaternionic_split(x)?;
    Ok(QuatMatrix::from_fn(n, n, |i, j| {
        Quaternion::from_split(proj[(i, j)], proj[(i, n + j)])
    }))
}

/// `X# = [[D^T, -B^T], [-C^T, A^T]]` for `X = [[A, B], [C, D]]`.
pub fn dual(x: &CMatrix) -> Result<CMatrix> {
    let n = ensure_even_square(x)?;
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = x[(n + j, n + i)];
            out[(i, n + j)] = -x[(j, n + i)];
            out[(n + i, j)] = -x[(n + j, i)];
            out[(n + i, n + j)] = x[(j, i)];
        }
    }
    Ok(out)
}

/// Dual operation twisted by an arbitrary antisymmetric unitary `K`:
/// `A -> -K A^T K`.
pub fn dual_wrt(k: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    if k.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "twisting form is {:?} but matrix is {:?}",
            k.shape(),
            a.shape()
        )));
    }
    Ok(-(k * a.transpose() * k))
}

/// The antilinear time-reversal map `[v; w] -> [-conj(w); conj(v)]`.
pub fn apply_t(xi: &CVector) -> Result<CVector> {
    let n = half_dim(xi.len())?;
    Ok(CVector::from_fn(2 * n, |i, _| {
        if i < n {
            -xi[n + i].conj()
        } else {
            xi[i - n].conj()
        }
    }))
}

/// Applies [`apply_t`] to every column.
pub fn apply_t_columns(x: &CMatrix) -> Result<CMatrix> {
    let n = half_dim(x.nrows())?;
    Ok(CMatrix::from_fn(2 * n, x.ncols(), |i, j| {
        if i < n {
            -x[(n + i, j)].conj()
        } else {
            x[(i - n, j)].conj()
        }
    }))
}

/// Pulls a complex `2N` vector `[v; w]` back to the quaternion vector `v - ĵ w`.
///
/// This is the correspondence under which `chi(X) [v; w] = [v; w] lambda`
/// becomes `X (v - ĵ w) = (v - ĵ w) lambda`.
pub fn pull_back(xi: &CVector) -> Result<QuatVector> {
    let n = half_dim(xi.len())?;
    // ĵ (x + y i) = x ĵ - y k̂
    Ok((0..n)
        .map(|j| {
            let v = xi[j];
            let w = xi[n + j];
            Quaternion::new(v.re, v.im, -w.re, w.im)
        })
        .collect())
}

/// Inverse of [`pull_back`].
pub fn push_forward(v: &[Quaternion]) -> CVector {
    let n = v.len();
    CVector::from_fn(2 * n, |i, _| {
        if i < n {
            Complex64::new(v[i].a, v[i].b)
        } else {
            let q = v[i - n];
            Complex64::new(-q.c, q.d)
        }
    })
}

/// `|X* - X#|_F`.
pub fn quaternionic_defect(x: &CMatrix) -> Result<f64> {
    Ok((x.adjoint() - dual(x)?).norm())
}

/// `|X - X#|_F`.
pub fn selfdual_defect(x: &CMatrix) -> Result<f64> {
    Ok((x - dual(x)?).norm())
}

/// `|X^T Z X - Z|_F`.
pub fn symplectic_defect(x: &CMatrix) -> Result<f64> {
    let n = ensure_even_square(x)?;
    let z = z_matrix(n);
    Ok((x.transpose() * &z * x - z).norm())
}

/// `|X* X - I|_F`.
pub fn unitary_defect(x: &CMatrix) -> f64 {
    let n = x.ncols();
    (x.adjoint() * x - CMatrix::identity(n, n)).norm()
}

/// `|X X* - X* X|_F`.
pub fn normal_defect(x: &CMatrix) -> f64 {
    let xs = x.adjoint();
    (x * &xs - &xs * x).norm()
}

/// Largest relative defect `|X xi + T(X T xi)| / (|X|_F |xi|)` over the given
/// probe vectors; zero exactly when `X = -T X T` on the probes.
pub fn t_conjugation_defect(x: &CMatrix, probes: &[CVector]) -> Result<f64> {
    ensure_even_square(x)?;
    let scale = x.norm().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for xi in probes {
        let lhs = x * xi;
        let rhs = apply_t(&(x * apply_t(xi)?))?;
        let d = (lhs + rhs).norm() / (scale * xi.norm().max(f64::MIN_POSITIVE));
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Splits `G = X + iY` with `X`, `Y` quaternionic.
pub fn quaternionic_split(g: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let gsa = dual(g)?.adjoint();
    let x = (&gsa + g).scale(0.5);
    let y = (&gsa - g) * Complex64::new(0.0, 0.5);
    Ok((x, y))
}

/// Measured structural defects, each a Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviations {
    pub quaternionic: f64,
    pub selfdual: f64,
    pub symmetric: f64,
    pub hermitian: f64,
    pub normal: f64,
    pub unitary: f64,
    pub symplectic: f64,
}

/// Tolerance-tagged structure flags for a complex matrix.
///
/// A flag is set iff its deviation is at most `tolerance * max(1, |X|_F)`.
/// Predicates that need even dimension report an infinite deviation on odd
/// input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    pub quaternionic: bool,
    pub selfdual: bool,
    pub symmetric: bool,
    pub hermitian: bool,
    pub normal: bool,
    pub unitary: bool,
    pub symplectic: bool,
    pub deviations: Deviations,
    pub tolerance: f64,
    pub scale: f64,
}

impl StructureReport {
    pub fn threshold(&self) -> f64 {
        self.tolerance * self.scale
    }

    /// `(name, flag, deviation)` rows in a fixed order.
    pub fn rows(&self) -> [(&'static str, bool, f64); 7] {
        let d = &self.deviations;
        [
            ("quaternionic", self.quaternionic, d.quaternionic),
            ("selfdual", self.selfdual, d.selfdual),
            ("symmetric", self.symmetric, d.symmetric),
            ("hermitian", self.hermitian, d.hermitian),
            ("normal", self.normal, d.normal),
            ("unitary", self.unitary, d.unitary),
            ("symplectic", self.symplectic, d.symplectic),
        ]
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.rows().iter().find(|r| r.0 == name).map(|r| r.1)
    }
}

pub fn classify(x: &CMatrix, tol: f64) -> StructureReport {
    let square = x.nrows() == x.ncols();
    let even = square && x.nrows().is_multiple_of(2);
    let inf = f64::INFINITY;
    let deviations = Deviations {
        quaternionic: if even { quaternionic_defect(x).unwrap_or(inf) } else { inf },
        selfdual: if even { selfdual_defect(x).unwrap_or(inf) } else { inf },
        symmetric: if square { (x - x.transpose()).norm() } else { inf },
        hermitian: if square { (x - x.adjoint()).norm() } else { inf },
        normal: if square { normal_defect(x) } else { inf },
        unitary: if square { unitary_defect(x) } else { inf },
        symplectic: if even { symplectic_defect(x).unwrap_or(inf) } else { inf },
    };
    let scale = tol_scale(x);
    let threshold = tol * scale;
    let ok = |d: f64| d <= threshold;
    StructureReport {
        quaternionic: ok(deviations.quaternionic),
        selfdual: ok(deviations.selfdual),
        symmetric: ok(deviations.symmetric),
        hermitian: ok(deviations.hermitian),
        normal: ok(deviations.normal),
        unitary: ok(deviations.unitary),
        symplectic: ok(deviations.symplectic),
        deviations,
        tolerance: tol,
        scale,
    }
}

pub(crate) fn require_quaternionic(x: &CMatrix, tol: f64) -> Result<usize> {
    let n = ensure_even_square(x)?;
    let deviation = quaternionic_defect(x)?;
    let threshold = tol * tol_scale(x);
    if deviation > threshold {
        return Err(Error::NotQuaternionic {
            deviation,
            threshold,
        });
    }
    Ok(n)
}

pub(crate) fn require_selfdual(x: &CMatrix, tol: f64) -> Result<usize> {
    let n = ensure_even_square(x)?;
    let deviation = selfdual_defect(x)?;
    let threshold = tol * tol_scale(x);
    if deviation > threshold {
        return Err(Error::NotSelfDual {
            deviation,
            threshold,
        });
    }
    Ok(n)
}

pub(crate) fn require_symmetric(x: &CMatrix, tol: f64) -> Result<usize> {
    let n = ensure_square(x)?;
    let deviation = (x - x.transpose()).norm();
    let threshold = tol * tol_scale(x);
    if deviation > threshold {
        return Err(Error::NotSymmetric {
            deviation,
            threshold,
        });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cm(rows: usize, entries: &[Complex64]) -> CMatrix {
        CMatrix::from_row_slice(rows, entries.len() / rows, entries)
    }

    #[test]
    fn chi_of_units() {
        assert_eq!(chi(&QuatMatrix::identity(1)), CMatrix::identity(2, 2));
        let j = chi(&QuatMatrix::scalar(1, Quaternion::J));
        assert_eq!(j, cm(2, &[ZERO, ONE, -ONE, ZERO]));
        let k = chi(&QuatMatrix::scalar(1, Quaternion::K));
        assert_eq!(k, cm(2, &[ZERO, I, I, ZERO]));
        let i = chi(&QuatMatrix::scalar(1, Quaternion::I));
        assert_eq!(&i * &j, k);
    }

    #[test]
    fn chi_of_j_is_z() {
        assert_eq!(chi(&QuatMatrix::scalar(3, Quaternion::J)), z_matrix(3));
    }

    #[test]
    fn chi_inv_examples() {
        let j = cm(2, &[ZERO, ONE, -ONE, ZERO]);
        assert_eq!(chi_inv(&j, DEFAULT_TOL).unwrap(), QuatMatrix::scalar(1, Quaternion::J));
        assert_eq!(
            chi_inv(&CMatrix::identity(6, 6), DEFAULT_TOL).unwrap(),
            QuatMatrix::identity(3)
        );
        let bad = cm(2, &[ONE, ZERO, ZERO, c(2.0, 0.0)]);
        assert!(matches!(chi_inv(&bad, DEFAULT_TOL), Err(Error::NotQuaternionic { .. })));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&CMatrix::identity(4, 4)).unwrap(), CMatrix::identity(4, 4));
        let (a, b, cc, d) = (c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(-2.0, 4.0));
        let x = cm(2, &[a, b, cc, d]);
        assert_eq!(dual(&x).unwrap(), cm(2, &[d, -b, -cc, a]));
        let z = z_matrix(2);
        assert_eq!(dual(&z).unwrap(), -z.clone());
        assert!(matches!(dual(&CMatrix::identity(3, 3)), Err(Error::OddDimension(3))));
    }

    #[test]
    fn dual_matches_twisted_transpose() {
        let x = CMatrix::from_fn(4, 4, |i, j| c(i as f64 - 1.5 * j as f64, (i * j) as f64 + 0.25));
        let z = z_matrix(2);
        assert_eq!(dual(&x).unwrap(), dual_wrt(&z, &x).unwrap());
    }

    #[test]
    fn time_reversal_examples() {
        let mut e1 = CVector::zeros(6);
        e1[0] = ONE;
        let t = apply_t(&e1).unwrap();
        let mut e4 = CVector::zeros(6);
        e4[3] = ONE;
        assert_eq!(t, e4);
        let xi = CVector::from_fn(4, |i, _| c(i as f64 + 0.5, 1.0 - i as f64));
        assert_eq!(apply_t(&apply_t(&xi).unwrap()).unwrap(), -xi.clone());
        assert!(xi.dotc(&apply_t(&xi).unwrap()).norm() < 1e-15);
        assert!(matches!(apply_t(&CVector::zeros(3)), Err(Error::OddDimension(3))));
    }

    #[test]
    fn pull_back_round_trip() {
        let xi = CVector::from_fn(6, |i, _| c(i as f64 - 2.0, 0.5 * i as f64));
        assert_eq!(push_forward(&pull_back(&xi).unwrap()), xi);
    }

    #[test]
    fn classify_z() {
        let r = classify(&z_matrix(1), DEFAULT_TOL);
        assert!(r.quaternionic && r.symplectic && r.unitary && r.normal);
        assert!(!r.hermitian);
    }

    #[test]
    fn classify_diag_1_2() {
        let r = classify(&cm(2, &[ONE, ZERO, ZERO, c(2.0, 0.0)]), DEFAULT_TOL);
        assert!(!r.quaternionic && !r.selfdual);
        assert!(r.symmetric && r.hermitian && r.normal);
    }

    #[test]
    fn classify_odd_dimension() {
        let r = classify(&CMatrix::identity(3, 3), DEFAULT_TOL);
        assert!(!r.quaternionic && !r.symplectic && !r.selfdual);
        assert!(r.unitary && r.hermitian);
    }

    #[test]
    fn split_examples() {
        let z = z_matrix(2);
        let (x, y) = quaternionic_split(&z).unwrap();
        assert_eq!(x, z);
        assert_eq!(y.norm(), 0.0);
        let ii = CMatrix::identity(4, 4) * I;
        let (x, y) = quaternionic_split(&ii).unwrap();
        assert_eq!(x.norm(), 0.0);
        assert_eq!(y, CMatrix::identity(4, 4));
    }
}
