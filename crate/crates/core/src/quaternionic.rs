//! Factorizations of quaternionic matrices: joint Schur form of commuting
//! families, joint diagonalization of normal families, right eigenvalues,
//! polar decomposition, SVD, QR and the operator norm.
//!
//! Inputs are complex `2N x 2N` matrices satisfying `X* = X#` (use
//! [`crate::embedding::chi`] to get there from a [`QuatMatrix`]). Every
//! unitary factor returned here is symplectic.

use num_complex::Complex64;

use crate::blocks::{below_norm, embed_pair, paired_permutation, quaternionic_form, remove_pair, split, upper};
use crate::certificate::{Certified, Check};
use crate::embedding::{
    chi, classify, ensure_even_square, pull_back, require_quaternionic, tol_scale, CMatrix, CVector, ZERO,
};
use crate::error::{Error, Result};
use crate::kernels::{
    check_commuting, common_eigenvector, determinant, eigenvalues, svd_complex, Svd, COMMUTATOR_TOL, RANK_TOL,
};
use crate::quaternion::{QuatMatrix, QuatVector, Quaternion};
use crate::symplectic::{complete_symplectic, extend_quaternionic_isometry, partial_isometry_defect};

/// Relative reconstruction tolerance for Schur and diagonal forms.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Absolute tolerance on entries that must vanish in triangular factors.
pub const TRIANGULAR_TOL: f64 = 1e-11;
/// Absolute tolerance on `|U^T Z U - Z|_F` and `|U*U - I|_F`.
pub const SYMPLECTIC_TOL: f64 = 1e-11;
/// Tolerance on `|det U - 1|` for symplectic unitaries.
pub const DET_TOL: f64 = 1e-8;
/// Relative normality tolerance `|XX* - X*X|_F <= tol * max(1,|X|_F)^2`.
pub const NORMAL_TOL: f64 = 1e-8;
/// Clustering tolerance used for multiplicity checks.
pub const CLUSTER_TOL: f64 = 1e-8;

fn symplectic_checks(prefix: &str, u: &CMatrix) -> Vec<Check> {
    let r = classify(u, 0.0);
    vec![
        Check::new(format!("{prefix}.unitary"), r.deviations.unitary, SYMPLECTIC_TOL),
        Check::new(format!("{prefix}.symplectic"), r.deviations.symplectic, SYMPLECTIC_TOL),
        Check::new(
            format!("{prefix}.det_minus_one"),
            determinant(u).map(|d| (d - 1.0).norm()).unwrap_or(f64::INFINITY),
            DET_TOL,
        ),
    ]
}

fn require_family(xs: &[CMatrix], tol: f64) -> Result<usize> {
    let first = xs.first().ok_or(Error::EmptyFamily)?;
    let n = ensure_even_square(first)?;
    for x in xs {
        if x.shape() != first.shape() {
            return Err(Error::DimensionMismatch(format!(
                "family mixes {:?} and {:?}",
                first.shape(),
                x.shape()
            )));
        }
        require_quaternionic(x, tol)?;
    }
    check_commuting(xs, COMMUTATOR_TOL)?;
    Ok(n)
}

/// Deflation shared by the quaternionic and self-dual Schur forms: find a
/// common eigenvector, complete it to a symplectic unitary, drop the pair of
/// indices `(0, n)` and recurse.
pub(crate) fn deflate_commuting(family: &[CMatrix], seed: u64) -> Result<CMatrix> {
    let n = ensure_even_square(&family[0])?;
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let (v, _) = common_eigenvector(family, COMMUTATOR_TOL, seed)?;
    let u1 = complete_symplectic(&v)?;
    if n == 1 {
        return Ok(u1);
    }
    let reduced: Vec<CMatrix> = family
        .iter()
        .map(|x| remove_pair(&(u1.adjoint() * x * &u1), n))
        .collect();
    let rest = deflate_commuting(&reduced, seed.wrapping_add(1))?;
    Ok(u1 * embed_pair(&rest, n))
}

/// `U* X U = [[T, S], [-conj(S), conj(T)]]` for one member of the family.
#[derive(Debug, Clone)]
pub struct SchurBlocks {
    pub t: CMatrix,
    pub s: CMatrix,
    /// Relative reconstruction residual `|U*XU - form(T,S)|_F / max(1,|X|_F)`.
    pub residual: f64,
    /// Norm of the strictly lower part of the computed upper-left block.
    pub t_defect: f64,
    /// Norm of the lower part (with diagonal) of the computed upper-right block.
    pub s_defect: f64,
}

#[derive(Debug, Clone)]
pub struct QuatSchurResult {
    pub u: CMatrix,
    pub blocks: Vec<SchurBlocks>,
    pub inputs: Vec<CMatrix>,
}

impl QuatSchurResult {
    pub fn residuals(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.residual).collect()
    }
}

fn schur_blocks(x: &CMatrix, u: &CMatrix, n: usize) -> SchurBlocks {
    let m = u.adjoint() * x * u;
    let (a, b, _, _) = split(&m, n);
    let t = upper(&a, false);
    let s = upper(&b, true);
    let residual = (&m - quaternionic_form(&t, &s)).norm() / tol_scale(x);
    SchurBlocks {
        t_defect: below_norm(&a, false),
        s_defect: below_norm(&b, true),
        t,
        s,
        residual,
    }
}

/// Single symplectic unitary bringing every member of a commuting
/// quaternionic family to quaternionic upper-triangular form.
pub fn schur_commuting(xs: &[CMatrix], tol: f64, seed: u64) -> Result<QuatSchurResult> {
    let n = require_family(xs, tol)?;
    let u = deflate_commuting(xs, seed)?;
    let blocks = xs.iter().map(|x| schur_blocks(x, &u, n)).collect();
    Ok(QuatSchurResult {
        u,
        blocks,
        inputs: xs.to_vec(),
    })
}

impl Certified for QuatSchurResult {
    fn kind(&self) -> &'static str {
        "quaternionic-schur"
    }

    fn checks(&self) -> Vec<Check> {
        let mut out = symplectic_checks("U", &self.u);
        let n = self.u.nrows() / 2;
        for (j, x) in self.inputs.iter().enumerate() {
            let b = schur_blocks(x, &self.u, n);
            let stored = (quaternionic_form(&self.blocks[j].t, &self.blocks[j].s)
                - self.u.adjoint() * x * &self.u)
                .norm()
                / tol_scale(x);
            out.push(Check::new(format!("X{j}.reconstruction"), stored, RECONSTRUCTION_TOL));
            out.push(Check::new(
                format!("T{j}.lower"),
                below_norm(&self.blocks[j].t, false).max(b.t_defect),
                TRIANGULAR_TOL,
            ));
            out.push(Check::new(
                format!("S{j}.lower"),
                below_norm(&self.blocks[j].s, true).max(b.s_defect),
                TRIANGULAR_TOL,
            ));
        }
        out
    }
}

/// Joint diagonalization of a commuting family of normal quaternionic
/// matrices: `U* X_j U = diag(D_j, conj(D_j))`.
#[derive(Debug, Clone)]
pub struct DiagResult {
    pub u: CMatrix,
    /// Diagonal of each `D_j`.
    pub diagonals: Vec<Vec<Complex64>>,
    pub inputs: Vec<CMatrix>,
}

fn diag_form(d: &[Complex64]) -> CMatrix {
    let n = d.len();
    CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            ZERO
        } else if i < n {
            d[i]
        } else {
            d[i - n].conj()
        }
    })
}

impl DiagResult {
    /// `|U* X_j U - diag(D_j, conj(D_j))|_F / max(1, |X_j|_F)`.
    pub fn residual(&self, j: usize) -> f64 {
        let x = &self.inputs[j];
        (self.u.adjoint() * x * &self.u - diag_form(&self.diagonals[j])).norm() / tol_scale(x)
    }
}

pub fn diagonalize_commuting_normal(xs: &[CMatrix], tol: f64, seed: u64) -> Result<DiagResult> {
    for x in xs {
        let deviation = crate::embedding::normal_defect(x);
        let threshold = NORMAL_TOL * tol_scale(x).powi(2);
        if deviation > threshold {
            return Err(Error::NotNormal {
                deviation,
                threshold,
            });
        }
    }
    let schur = schur_commuting(xs, tol, seed)?;
    let diagonals = schur
        .blocks
        .iter()
        .map(|b| b.t.diagonal().iter().copied().collect())
        .collect();
    Ok(DiagResult {
        u: schur.u,
        diagonals,
        inputs: xs.to_vec(),
    })
}

impl Certified for DiagResult {
    fn kind(&self) -> &'static str {
        "quaternionic-diagonalization"
    }

    fn checks(&self) -> Vec<Check> {
        let mut out = symplectic_checks("U", &self.u);
        for j in 0..self.inputs.len() {
            out.push(Check::new(format!("X{j}.diagonal_form"), self.residual(j), RECONSTRUCTION_TOL));
        }
        out
    }
}

/// `det U` for a symplectic unitary; always 1 up to rounding.
pub fn symplectic_det_check(u: &CMatrix, tol: f64) -> Result<Complex64> {
    crate::symplectic::require_symplectic_unitary(u, tol)?;
    determinant(u)
}

/// A complex right eigenvalue `lambda` with a quaternion eigenvector:
/// `Q v = v lambda`.
#[derive(Debug, Clone)]
pub struct RightEigenpair {
    pub value: Complex64,
    pub vector: QuatVector,
}

fn representatives(x: &CMatrix) -> Result<Vec<Complex64>> {
    let n = x.nrows() / 2;
    let mut vals = eigenvalues(x)?;
    // conjugation-closed: the N largest imaginary parts are one of each pair
    vals.sort_by(|a, b| b.im.total_cmp(&a.im));
    let mut reps: Vec<Complex64> = vals[..n].iter().map(|z| Complex64::new(z.re, z.im.max(0.0))).collect();
    reps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(reps)
}

/// Complex right eigenvalues of a quaternion matrix: `N` representatives with
/// nonnegative imaginary part sorted by `(Re, Im)`, followed by their
/// conjugates in the same order.
pub fn right_eigenvalues(q: &QuatMatrix) -> Result<Vec<Complex64>> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", q.rows(), q.cols())));
    }
    let reps = representatives(&chi(q))?;
    let conj: Vec<Complex64> = reps.iter().map(|z| z.conj()).collect();
    Ok(reps.into_iter().chain(conj).collect())
}

/// The representatives of [`right_eigenvalues`] with eigenvectors pulled back
/// from `chi(Q)`: an eigenvector `[v; w]` becomes `v - ĵ w`.
pub fn right_eigenpairs(q: &QuatMatrix) -> Result<Vec<RightEigenpair>> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", q.rows(), q.cols())));
    }
    let x = chi(q);
    let dim = x.nrows();
    representatives(&x)?
        .into_iter()
        .map(|lambda| {
            let shifted = &x - CMatrix::identity(dim, dim) * lambda;
            let s = svd_complex(&shifted)?;
            let xi: CVector = s.v.column(dim - 1).into_owned();
            Ok(RightEigenpair {
                value: lambda,
                vector: pull_back(&xi)?,
            })
        })
        .collect()
}

/// `|Q v - v lambda| / (|Q|_F |v|)` in quaternion arithmetic.
pub fn right_eigen_residual(q: &QuatMatrix, pair: &RightEigenpair) -> Result<f64> {
    let lhs = q.mul_vec(&pair.vector)?;
    let mu = Quaternion::from_complex(pair.value);
    let diff: QuatVector = lhs.iter().zip(&pair.vector).map(|(&a, &v)| a - v * mu).collect();
    let scale = q.frobenius_norm().max(f64::MIN_POSITIVE) * crate::quaternion::qvec_norm(&pair.vector);
    Ok(crate::quaternion::qvec_norm(&diff) / scale)
}

/// Which structured unitary a polar decomposition carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarVariant {
    Quaternionic,
    Symmetric,
    SelfDual,
}

/// `X = U P = W P` with `U` unitary, `W` the minimal partial isometry and
/// `P = (X*X)^(1/2)`.
#[derive(Debug, Clone)]
pub struct PolarResult {
    pub variant: PolarVariant,
    pub u: CMatrix,
    pub p: CMatrix,
    pub w: CMatrix,
    pub input: CMatrix,
}

impl PolarResult {
    /// `|X - U P|_F / max(1, |X|_F)`.
    pub fn residual(&self) -> f64 {
        (&self.input - &self.u * &self.p).norm() / tol_scale(&self.input)
    }

    pub fn minimal_residual(&self) -> f64 {
        (&self.input - &self.w * &self.p).norm() / tol_scale(&self.input)
    }
}

/// Relative reconstruction tolerance for polar, SVD and QR.
pub const FACTOR_TOL: f64 = 1e-9;
/// Tolerance for the structure of unitary polar factors.
pub const POLAR_STRUCTURE_TOL: f64 = 1e-10;

/// Minimal polar data computed through the SVD of `X`: `P = V S V*` and
/// `W = X f(X*X)` with `f(s^2) = 1/s` on the retained singular values.
pub(crate) fn minimal_polar(x: &CMatrix) -> Result<(CMatrix, CMatrix, Svd)> {
    let s = svd_complex(x)?;
    let v = &s.v;
    let rank = s.rank(RANK_TOL);
    let lambda: Vec<f64> = s.sigma.iter().map(|x| x * x).collect();
    let sq = crate::kernels::spectral_apply(v, &lambda, f64::sqrt, 0.0);
    let mut inv_sqrt = v.clone();
    for (j, &sig) in s.sigma.iter().enumerate() {
        let f = if j < rank { 1.0 / sig } else { 0.0 };
        inv_sqrt.column_mut(j).scale_mut(f);
    }
    let f_of = inv_sqrt * v.adjoint();
    let w = x * f_of;
    let p = (&sq + sq.adjoint()).scale(0.5);
    Ok((w, p, s))
}

pub fn polar_quaternionic(x: &CMatrix, tol: f64) -> Result<PolarResult> {
    require_quaternionic(x, tol)?;
    let (w, p, _) = minimal_polar(x)?;
    let u = extend_quaternionic_isometry(&w, tol)?;
    Ok(PolarResult {
        variant: PolarVariant::Quaternionic,
        u,
        p,
        w,
        input: x.clone(),
    })
}

fn psd_defect(p: &CMatrix) -> f64 {
    let herm = (p - p.adjoint()).norm();
    let min_eig = crate::kernels::hermitian_eig(&((p + p.adjoint()).scale(0.5)), 1.0)
        .map(|e| e.real_values().first().copied().unwrap_or(0.0))
        .unwrap_or(f64::NEG_INFINITY);
    herm.max((-min_eig).max(0.0))
}

impl Certified for PolarResult {
    fn kind(&self) -> &'static str {
        match self.variant {
            PolarVariant::Quaternionic => "quaternionic-polar",
            PolarVariant::Symmetric => "symmetric-polar",
            PolarVariant::SelfDual => "selfdual-polar",
        }
    }

    fn checks(&self) -> Vec<Check> {
        let scale = tol_scale(&self.input);
        let mut out = vec![
            Check::new("X=UP", self.residual(), FACTOR_TOL),
            Check::new("X=WP", self.minimal_residual(), FACTOR_TOL),
            Check::new("P.psd", psd_defect(&self.p) / scale, POLAR_STRUCTURE_TOL),
            Check::new("W.partial_isometry", partial_isometry_defect(&self.w), 1e-8),
        ];
        let r = classify(&self.u, 0.0);
        out.push(Check::new("U.unitary", r.deviations.unitary, POLAR_STRUCTURE_TOL));
        match self.variant {
            PolarVariant::Quaternionic => {
                out.push(Check::new("U.symplectic", r.deviations.symplectic, POLAR_STRUCTURE_TOL));
                let pq = classify(&self.p, 0.0).deviations.quaternionic / scale;
                out.push(Check::new("P.quaternionic", pq, POLAR_STRUCTURE_TOL));
            }
            PolarVariant::Symmetric => {
                out.push(Check::new("U.symmetric", r.deviations.symmetric, POLAR_STRUCTURE_TOL));
                out.push(Check::new(
                    "|X*|=|X|^T",
                    crate::selfdual::abs_adjoint_defect(&self.input).unwrap_or(f64::INFINITY),
                    FACTOR_TOL,
                ));
            }
            PolarVariant::SelfDual => {
                out.push(Check::new("U.selfdual", r.deviations.selfdual, POLAR_STRUCTURE_TOL));
            }
        }
        out
    }
}

/// `X = U D V` with symplectic unitaries `U`, `V` and `D = diag(d, d)`,
/// `d` real, nonnegative and descending.
#[derive(Debug, Clone)]
pub struct QuatSvdResult {
    pub u: CMatrix,
    pub d: CMatrix,
    pub v: CMatrix,
    /// The `N` distinct-slot singular values `d`; each appears twice in `D`.
    pub singular_values: Vec<f64>,
    pub input: CMatrix,
}

impl QuatSvdResult {
    pub fn residual(&self) -> f64 {
        (&self.input - &self.u * &self.d * &self.v).norm() / tol_scale(&self.input)
    }
}

/// Groups sorted values into clusters whose neighbours differ by at most
/// `tol * max(1, |largest|)` and returns the cluster sizes.
pub fn cluster_sizes(sorted: &[f64], tol: f64) -> Vec<usize> {
    let scale = sorted.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut sizes = Vec::new();
    let mut current = 0usize;
    for (i, &x) in sorted.iter().enumerate() {
        if i > 0 && (x - sorted[i - 1]).abs() > tol * scale {
            sizes.push(current);
            current = 0;
        }
        current += 1;
    }
    if current > 0 {
        sizes.push(current);
    }
    sizes
}

pub fn svd_quaternionic(x: &CMatrix, tol: f64, seed: u64) -> Result<QuatSvdResult> {
    let n = require_quaternionic(x, tol)?;
    let polar = polar_quaternionic(x, tol)?;
    let diag = diagonalize_commuting_normal(std::slice::from_ref(&polar.p), tol, seed)?;
    let d: Vec<f64> = diag.diagonals[0].iter().map(|z| z.re.max(0.0)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let perm = paired_permutation(&order);
    let q = diag.u * perm;
    let sorted: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let dmat = CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i == j {
            Complex64::new(sorted[i % n], 0.0)
        } else {
            ZERO
        }
    });
    Ok(QuatSvdResult {
        u: polar.u * &q,
        d: dmat,
        v: q.adjoint(),
        singular_values: sorted,
        input: x.clone(),
    })
}

impl Certified for QuatSvdResult {
    fn kind(&self) -> &'static str {
        "quaternionic-svd"
    }

    fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new("X=UDV", self.residual(), FACTOR_TOL)];
        out.extend(symplectic_checks("U", &self.u));
        out.extend(symplectic_checks("V", &self.v));
        let d = &self.d;
        let n = d.nrows() / 2;
        let mut off = 0.0f64;
        let mut neg = 0.0f64;
        let mut imag = 0.0f64;
        for i in 0..2 * n {
            for j in 0..2 * n {
                if i != j {
                    off += d[(i, j)].norm_sqr();
                }
            }
            neg = neg.max(-d[(i, i)].re);
            imag = imag.max(d[(i, i)].im.abs());
        }
        out.push(Check::new("D.diagonal", off.sqrt(), 0.0));
        out.push(Check::new("D.real_nonnegative", neg.max(imag), 0.0));
        let dual_adj = crate::embedding::dual(d)
            .map(|ds| (ds - d.adjoint()).norm())
            .unwrap_or(f64::INFINITY);
        out.push(Check::new("D#=D*", dual_adj, TRIANGULAR_TOL));
        // singular values of the unstructured problem come in equal pairs
        let s = svd_complex(&self.input).map(|s| s.sigma).unwrap_or_default();
        let mut sorted = s.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let scale = sorted.last().copied().unwrap_or(0.0).max(1.0);
        let pair_gap = sorted
            .chunks(2)
            .map(|p| if p.len() == 2 { (p[1] - p[0]).abs() } else { f64::INFINITY })
            .fold(0.0, f64::max)
            / scale;
        out.push(Check::new("sigma.even_multiplicity", pair_gap, CLUSTER_TOL));
        let mut doubled: Vec<f64> = self.singular_values.iter().flat_map(|&x| [x, x]).collect();
        doubled.sort_by(|a, b| a.total_cmp(b));
        let mismatch = doubled
            .iter()
            .zip(&sorted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale;
        out.push(Check::new("sigma.matches_unstructured", mismatch, FACTOR_TOL));
        out
    }
}

/// `X = Q R` with `Q` symplectic unitary and `R = [[A, B], [-conj(B), conj(A)]]`,
/// `A` and `B` upper triangular.
#[derive(Debug, Clone)]
pub struct QrResult {
    pub q: CMatrix,
    pub r: CMatrix,
    /// Norm of the entries of `Q* X` that were dropped to make `R` exactly
    /// block upper triangular.
    pub triangular_defect: f64,
    pub input: CMatrix,
}

impl QrResult {
    pub fn residual(&self) -> f64 {
        (&self.input - &self.q * &self.r).norm() / tol_scale(&self.input)
    }

    /// `R` as an upper-triangular quaternion matrix.
    pub fn r_quaternion(&self) -> QuatMatrix {
        let n = self.r.nrows() / 2;
        QuatMatrix::from_fn(n, n, |i, j| Quaternion::from_split(self.r[(i, j)], self.r[(i, n + j)]))
    }
}

/// Embeds a `2m` symplectic unitary acting on the trailing `m` indices of
/// each block of a `2n` space.
fn embed_trailing(u: &CMatrix, n: usize) -> CMatrix {
    let m = u.nrows() / 2;
    let off = n - m;
    let idx: Vec<usize> = (off..n).chain(n + off..2 * n).collect();
    let mut out = CMatrix::identity(2 * n, 2 * n);
    for (i, &ii) in idx.iter().enumerate() {
        for (j, &jj) in idx.iter().enumerate() {
            out[(ii, jj)] = u[(i, j)];
        }
    }
    out
}

pub fn qr_quaternionic(x: &CMatrix, tol: f64) -> Result<QrResult> {
    let n = require_quaternionic(x, tol)?;
    let mut q = CMatrix::identity(2 * n, 2 * n);
    let mut r = x.clone();
    let tiny = f64::EPSILON * tol_scale(x);
    for k in 0..n {
        let m = n - k;
        // first active column, restricted to the active rows of both blocks
        let col = CVector::from_fn(2 * m, |i, _| {
            let row = if i < m { k + i } else { n + k + (i - m) };
            r[(row, k)]
        });
        let norm = col.norm();
        if norm <= tiny {
            continue;
        }
        let qk = embed_trailing(&complete_symplectic(&(&col / Complex64::new(norm, 0.0)))?, n);
        r = qk.adjoint() * r;
        q *= qk;
    }
    let raw = q.adjoint() * x;
    let (a, b, _, _) = split(&raw, n);
    let clean = quaternionic_form(&upper(&a, false), &upper(&b, false));
    let triangular_defect = (&raw - &clean).norm();
    Ok(QrResult {
        q,
        r: clean,
        triangular_defect,
        input: x.clone(),
    })
}

impl Certified for QrResult {
    fn kind(&self) -> &'static str {
        "quaternionic-qr"
    }

    fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new("X=QR", self.residual(), FACTOR_TOL)];
        out.extend(symplectic_checks("Q", &self.q));
        let n = self.r.nrows() / 2;
        let (a, b, _, _) = split(&self.r, n);
        let lower = below_norm(&a, false).hypot(below_norm(&b, false)).max(self.triangular_defect);
        out.push(Check::new("R.block_upper_triangular", lower, TRIANGULAR_TOL));
        let rq = classify(&self.r, 0.0).deviations.quaternionic;
        out.push(Check::new("R.quaternionic", rq, TRIANGULAR_TOL));
        out
    }
}

/// Operator norm of a quaternion matrix, which equals the largest singular
/// value of its complex image.
pub fn operator_norm(q: &QuatMatrix) -> Result<f64> {
    Ok(operator_norm_witness(q)?.0)
}

/// The norm together with a quaternion vector attaining it: the top right
/// singular vector `[v; w]` of `chi(Q)` pulled back to `v - ĵ w`.
pub fn operator_norm_witness(q: &QuatMatrix) -> Result<(f64, QuatVector)> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", q.rows(), q.cols())));
    }
    let s = svd_complex(&chi(q))?;
    let xi: CVector = s.v.column(0).into_owned();
    Ok((s.sigma_max(), pull_back(&xi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{z_matrix, DEFAULT_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schur_of_identity() {
        let r = schur_commuting(&[CMatrix::identity(4, 4)], DEFAULT_TOL, 0).unwrap();
        assert!((&r.u - CMatrix::identity(4, 4)).norm() < 1e-14);
        assert!((&r.blocks[0].t - CMatrix::identity(2, 2)).norm() < 1e-14);
        assert!(r.blocks[0].s.norm() < 1e-14);
    }

    #[test]
    fn schur_of_diagonal_imaginary() {
        let q = QuatMatrix::from_fn(2, 2, |i, j| if i == j { Quaternion::I.scale((i + 1) as f64) } else { Quaternion::ZERO });
        let r = schur_commuting(&[chi(&q)], DEFAULT_TOL, 3).unwrap();
        let mut d: Vec<Complex64> = r.blocks[0].t.diagonal().iter().copied().collect();
        d.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((d[0] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((d[1] - c(0.0, 2.0)).norm() < 1e-12);
        assert!(r.blocks[0].s.norm() < 1e-12);
    }

    #[test]
    fn schur_rejects_non_quaternionic() {
        let mut x = CMatrix::identity(2, 2);
        x[(1, 1)] = c(2.0, 0.0);
        assert!(matches!(schur_commuting(&[x], DEFAULT_TOL, 0), Err(Error::NotQuaternionic { .. })));
    }

    #[test]
    fn diag_of_scalar_i() {
        let x = chi(&QuatMatrix::scalar(3, Quaternion::I));
        let r = diagonalize_commuting_normal(&[x], DEFAULT_TOL, 1).unwrap();
        for d in &r.diagonals[0] {
            assert!((d - c(0.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn det_of_identity_and_z() {
        assert!((symplectic_det_check(&CMatrix::identity(4, 4), DEFAULT_TOL).unwrap() - 1.0).norm() < 1e-15);
        assert!((symplectic_det_check(&z_matrix(1), DEFAULT_TOL).unwrap() - 1.0).norm() < 1e-15);
        let d = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), ZERO, ZERO, c(0.0, 1.0)]);
        assert!(matches!(symplectic_det_check(&d, DEFAULT_TOL), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn right_eigenvalues_of_j_and_identity() {
        let ev = right_eigenvalues(&QuatMatrix::scalar(1, Quaternion::J)).unwrap();
        assert!((ev[0] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, -1.0)).norm() < 1e-12);
        let ev = right_eigenvalues(&QuatMatrix::identity(1)).unwrap();
        assert!(ev.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn polar_examples() {
        let z = z_matrix(2);
        let p = polar_quaternionic(&z, DEFAULT_TOL).unwrap();
        assert!((&p.u - &z).norm() < 1e-12);
        assert!((&p.p - CMatrix::identity(4, 4)).norm() < 1e-12);
        let two_j = z_matrix(1) * c(2.0, 0.0);
        let p = polar_quaternionic(&two_j, DEFAULT_TOL).unwrap();
        assert!((&p.p - CMatrix::identity(2, 2) * c(2.0, 0.0)).norm() < 1e-12);
        assert!((&p.u - z_matrix(1)).norm() < 1e-12);
    }

    #[test]
    fn svd_examples() {
        let r = svd_quaternionic(&CMatrix::zeros(4, 4), DEFAULT_TOL, 0).unwrap();
        assert!(r.d.norm() == 0.0);
        let three = CMatrix::identity(2, 2) * c(3.0, 0.0);
        let r = svd_quaternionic(&three, DEFAULT_TOL, 0).unwrap();
        assert_eq!(r.singular_values.len(), 1);
        assert!((r.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((&r.d - &three).norm() < 1e-12);
    }

    #[test]
    fn qr_examples() {
        let r = qr_quaternionic(&CMatrix::identity(4, 4), DEFAULT_TOL).unwrap();
        assert_eq!(r.q, CMatrix::identity(4, 4));
        assert_eq!(r.r, CMatrix::identity(4, 4));
        let z = z_matrix(2);
        let r = qr_quaternionic(&z, DEFAULT_TOL).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = r.r[(i, j)].norm();
                if i == j {
                    assert!((e - 1.0).abs() < 1e-10);
                } else {
                    assert!(e < 1e-10);
                }
            }
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&QuatMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        let q = QuatMatrix::scalar(1, Quaternion::new(1.0, 1.0, 1.0, 1.0));
        assert!((operator_norm(&q).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cluster_sizes_groups_neighbours() {
        assert_eq!(cluster_sizes(&[1.0, 1.0, 2.0, 2.0 + 1e-12, 3.0], 1e-8), vec![2, 2, 1]);
        assert!(cluster_sizes(&[], 1e-8).is_empty());
    }
}
