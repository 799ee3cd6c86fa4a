//! Kramers-pair bases, symplectic completion and structured extensions of
//! partial isometries to unitaries.

use num_complex::Complex64;

use crate::embedding::{
    apply_t, ensure_even_square, half_dim, require_quaternionic, require_selfdual, require_symmetric, CMatrix,
    CVector,
};
use crate::error::{Error, Result};
use crate::kernels::{nullspace, project_out, unit};

/// Tolerance on `|v| - 1` for vectors that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Tolerance on `|<v, w>|` for vectors that must be orthogonal.
pub const ORTHO_TOL: f64 = 1e-12;

/// Relative tolerance on `|(W*W)^2 - W*W|_F`, measured against
/// `max(1, |W|_F^2)`.
pub const PARTIAL_ISOMETRY_TOL: f64 = 1e-8;

/// Singular values of a partial isometry sit near 0 or 1; anything below this
/// fraction of the largest one is counted as kernel.
const ISOMETRY_RANK_CUT: f64 = 0.5;

/// An orthonormal basis made of pairs `(v_k, T v_k)`.
#[derive(Debug, Clone)]
pub struct KramersBasis {
    pub pairs: Vec<(CVector, CVector)>,
}

impl KramersBasis {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Columns `[v_1 .. v_m, T v_1 .. T v_m]`.
    pub fn to_matrix(&self, dim: usize) -> CMatrix {
        let m = self.pairs.len();
        let mut out = CMatrix::zeros(dim, 2 * m);
        for (k, (v, tv)) in self.pairs.iter().enumerate() {
            out.set_column(k, v);
            out.set_column(m + k, tv);
        }
        out
    }

    pub fn firsts(&self) -> impl Iterator<Item = &CVector> {
        self.pairs.iter().map(|p| &p.0)
    }

    pub fn seconds(&self) -> impl Iterator<Item = &CVector> {
        self.pairs.iter().map(|p| &p.1)
    }
}

/// Greedy Gram-Schmidt over candidate vectors.
///
/// At each step the candidate with the largest residual after projecting out
/// everything chosen so far is normalized and appended. When `kramers` is set
/// its `T`-partner is appended too, which keeps the chosen set closed under
/// `T` exactly (up to sign) by construction.
fn greedy_basis(
    dim: usize,
    mut chosen: Vec<CVector>,
    candidates: &[CVector],
    target: usize,
    kramers: bool,
) -> Result<Vec<CVector>> {
    while chosen.len() < target {
        let mut best: Option<(f64, CVector)> = None;
        for c in candidates {
            let r = project_out(c, &chosen);
            let nr = r.norm();
            if best.as_ref().is_none_or(|(b, _)| nr > *b * (1.0 + 1e-12)) {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.ok_or_else(|| Error::DimensionMismatch("no candidates for basis".into()))?;
        if nr <= 1e-8 {
            return Err(Error::IllConditioned(format!(
                "basis construction stalled at {} of {} vectors in dimension {}",
                chosen.len(),
                target,
                dim
            )));
        }
        let v = &r / Complex64::new(nr, 0.0);
        if kramers {
            let tv = apply_t(&v)?;
            chosen.push(v);
            chosen.push(tv);
        } else {
            chosen.push(v);
        }
    }
    Ok(chosen)
}

/// Projections of the coordinate vectors onto the span of `basis`
/// (orthonormal columns). Using these as candidates makes the resulting basis
/// independent of which orthonormal basis of the subspace was supplied.
fn projected_coordinates(basis: &CMatrix) -> Vec<CVector> {
    let dim = basis.nrows();
    (0..dim)
        .map(|k| basis * basis.row(k).adjoint())
        .filter(|c: &CVector| c.norm() > 1e-12)
        .collect()
}

/// Kramers basis of a `T`-invariant subspace given by orthonormal columns.
///
/// `seed_pairs` are taken first (each already a unit `v` with its partner
/// `T v` implied). Fails when the subspace has odd dimension.
pub fn kramers_basis_of_subspace(subspace: &CMatrix, seed: &[CVector]) -> Result<KramersBasis> {
    let dim = subspace.nrows();
    half_dim(dim)?;
    let sdim = subspace.ncols();
    if !sdim.is_multiple_of(2) {
        return Err(Error::OddKernel { dim: sdim });
    }
    let mut chosen = Vec::with_capacity(sdim);
    for v in seed {
        chosen.push(v.clone());
        chosen.push(apply_t(v)?);
    }
    let candidates = projected_coordinates(subspace);
    let all = greedy_basis(dim, chosen, &candidates, sdim, true)?;
    let pairs = all.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
    Ok(KramersBasis { pairs })
}

/// Symplectic unitary `U` with `U e_1 = v` and `U e_{N+1} = T v`.
pub fn complete_symplectic(v: &CVector) -> Result<CMatrix> {
    let n = half_dim(v.len())?;
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    let v1 = v / Complex64::new(norm, 0.0);
    let coords: Vec<CVector> = (0..2 * n).map(|k| unit(2 * n, k)).collect();
    let chosen = vec![v1.clone(), apply_t(&v1)?];
    let all = greedy_basis(2 * n, chosen, &coords, 2 * n, true)?;
    let basis = KramersBasis {
        pairs: all.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect(),
    };
    Ok(basis.to_matrix(2 * n))
}

/// `|(W*W)^2 - W*W|_F`.
pub fn partial_isometry_defect(w: &CMatrix) -> f64 {
    let p = w.adjoint() * w;
    (&p * &p - &p).norm()
}

fn require_partial_isometry(w: &CMatrix) -> Result<()> {
    let deviation = partial_isometry_defect(w);
    let threshold = PARTIAL_ISOMETRY_TOL * w.norm_squared().max(1.0);
    if deviation > threshold {
        return Err(Error::NotPartialIsometry {
            deviation,
            threshold,
        });
    }
    Ok(())
}

/// Orthonormal basis of the kernel of a partial isometry.
pub(crate) fn isometry_kernel(w: &CMatrix) -> Result<CMatrix> {
    nullspace(w, ISOMETRY_RANK_CUT)
}

/// Extends a quaternionic partial isometry to a symplectic unitary that
/// agrees with it on `(ker W)^perp`.
///
/// `ker W` and `ker W*` are both `T`-invariant; Kramers bases
/// `{v_j, T v_j}` and `{w_j, T w_j}` of them are matched pairwise.
pub fn extend_quaternionic_isometry(w: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = require_quaternionic(w, tol)?;
    require_partial_isometry(w)?;
    let dom = kramers_basis_of_subspace(&isometry_kernel(w)?, &[])?;
    let cod = kramers_basis_of_subspace(&isometry_kernel(&w.adjoint())?, &[])?;
    if dom.len() != cod.len() {
        return Err(Error::IllConditioned(format!(
            "kernel dimensions {} and {} of W and W* differ",
            2 * dom.len(),
            2 * cod.len()
        )));
    }
    let mut u = w.clone();
    for ((v, tv), (x, tx)) in dom.pairs.iter().zip(&cod.pairs) {
        u += x * v.adjoint() + tx * tv.adjoint();
    }
    debug_assert_eq!(u.nrows(), 2 * n);
    Ok(u)
}

/// Extends a symmetric partial isometry to a symmetric unitary by sending an
/// orthonormal basis `v_j` of `ker W` to `conj(v_j)`.
pub fn extend_symmetric_isometry(w: &CMatrix, tol: f64) -> Result<CMatrix> {
    let dim = require_symmetric(w, tol)?;
    require_partial_isometry(w)?;
    let kernel = isometry_kernel(w)?;
    let basis = greedy_basis(dim, vec![], &projected_coordinates(&kernel), kernel.ncols(), false)?;
    let mut u = w.clone();
    for v in &basis {
        u += v.conjugate() * v.adjoint();
    }
    Ok(u)
}

/// The self-dual rank-two partial isometry sending `v -> T w` and
/// `w -> -T v`, zero on the orthogonal complement of `span{v, w}`.
pub fn kramers_rank2_isometry(v: &CVector, w: &CVector) -> Result<CMatrix> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            v.len(),
            w.len()
        )));
    }
    for x in [v, w] {
        let norm = x.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
    }
    let overlap = v.dotc(w).norm();
    if overlap > ORTHO_TOL {
        return Err(Error::NotOrthogonal { overlap });
    }
    let tv = apply_t(v)?;
    let tw = apply_t(w)?;
    Ok(tw * v.adjoint() - tv * w.adjoint())
}

/// Extends a self-dual partial isometry to a self-dual unitary `W + V`, with
/// `V` a sum of [`kramers_rank2_isometry`] pieces over consecutive pairs of an
/// orthonormal basis of `ker W`.
pub fn extend_selfdual_isometry(w: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = require_selfdual(w, tol)?;
    require_partial_isometry(w)?;
    let kernel = isometry_kernel(w)?;
    if kernel.ncols() % 2 != 0 {
        return Err(Error::OddKernel { dim: kernel.ncols() });
    }
    let basis = greedy_basis(2 * n, vec![], &projected_coordinates(&kernel), kernel.ncols(), false)?;
    let mut u = w.clone();
    for pair in basis.chunks(2) {
        u += kramers_rank2_isometry(&pair[0], &pair[1])?;
    }
    Ok(u)
}

/// Symplectic unitary check used by callers that must reject other input.
pub fn require_symplectic_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    ensure_even_square(u)?;
    let r = crate::embedding::classify(u, tol);
    if !(r.symplectic && r.unitary) {
        return Err(Error::NotSymplectic {
            deviation: r.deviations.symplectic.max(r.deviations.unitary),
            threshold: r.threshold(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{classify, dual, z_matrix, DEFAULT_TOL, ONE, ZERO};

    fn cv(entries: &[Complex64]) -> CVector {
        CVector::from_column_slice(entries)
    }

    #[test]
    fn completion_of_e1_is_identity() {
        let u = complete_symplectic(&unit(4, 0)).unwrap();
        assert_eq!(u, CMatrix::identity(4, 4));
    }

    #[test]
    fn completion_of_e2_in_dimension_two() {
        let u = complete_symplectic(&unit(2, 1)).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        assert_eq!(u, expect);
        assert!(classify(&u, 1e-12).symplectic);
    }

    #[test]
    fn completion_rejects_non_unit() {
        let v = cv(&[Complex64::new(2.0, 0.0), ZERO]);
        assert!(matches!(complete_symplectic(&v), Err(Error::NotUnit { .. })));
        assert!(matches!(complete_symplectic(&cv(&[ONE, ZERO, ZERO])), Err(Error::OddDimension(3))));
    }

    #[test]
    fn quaternionic_extension_trivial_cases() {
        let z = z_matrix(2);
        assert_eq!(extend_quaternionic_isometry(&z, DEFAULT_TOL).unwrap(), z);
        let u = extend_quaternionic_isometry(&CMatrix::zeros(2, 2), DEFAULT_TOL).unwrap();
        assert!(classify(&u, 1e-12).symplectic && classify(&u, 1e-12).unitary);
        assert_eq!(u, CMatrix::identity(2, 2));
    }

    #[test]
    fn quaternionic_extension_rejects_bad_input() {
        let mut d = CMatrix::identity(2, 2);
        d[(1, 1)] = Complex64::new(2.0, 0.0);
        assert!(matches!(
            extend_quaternionic_isometry(&d, DEFAULT_TOL),
            Err(Error::NotQuaternionic { .. })
        ));
        let twice = CMatrix::identity(2, 2) * Complex64::new(2.0, 0.0);
        assert!(matches!(
            extend_quaternionic_isometry(&twice, DEFAULT_TOL),
            Err(Error::NotPartialIsometry { .. })
        ));
    }

    #[test]
    fn symmetric_extension_trivial_cases() {
        let u = extend_symmetric_isometry(&CMatrix::zeros(1, 1), DEFAULT_TOL).unwrap();
        assert_eq!(u, CMatrix::identity(1, 1));
        let s = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert_eq!(extend_symmetric_isometry(&s, DEFAULT_TOL).unwrap(), s);
        let mut asym = CMatrix::zeros(2, 2);
        asym[(0, 1)] = ONE;
        assert!(matches!(
            extend_symmetric_isometry(&asym, DEFAULT_TOL),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn rank2_isometry_in_dimension_two() {
        let v = kramers_rank2_isometry(&unit(2, 0), &unit(2, 1)).unwrap();
        assert_eq!(v, -CMatrix::identity(2, 2));
        assert_eq!(dual(&v).unwrap(), v);
    }

    #[test]
    fn rank2_isometry_is_antisymmetric_in_its_arguments() {
        let a = unit(4, 1);
        let b = unit(4, 2);
        let vab = kramers_rank2_isometry(&a, &b).unwrap();
        let vba = kramers_rank2_isometry(&b, &a).unwrap();
        assert!((vab + vba).norm() < 1e-15);
    }

    #[test]
    fn rank2_isometry_requires_orthogonality() {
        let a = unit(2, 0);
        assert!(matches!(kramers_rank2_isometry(&a, &a), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn selfdual_extension_trivial_cases() {
        let u = extend_selfdual_isometry(&CMatrix::zeros(2, 2), DEFAULT_TOL).unwrap();
        assert_eq!(u, -CMatrix::identity(2, 2));
        let id = CMatrix::identity(4, 4);
        assert_eq!(extend_selfdual_isometry(&id, DEFAULT_TOL).unwrap(), id);
    }
}
