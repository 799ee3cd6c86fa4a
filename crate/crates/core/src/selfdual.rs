//! Self-dual matrices (`X# = X`): joint Schur form and structured polar
//! decompositions, plus the polar decomposition of complex symmetric matrices.

use crate::blocks::{assemble, below_norm, split, upper};
use crate::certificate::{Certified, Check};
use crate::embedding::{
    classify, dual, ensure_even_square, require_selfdual, require_symmetric, tol_scale, CMatrix,
};
use crate::error::{Error, Result};
use crate::kernels::{check_commuting, svd_complex, COMMUTATOR_TOL};
use crate::quaternionic::{deflate_commuting, minimal_polar, PolarResult, PolarVariant, RECONSTRUCTION_TOL};
use crate::symplectic::{extend_selfdual_isometry, extend_symmetric_isometry};

/// Tolerance on the lower-left block and on `|C + C^T|_F`.
pub const SELFDUAL_BLOCK_TOL: f64 = 1e-11;
/// Absolute tolerance on `|U^T Z U - Z|_F` and `|U*U - I|_F`.
pub const SYMPLECTIC_TOL: f64 = 1e-11;

/// `U* X U = [[T, C], [0, T^T]]` for one member of the family.
#[derive(Debug, Clone)]
pub struct SelfDualBlocks {
    pub t: CMatrix,
    pub c: CMatrix,
    pub residual: f64,
    /// `|L|_F` for the computed lower-left block `L`.
    pub lower_left: f64,
    /// `|C + C^T|_F`.
    pub skew_defect: f64,
    pub t_defect: f64,
}

#[derive(Debug, Clone)]
pub struct SelfDualSchurResult {
    pub u: CMatrix,
    pub blocks: Vec<SelfDualBlocks>,
    pub inputs: Vec<CMatrix>,
}

fn selfdual_form(t: &CMatrix, c: &CMatrix) -> CMatrix {
    let n = t.nrows();
    assemble(t, c, &CMatrix::zeros(n, n), &t.transpose())
}

fn selfdual_blocks(x: &CMatrix, u: &CMatrix, n: usize) -> SelfDualBlocks {
    let m = u.adjoint() * x * u;
    let (a, c, l, _) = split(&m, n);
    let t = upper(&a, false);
    let residual = (&m - selfdual_form(&t, &c)).norm() / tol_scale(x);
    SelfDualBlocks {
        lower_left: l.norm(),
        skew_defect: (&c + c.transpose()).norm(),
        t_defect: below_norm(&a, false),
        t,
        c,
        residual,
    }
}

/// Single symplectic unitary bringing every member of a commuting self-dual
/// family to the form `[[T_j, C_j], [0, T_j^T]]` with `T_j` upper triangular
/// and `C_j` skew-symmetric.
pub fn schur_selfdual_commuting(xs: &[CMatrix], tol: f64, seed: u64) -> Result<SelfDualSchurResult> {
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
        require_selfdual(x, tol)?;
    }
    check_commuting(xs, COMMUTATOR_TOL)?;
    let u = deflate_commuting(xs, seed)?;
    let blocks = xs.iter().map(|x| selfdual_blocks(x, &u, n)).collect();
    Ok(SelfDualSchurResult {
        u,
        blocks,
        inputs: xs.to_vec(),
    })
}

impl Certified for SelfDualSchurResult {
    fn kind(&self) -> &'static str {
        "selfdual-schur"
    }

    fn checks(&self) -> Vec<Check> {
        let r = classify(&self.u, 0.0);
        let mut out = vec![
            Check::new("U.unitary", r.deviations.unitary, SYMPLECTIC_TOL),
            Check::new("U.symplectic", r.deviations.symplectic, SYMPLECTIC_TOL),
        ];
        let n = self.u.nrows() / 2;
        for (j, x) in self.inputs.iter().enumerate() {
            let b = &self.blocks[j];
            let fresh = selfdual_blocks(x, &self.u, n);
            let stored = (selfdual_form(&b.t, &b.c) - self.u.adjoint() * x * &self.u).norm() / tol_scale(x);
            out.push(Check::new(format!("X{j}.reconstruction"), stored.max(fresh.residual), RECONSTRUCTION_TOL));
            out.push(Check::new(format!("X{j}.lower_left"), fresh.lower_left, SELFDUAL_BLOCK_TOL));
            out.push(Check::new(format!("C{j}.skew"), (&b.c + b.c.transpose()).norm(), SELFDUAL_BLOCK_TOL));
            out.push(Check::new(
                format!("T{j}.lower"),
                below_norm(&b.t, false).max(fresh.t_defect),
                SELFDUAL_BLOCK_TOL,
            ));
        }
        out
    }
}

/// `|(XX*)^(1/2) - ((X*X)^(1/2))^T|_F / max(1, |X|_F)`, which vanishes for
/// complex symmetric `X`.
pub fn abs_adjoint_defect(x: &CMatrix) -> Result<f64> {
    let s = svd_complex(x)?;
    let abs_of = |q: &CMatrix| {
        let mut qs = q.clone();
        for (j, &sig) in s.sigma.iter().enumerate() {
            qs.column_mut(j).scale_mut(sig);
        }
        qs * q.adjoint()
    };
    Ok((abs_of(&s.u) - abs_of(&s.v).transpose()).norm() / tol_scale(x))
}

/// Polar decomposition `X = U |X|` of a complex symmetric matrix with
/// `U^T = U`. Any dimension is accepted.
pub fn polar_symmetric(x: &CMatrix, tol: f64) -> Result<PolarResult> {
    require_symmetric(x, tol)?;
    let (w, p, _) = minimal_polar(x)?;
    let w = (&w + w.transpose()).scale(0.5);
    let u = extend_symmetric_isometry(&w, tol)?;
    Ok(PolarResult {
        variant: PolarVariant::Symmetric,
        u,
        p,
        w,
        input: x.clone(),
    })
}

/// Polar decomposition `X = U |X|` of a self-dual matrix with `U# = U`.
pub fn polar_selfdual(x: &CMatrix, tol: f64) -> Result<PolarResult> {
    require_selfdual(x, tol)?;
    let (w, p, _) = minimal_polar(x)?;
    let w = (&w + dual(&w)?).scale(0.5);
    let u = extend_selfdual_isometry(&w, tol)?;
    Ok(PolarResult {
        variant: PolarVariant::SelfDual,
        u,
        p,
        w,
        input: x.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{DEFAULT_TOL, ONE};
    use num_complex::Complex64;

    #[test]
    fn schur_of_identity() {
        let r = schur_selfdual_commuting(&[CMatrix::identity(4, 4)], DEFAULT_TOL, 0).unwrap();
        assert!((&r.blocks[0].t - CMatrix::identity(2, 2)).norm() < 1e-14);
        assert!(r.blocks[0].c.norm() < 1e-14);
    }

    #[test]
    fn schur_of_block_diagonal() {
        let a = CMatrix::from_row_slice(2, 2, &[ONE, Complex64::new(2.0, 1.0), Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)]);
        let x = assemble(&a, &CMatrix::zeros(2, 2), &CMatrix::zeros(2, 2), &a.transpose());
        let r = schur_selfdual_commuting(&[x], DEFAULT_TOL, 2).unwrap();
        let b = &r.blocks[0];
        assert!(b.residual < 1e-12);
        assert!(b.lower_left < 1e-12);
        assert!(b.skew_defect < 1e-12);
    }

    #[test]
    fn schur_rejects_non_selfdual() {
        let z = crate::embedding::z_matrix(1) * Complex64::new(0.0, 1.0);
        assert!(matches!(
            schur_selfdual_commuting(&[z], DEFAULT_TOL, 0),
            Err(Error::NotSelfDual { .. })
        ));
    }

    #[test]
    fn polar_symmetric_examples() {
        let r = polar_symmetric(&CMatrix::identity(3, 3), DEFAULT_TOL).unwrap();
        assert!((&r.u - CMatrix::identity(3, 3)).norm() < 1e-12);
        let x = CMatrix::from_diagonal(&crate::embedding::CVector::from_vec(vec![-ONE, ONE]));
        let r = polar_symmetric(&x, DEFAULT_TOL).unwrap();
        assert!((&r.u - &x).norm() < 1e-12);
        assert!((&r.p - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn polar_selfdual_examples() {
        let r = polar_selfdual(&CMatrix::identity(2, 2), DEFAULT_TOL).unwrap();
        assert!((&r.u - CMatrix::identity(2, 2)).norm() < 1e-12);
        let r = polar_selfdual(&CMatrix::zeros(2, 2), DEFAULT_TOL).unwrap();
        assert!((&r.u + CMatrix::identity(2, 2)).norm() < 1e-12);
        assert!(r.p.norm() == 0.0);
    }

    #[test]
    fn abs_adjoint_vanishes_for_symmetric() {
        let x = CMatrix::from_row_slice(2, 2, &[ONE, Complex64::new(0.0, 2.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.5)]);
        assert!(abs_adjoint_defect(&x).unwrap() < 1e-13);
    }
}
