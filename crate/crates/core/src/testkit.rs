//! Seeded random generators for every structure class.
//!
//! All generators draw from `ChaCha8Rng` seeded explicitly, so identical
//! inputs give bit-identical output. Quaternionic classes are built in
//! quaternion arithmetic and mapped through `chi`, which makes the structure
//! exact rather than approximate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::embedding::{chi, chi_inv, dual, z_matrix, CMatrix, CVector, ZERO};
use crate::kernels::svd_complex;
use crate::quaternion::{QuatMatrix, QuatVector, Quaternion};
use crate::symplectic::{complete_symplectic, kramers_rank2_isometry};

pub use crate::certificate::residual_report;

/// Structure classes understood by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureClass {
    Quaternionic,
    HermitianQuaternionic,
    NormalQuaternionic,
    SelfDual,
    Symmetric,
    SymplecticUnitary,
    /// `k` real polynomials in one quaternionic matrix.
    CommutingFamily(usize),
    /// `k` real polynomials in one self-dual matrix.
    SelfDualCommutingFamily(usize),
}

impl StructureClass {
    pub fn name(&self) -> String {
        match self {
            StructureClass::Quaternionic => "quaternionic".into(),
            StructureClass::HermitianQuaternionic => "hermitian-quaternionic".into(),
            StructureClass::NormalQuaternionic => "normal-quaternionic".into(),
            StructureClass::SelfDual => "selfdual".into(),
            StructureClass::Symmetric => "symmetric".into(),
            StructureClass::SymplecticUnitary => "symplectic-unitary".into(),
            StructureClass::CommutingFamily(k) => format!("commuting-family({k})"),
            StructureClass::SelfDualCommutingFamily(k) => format!("selfdual-commuting-family({k})"),
        }
    }

    /// Parses the names produced by [`StructureClass::name`]; the family
    /// size defaults to 2 when omitted.
    pub fn parse(s: &str) -> Option<Self> {
        let family = |rest: &str| -> Option<usize> {
            if rest.is_empty() {
                return Some(2);
            }
            rest.strip_prefix('(')?.strip_suffix(')')?.parse().ok()
        };
        Some(match s {
            "quaternionic" => StructureClass::Quaternionic,
            "hermitian-quaternionic" => StructureClass::HermitianQuaternionic,
            "normal-quaternionic" => StructureClass::NormalQuaternionic,
            "selfdual" => StructureClass::SelfDual,
            "symmetric" => StructureClass::Symmetric,
            "symplectic-unitary" => StructureClass::SymplecticUnitary,
            _ => {
                if let Some(rest) = s.strip_prefix("selfdual-commuting-family") {
                    StructureClass::SelfDualCommutingFamily(family(rest)?)
                } else {
                    let rest = s.strip_prefix("commuting-family")?;
                    StructureClass::CommutingFamily(family(rest)?)
                }
            }
        })
    }
}

/// Size `n` is the quaternion dimension; matrices are `2n x 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub class: StructureClass,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Matrix(CMatrix),
    Family(Vec<CMatrix>),
}

impl Generated {
    pub fn into_matrices(self) -> Vec<CMatrix> {
        match self {
            Generated::Matrix(m) => vec![m],
            Generated::Family(f) => f,
        }
    }

    /// The single matrix, or the first member of a family.
    pub fn first(&self) -> &CMatrix {
        match self {
            Generated::Matrix(m) => m,
            Generated::Family(f) => &f[0],
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_complex(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(rng), normal(rng)))
}

pub fn random_quaternion(rng: &mut impl Rng) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

pub fn random_quat_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> QuatMatrix {
    QuatMatrix::from_fn(rows, cols, |_, _| random_quaternion(rng))
}

pub fn random_quat_vector(n: usize, rng: &mut impl Rng) -> QuatVector {
    (0..n).map(|_| random_quaternion(rng)).collect()
}

pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> CVector {
    let v = CVector::from_fn(dim, |_, _| Complex64::new(normal(rng), normal(rng)));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Haar-like unitary from the left singular vectors of a Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_complex(dim, dim, rng);
    svd_complex(&g).map(|s| s.u).unwrap_or_else(|_| CMatrix::identity(dim, dim))
}

/// Product of three symplectic completions of random unit vectors and a
/// diagonal of random unit quaternions.
pub fn random_symplectic_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let phases = QuatMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let q = random_quaternion(rng);
            q.scale(1.0 / q.norm())
        } else {
            Quaternion::ZERO
        }
    });
    let mut u = chi(&phases);
    for _ in 0..3 {
        let v = random_unit_vector(2 * n, rng);
        u = complete_symplectic(&v).expect("unit vector of even length") * u;
    }
    u
}

/// Quaternion matrix whose image is [`random_symplectic_unitary`].
pub fn random_quat_unitary(n: usize, rng: &mut impl Rng) -> QuatMatrix {
    chi_inv(&random_symplectic_unitary(n, rng), 1e-8).expect("symplectic unitaries are quaternionic")
}

fn polynomial_family(x: &CMatrix, k: usize, rng: &mut impl Rng) -> Vec<CMatrix> {
    let d = x.nrows();
    let x = x * Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let x2 = &x * &x;
    (0..k)
        .map(|_| {
            let (a0, a1, a2) = (normal(rng), normal(rng), normal(rng));
            CMatrix::identity(d, d) * Complex64::new(a0, 0.0)
                + &x * Complex64::new(a1, 0.0)
                + &x2 * Complex64::new(a2, 0.0)
        })
        .collect()
}

fn quaternionic(n: usize, rng: &mut impl Rng) -> CMatrix {
    chi(&random_quat_matrix(n, n, rng))
}

fn selfdual(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_complex(2 * n, 2 * n, rng);
    (&g + dual(&g).expect("even dimension")) * Complex64::new(0.5, 0.0)
}

pub fn generate(spec: &GenSpec) -> Generated {
    let n = spec.n.max(1);
    let mut rng = rng(spec.seed);
    let rng = &mut rng;
    match spec.class {
        StructureClass::Quaternionic => Generated::Matrix(quaternionic(n, rng)),
        StructureClass::HermitianQuaternionic => {
            let q = random_quat_matrix(n, n, rng);
            let h = QuatMatrix::from_fn(n, n, |i, j| (q[(i, j)] + q[(j, i)].conj()).scale(0.5));
            Generated::Matrix(chi(&h))
        }
        StructureClass::NormalQuaternionic => {
            let u = random_quat_unitary(n, rng);
            let d = QuatMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Quaternion::new(normal(rng), normal(rng), 0.0, 0.0)
                } else {
                    Quaternion::ZERO
                }
            });
            let x = u.mul(&d).and_then(|ud| ud.mul(&u.adjoint())).expect("square factors");
            Generated::Matrix(chi(&x))
        }
        StructureClass::SelfDual => Generated::Matrix(selfdual(n, rng)),
        StructureClass::Symmetric => {
            let g = gaussian_complex(2 * n, 2 * n, rng);
            Generated::Matrix((&g + g.transpose()) * Complex64::new(0.5, 0.0))
        }
        StructureClass::SymplecticUnitary => Generated::Matrix(random_symplectic_unitary(n, rng)),
        StructureClass::CommutingFamily(k) => {
            let x = quaternionic(n, rng);
            Generated::Family(polynomial_family(&x, k.max(1), rng))
        }
        StructureClass::SelfDualCommutingFamily(k) => {
            let x = selfdual(n, rng);
            Generated::Family(polynomial_family(&x, k.max(1), rng))
        }
    }
}

/// Quaternionic matrix of quaternion rank at most `r` (complex rank `2r`).
pub fn rank_deficient_quaternionic(n: usize, r: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed);
    let a = random_quat_matrix(n, r, &mut rng);
    let b = random_quat_matrix(r, n, &mut rng);
    chi(&a.mul(&b).expect("inner dimensions agree"))
}

/// Self-dual `2n x 2n` matrix of rank at most `2r`, built as `B C B#` with
/// `C` self-dual and `B# = -Z_r B^T Z_n` the rectangular dual.
pub fn singular_selfdual(n: usize, r: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed);
    let b = gaussian_complex(2 * n, 2 * r, &mut rng);
    let c = selfdual(r, &mut rng);
    let b_dual = -(z_matrix(r) * b.transpose() * z_matrix(n));
    let x = &b * c * b_dual;
    (&x + dual(&x).expect("even dimension")) * Complex64::new(0.5, 0.0)
}

/// Complex symmetric `dim x dim` matrix of rank at most `r`.
pub fn singular_symmetric(dim: usize, r: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed);
    let b = gaussian_complex(dim, r, &mut rng);
    let g = gaussian_complex(r, r, &mut rng);
    let c = (&g + g.transpose()) * Complex64::new(0.5, 0.0);
    let x = &b * c * b.transpose();
    (&x + x.transpose()) * Complex64::new(0.5, 0.0)
}

/// `U_1 P U_2` with symplectic unitaries `U_i` and `P` the projection onto
/// the first `r` indices of each block; complex rank `2r`.
pub fn quaternionic_partial_isometry(n: usize, r: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed);
    let u1 = random_symplectic_unitary(n, &mut rng);
    let u2 = random_symplectic_unitary(n, &mut rng);
    let p = CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i == j && i % n < r {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    u1 * p * u2
}

/// `U P U^T` with `U` unitary and `P` a rank-`r` coordinate projection.
pub fn symmetric_partial_isometry(dim: usize, r: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed);
    let u = random_unitary(dim, &mut rng);
    let p = CMatrix::from_fn(dim, dim, |i, j| if i == j && i < r { Complex64::new(1.0, 0.0) } else { ZERO });
    &u * p * u.transpose()
}

/// Sum of `pairs` rank-two self-dual partial isometries over orthonormal
/// vectors; complex rank `2 * pairs`.
pub fn selfdual_partial_isometry(n: usize, pairs: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed);
    let u = random_unitary(2 * n, &mut rng);
    let mut w = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..pairs.min(n) {
        let v: CVector = u.column(2 * k).into_owned();
        let x: CVector = u.column(2 * k + 1).into_owned();
        w += kramers_rank2_isometry(&v, &x).expect("orthonormal columns");
    }
    w
}

/// A quaternionic matrix with known Jordan structure.
#[derive(Debug, Clone)]
pub struct PlantedJordan {
    pub x: CMatrix,
    /// Quaternion-level blocks `(lambda, size)` with `Im lambda >= 0`. Each
    /// contributes blocks at `lambda` and `conj(lambda)` to `chi(X)`.
    pub quaternion_blocks: Vec<(Complex64, usize)>,
    /// Condition number of the planted similarity.
    pub condition: f64,
}

impl PlantedJordan {
    /// Sorted block sizes of `chi(X)`.
    pub fn complex_block_sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.quaternion_blocks.iter().flat_map(|&(_, s)| [s, s]).collect();
        v.sort_unstable();
        v
    }

    /// `(eigenvalue, size)` for every block of `chi(X)`.
    pub fn complex_blocks(&self) -> Vec<(Complex64, usize)> {
        self.quaternion_blocks.iter().flat_map(|&(l, s)| [(l, s), (l.conj(), s)]).collect()
    }
}

/// Minimum distance between distinct planted eigenvalues, conjugates
/// included.
pub const PLANTED_SEPARATION: f64 = 1e-3;

/// Upper bound on the condition number of the planted similarity.
pub const PLANTED_MAX_CONDITION: f64 = 100.0;

/// Random Jordan structure with blocks of size at most 4, quaternion
/// dimension at most 6 and similarity condition number at most
/// [`PLANTED_MAX_CONDITION`].
pub fn planted_jordan(seed: u64) -> PlantedJordan {
    let mut rng = rng(seed);
    let n_total = rng.random_range(1..=6usize);
    let mut sizes = Vec::new();
    let mut left = n_total;
    while left > 0 {
        let s = rng.random_range(1..=left.min(4));
        sizes.push(s);
        left -= s;
    }
    let mut values: Vec<Complex64> = Vec::new();
    let mut blocks = Vec::new();
    for s in sizes {
        let reuse = !values.is_empty() && rng.random::<f64>() < 0.3;
        let lambda = if reuse {
            values[rng.random_range(0..values.len())]
        } else {
            loop {
                let re = rng.random_range(-2.0..2.0);
                let cand = if rng.random::<bool>() {
                    Complex64::new(re, 0.0)
                } else {
                    Complex64::new(re, rng.random_range(0.1..1.5))
                };
                let far = values
                    .iter()
                    .all(|v| (v - cand).norm() >= PLANTED_SEPARATION && (v.conj() - cand).norm() >= PLANTED_SEPARATION);
                if far {
                    break cand;
                }
            }
        };
        if !values.contains(&lambda) {
            values.push(lambda);
        }
        blocks.push((lambda, s));
    }
    planted_jordan_with(&blocks, &mut rng)
}

/// Plants the given quaternion-level blocks `(lambda, size)` behind a random
/// quaternionic similarity `U_1 diag(s) U_2` with `s` log-uniform in
/// `[1, PLANTED_MAX_CONDITION]`.
pub fn planted_jordan_with(blocks: &[(Complex64, usize)], rng: &mut impl Rng) -> PlantedJordan {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut jq = QuatMatrix::zeros(n, n);
    let mut at = 0;
    for &(lambda, s) in blocks {
        for k in 0..s {
            jq[(at + k, at + k)] = Quaternion::from_complex(lambda);
            if k + 1 < s {
                jq[(at + k, at + k + 1)] = Quaternion::ONE;
            }
        }
        at += s;
    }
    let u1 = random_quat_unitary(n, rng);
    let u2 = random_quat_unitary(n, rng);
    let scales: Vec<f64> = (0..n).map(|_| PLANTED_MAX_CONDITION.powf(rng.random::<f64>())).collect();
    let diag = |f: &dyn Fn(f64) -> f64| {
        QuatMatrix::from_fn(n, n, |i, j| if i == j { Quaternion::real(f(scales[i])) } else { Quaternion::ZERO })
    };
    let s0 = u1.mul(&diag(&|s| s)).and_then(|m| m.mul(&u2)).expect("square");
    let s0_inv = u2
        .adjoint()
        .mul(&diag(&|s| 1.0 / s))
        .and_then(|m| m.mul(&u1.adjoint()))
        .expect("square");
    let x = s0.mul(&jq).and_then(|m| m.mul(&s0_inv)).expect("square");
    let smax = scales.iter().copied().fold(0.0, f64::max);
    let smin = scales.iter().copied().fold(f64::INFINITY, f64::min);
    PlantedJordan {
        x: chi(&x),
        quaternion_blocks: blocks.to_vec(),
        condition: smax / smin,
    }
}

/// Random unit probe vectors of length `dim`.
pub fn probe_vectors(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<CVector> {
    (0..count).map(|_| random_unit_vector(dim, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::classify;

    fn passes(x: &CMatrix, class: StructureClass) -> bool {
        let r = classify(x, 1e-12);
        match class {
            StructureClass::Quaternionic | StructureClass::CommutingFamily(_) => r.quaternionic,
            StructureClass::HermitianQuaternionic => r.quaternionic && r.hermitian,
            StructureClass::NormalQuaternionic => r.quaternionic && r.normal,
            StructureClass::SelfDual | StructureClass::SelfDualCommutingFamily(_) => r.selfdual,
            StructureClass::Symmetric => r.symmetric,
            StructureClass::SymplecticUnitary => r.symplectic && r.unitary && r.quaternionic,
        }
    }

    const CLASSES: [StructureClass; 8] = [
        StructureClass::Quaternionic,
        StructureClass::HermitianQuaternionic,
        StructureClass::NormalQuaternionic,
        StructureClass::SelfDual,
        StructureClass::Symmetric,
        StructureClass::SymplecticUnitary,
        StructureClass::CommutingFamily(3),
        StructureClass::SelfDualCommutingFamily(2),
    ];

    #[test]
    fn every_class_is_sound() {
        for class in CLASSES {
            for n in [1, 2, 4] {
                for seed in 0..5 {
                    let g = generate(&GenSpec { n, class, seed });
                    for x in g.into_matrices() {
                        assert_eq!(x.nrows(), 2 * n);
                        assert!(passes(&x, class), "{} n={n} seed={seed}", class.name());
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        for class in CLASSES {
            let spec = GenSpec { n: 3, class, seed: 11 };
            assert_eq!(generate(&spec), generate(&spec));
        }
        assert_ne!(
            generate(&GenSpec { n: 3, class: StructureClass::Quaternionic, seed: 1 }),
            generate(&GenSpec { n: 3, class: StructureClass::Quaternionic, seed: 2 })
        );
    }

    #[test]
    fn quaternionic_n1_is_exact() {
        let x = generate(&GenSpec { n: 1, class: StructureClass::Quaternionic, seed: 5 }).into_matrices().remove(0);
        assert_eq!(x.adjoint(), dual(&x).unwrap());
    }

    #[test]
    fn selfdual_is_exact() {
        let x = generate(&GenSpec { n: 4, class: StructureClass::SelfDual, seed: 5 }).into_matrices().remove(0);
        assert_eq!(x, dual(&x).unwrap());
    }

    #[test]
    fn families_commute() {
        let f = generate(&GenSpec { n: 4, class: StructureClass::CommutingFamily(3), seed: 9 }).into_matrices();
        for a in &f {
            for b in &f {
                assert!((a * b - b * a).norm() <= 1e-12 * a.norm() * b.norm());
            }
        }
    }

    #[test]
    fn class_names_round_trip() {
        for class in CLASSES {
            assert_eq!(StructureClass::parse(&class.name()), Some(class));
        }
        assert_eq!(StructureClass::parse("commuting-family"), Some(StructureClass::CommutingFamily(2)));
        assert_eq!(StructureClass::parse("bogus"), None);
    }

    #[test]
    fn singular_generators_have_expected_rank() {
        let rank = |x: &CMatrix| svd_complex(x).unwrap().rank(1e-10);
        assert_eq!(rank(&rank_deficient_quaternionic(4, 2, 1)), 4);
        assert_eq!(rank(&singular_selfdual(4, 1, 1)), 2);
        assert_eq!(rank(&singular_symmetric(5, 2, 1)), 2);
        assert!(classify(&singular_selfdual(3, 1, 2), 1e-12).selfdual);
        assert!(classify(&singular_symmetric(3, 2, 2), 1e-12).symmetric);
    }

    #[test]
    fn partial_isometries() {
        let pi = |w: &CMatrix| {
            let p = w.adjoint() * w;
            (&p * &p - &p).norm()
        };
        let q = quaternionic_partial_isometry(3, 1, 4);
        assert!(pi(&q) < 1e-12 && classify(&q, 1e-12).quaternionic);
        let s = symmetric_partial_isometry(3, 2, 4);
        assert!(pi(&s) < 1e-12 && classify(&s, 1e-12).symmetric);
        let d = selfdual_partial_isometry(3, 2, 4);
        assert!(pi(&d) < 1e-12 && classify(&d, 1e-12).selfdual);
    }

    #[test]
    fn planted_jordan_is_quaternionic() {
        for seed in 0..10 {
            let p = planted_jordan(seed);
            assert!(classify(&p.x, 1e-12).quaternionic);
            assert!(p.condition <= PLANTED_MAX_CONDITION * (1.0 + 1e-9));
            assert_eq!(p.complex_block_sizes().iter().sum::<usize>(), p.x.nrows());
        }
    }
}
