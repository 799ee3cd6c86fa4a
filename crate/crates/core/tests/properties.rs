use num_complex::Complex64;
use proptest::prelude::*;

use quatfact::embedding::{apply_t, chi, dual, pull_back, push_forward, tol_scale, CMatrix, CVector};
use quatfact::io::MatrixFile;
use quatfact::jordan::jordan_quaternionic;
use quatfact::kernels::{determinant, nullspace};
use quatfact::quaternion::Quaternion;
use quatfact::quaternionic::schur_commuting;
use quatfact::symplectic::complete_symplectic;
use quatfact::testkit::{
    gaussian_complex, generate, planted_jordan, random_quat_matrix, random_quat_vector, random_unit_vector,
    rank_deficient_quaternionic, rng, GenSpec, StructureClass,
};

fn quaternion() -> impl Strategy<Value = Quaternion> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
}

fn close(p: Quaternion, q: Quaternion, scale: f64) -> bool {
    (p - q).norm() <= 1e-12 * scale.max(1.0)
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quaternion_ring_axioms(p in quaternion(), q in quaternion(), r in quaternion()) {
        let scale = p.norm() * q.norm() * r.norm();
        prop_assert!(close((p * q) * r, p * (q * r), scale));
        prop_assert!(close(p * (q + r), p * q + p * r, p.norm() * (q.norm() + r.norm())));
        prop_assert!(close((p * q).conj(), q.conj() * p.conj(), p.norm() * q.norm()));
        prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() <= 1e-12 * (p.norm() * q.norm()).max(1.0));
        prop_assert!(close(p * Quaternion::ONE, p, p.norm()));
    }

    #[test]
    fn split_round_trip(p in quaternion()) {
        let (alpha, beta) = p.split();
        prop_assert_eq!(Quaternion::from_split(alpha, beta), p);
    }

    #[test]
    fn chi_is_a_star_homomorphism(n in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_quat_matrix(n, n, &mut r);
        let q = random_quat_matrix(n, n, &mut r);
        let (cp, cq) = (chi(&p), chi(&q));
        prop_assert!(rel(&chi(&p.mul(&q).unwrap()), &(&cp * &cq)) <= 1e-13);
        prop_assert!(rel(&chi(&p.add(&q).unwrap()), &(&cp + &cq)) <= 1e-15);
        prop_assert_eq!(chi(&p.adjoint()), cp.adjoint());
    }

    #[test]
    fn dual_axioms(n in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = gaussian_complex(2 * n, 2 * n, &mut r);
        let y = gaussian_complex(2 * n, 2 * n, &mut r);
        let d = |m: &CMatrix| dual(m).unwrap();
        prop_assert!(rel(&d(&d(&x)), &x) <= 1e-15);
        prop_assert!(rel(&d(&(&x * &y)), &(d(&y) * d(&x))) <= 1e-13);
        prop_assert!(rel(&d(&x.adjoint()), &d(&x).adjoint()) <= 1e-15);
        let a = Complex64::new(0.3, -1.7);
        prop_assert!(rel(&d(&(&x * a)), &(d(&x) * a)) <= 1e-15);
    }

    #[test]
    fn t_is_antiunitary_with_square_minus_one(n in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = gaussian_complex(2 * n, 1, &mut r).column(0).into_owned();
        let w = gaussian_complex(2 * n, 1, &mut r).column(0).into_owned();
        let (tv, tw) = (apply_t(&v).unwrap(), apply_t(&w).unwrap());
        prop_assert!((tv.dotc(&tw) - v.dotc(&w).conj()).norm() <= 1e-12 * v.norm() * w.norm());
        prop_assert!(v.dotc(&tv).norm() <= 1e-12 * v.norm_squared());
        prop_assert!((apply_t(&tv).unwrap() + &v).norm() <= 1e-15 * v.norm());
    }

    #[test]
    fn norm_of_image_matches_dual_adjoint_on_t(n in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let y = gaussian_complex(2 * n, 2 * n, &mut r);
        let v: CVector = gaussian_complex(2 * n, 1, &mut r).column(0).into_owned();
        let lhs = (&y * &v).norm();
        let rhs = (dual(&y).unwrap().adjoint() * apply_t(&v).unwrap()).norm();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * y.norm() * v.norm());
    }

    #[test]
    fn pull_back_inverts_push_forward(n in 1usize..6, seed in any::<u64>()) {
        let v = random_quat_vector(n, &mut rng(seed));
        let back = pull_back(&push_forward(&v)).unwrap();
        for (a, b) in v.iter().zip(&back) {
            prop_assert!(close(*a, *b, a.norm()));
        }
    }

    #[test]
    fn kernels_of_quaternionic_matrices_are_t_invariant(n in 2usize..6, rank_seed in 0usize..100, seed in any::<u64>()) {
        let r = 1 + rank_seed % (n - 1);
        let x = rank_deficient_quaternionic(n, r, seed);
        let k = nullspace(&x, 1e-10).unwrap();
        prop_assert_eq!(k.ncols(), 2 * (n - r));
        for col in k.column_iter() {
            let t = apply_t(&col.into_owned()).unwrap();
            let outside = &t - &k * (k.adjoint() * &t);
            prop_assert!(outside.norm() <= 1e-9);
        }
    }

    #[test]
    fn complete_symplectic_extends_a_unit_vector(n in 1usize..8, seed in any::<u64>()) {
        let v = random_unit_vector(2 * n, &mut rng(seed));
        let u = complete_symplectic(&v).unwrap();
        let id = CMatrix::identity(2 * n, 2 * n);
        prop_assert!((u.adjoint() * &u - &id).norm() <= 1e-12);
        prop_assert!((dual(&u).unwrap() * &u - &id).norm() <= 1e-12);
        prop_assert!((u.column(0) - &v).norm() <= 1e-14);
        prop_assert!((determinant(&u).unwrap() - 1.0).norm() <= 1e-10);
    }

    #[test]
    fn generators_are_deterministic(n in 1usize..5, seed in any::<u64>(), which in 0usize..6) {
        let class = [
            StructureClass::Quaternionic,
            StructureClass::SelfDual,
            StructureClass::Symmetric,
            StructureClass::NormalQuaternionic,
            StructureClass::HermitianQuaternionic,
            StructureClass::CommutingFamily(2),
        ][which];
        let spec = GenSpec { n, class, seed };
        prop_assert_eq!(generate(&spec).into_matrices(), generate(&spec).into_matrices());
        let other = GenSpec { seed: seed.wrapping_add(1), ..spec };
        prop_assert_ne!(generate(&spec).into_matrices(), generate(&other).into_matrices());
    }

    #[test]
    fn matrix_files_round_trip(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = MatrixFile::Complex(gaussian_complex(rows, cols, &mut r));
        prop_assert_eq!(MatrixFile::parse(&c.serialize()).unwrap(), c);
        let q = MatrixFile::Quaternion(random_quat_matrix(rows, cols, &mut r));
        prop_assert_eq!(MatrixFile::parse(&q.serialize()).unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schur_of_commuting_families(n in 1usize..7, k in 1usize..4, seed in any::<u64>()) {
        let xs = generate(&GenSpec { n, class: StructureClass::CommutingFamily(k), seed }).into_matrices();
        let s = schur_commuting(&xs, 1e-10, seed).unwrap();
        for (x, b) in xs.iter().zip(&s.blocks) {
            prop_assert!(b.residual <= 1e-10 * tol_scale(x));
            prop_assert!(b.t_defect <= 1e-11 && b.s_defect <= 1e-11);
        }
    }

    #[test]
    fn planted_jordan_structure_is_recovered(seed in any::<u64>()) {
        let p = planted_jordan(seed);
        let r = jordan_quaternionic(&p.x, 1e-10).unwrap();
        prop_assert_eq!(r.block_sizes(), p.complex_block_sizes());
        prop_assert!(r.residual() <= 1e-7 * r.condition * p.x.norm());
        prop_assert!(r.pairing_defect() <= 1e-9);
    }
}

#[test]
fn planted_jordan_seed_needing_adjoint_svd() {
    let p = planted_jordan(11_533);
    let r = jordan_quaternionic(&p.x, 1e-10).unwrap();
    assert_eq!(r.block_sizes(), p.complex_block_sizes());
}
