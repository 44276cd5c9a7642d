//! Cross-checks the in-crate Hermitian eigensolver and the derived spectral
//! quantities against an independent dense solver (nalgebra), plus the
//! norm/Hölder inequalities the rest of the crate leans on.

use darwin_certify::qmath::{eigh, min_eigen, trace_norm, CMatrix, C64};
use nalgebra::{Complex, DMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_hermitian(dim: usize, rng: &mut StdRng) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .symmetrize()
}

fn to_nalgebra(m: &CMatrix) -> DMatrix<Complex<f64>> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im))
}

fn oracle_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = to_nalgebra(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

#[test]
fn spectrum_matches_independent_solver() {
    let mut rng = StdRng::seed_from_u64(2024);
    for dim in 2..=8 {
        for _ in 0..20 {
            let a = random_hermitian(dim, &mut rng);
            let ours = eigh(&a).values;
            let oracle = oracle_eigenvalues(&a);
            for (x, y) in ours.iter().zip(&oracle) {
                assert!(
                    (x - y).abs() < 1e-10,
                    "eigenvalue mismatch at dim {dim}: {x} vs {y}"
                );
            }
        }
    }
}

#[test]
fn trace_norm_matches_eigenvalue_sum() {
    let mut rng = StdRng::seed_from_u64(77);
    for dim in 2..=6 {
        for _ in 0..20 {
            let a = random_hermitian(dim, &mut rng);
            let oracle: f64 = oracle_eigenvalues(&a).iter().map(|l| l.abs()).sum();
            assert!((trace_norm(&a) - oracle).abs() < 1e-10);
        }
    }
}

#[test]
fn min_eigen_matches_full_decomposition() {
    let mut rng = StdRng::seed_from_u64(9);
    for dim in 2..=6 {
        for _ in 0..20 {
            let a = random_hermitian(dim, &mut rng);
            let (lam, vec) = min_eigen(&a);
            let oracle = oracle_eigenvalues(&a)[0];
            assert!((lam - oracle).abs() < 1e-10);
            let av = a.matvec(&vec);
            let res: f64 = av
                .iter()
                .zip(&vec)
                .map(|(x, v)| (x - v * lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-9, "eigenpair residual {res}");
        }
    }
}

#[test]
fn frobenius_below_trace_norm() {
    // sqrt(Tr|A|²) ≤ Tr|A| for every Hermitian A.
    let mut rng = StdRng::seed_from_u64(5150);
    for _ in 0..500 {
        let dim = rng.gen_range(2..=6);
        let a = random_hermitian(dim, &mut rng);
        assert!(a.frobenius_norm() <= trace_norm(&a) + 1e-10);
    }
}

#[test]
fn hoelder_inequality_two_two() {
    // |Tr[A†B]| ≤ sqrt(Tr|A|²)·sqrt(Tr|B|²).
    let mut rng = StdRng::seed_from_u64(31337);
    for _ in 0..500 {
        let dim = rng.gen_range(2..=6);
        let a = random_hermitian(dim, &mut rng);
        let b = random_hermitian(dim, &mut rng);
        let lhs = a.hs_inner(&b).norm();
        assert!(lhs <= a.frobenius_norm() * b.frobenius_norm() + 1e-10);
    }
}

#[test]
fn trace_norm_is_a_norm() {
    let mut rng = StdRng::seed_from_u64(404);
    for _ in 0..200 {
        let dim = rng.gen_range(2..=6);
        let a = random_hermitian(dim, &mut rng);
        let b = random_hermitian(dim, &mut rng);
        let s: f64 = rng.gen_range(-3.0..3.0);
        assert!(trace_norm(&a.add(&b)) <= trace_norm(&a) + trace_norm(&b) + 1e-10);
        assert!((trace_norm(&a.scale_re(s)) - s.abs() * trace_norm(&a)).abs() < 1e-10);
    }
}

#[test]
fn partial_trace_preserves_trace_and_psd() {
    let mut rng = StdRng::seed_from_u64(60601);
    for _ in 0..50 {
        // Random two-qubit density matrix via a Gram construction.
        let g = CMatrix::from_fn(4, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let gram = g.matmul(&g.adjoint());
        let rho = gram.scale_re(1.0 / gram.trace().re);
        let red = rho.partial_trace(&[2, 2], &[1]).unwrap();
        assert!((red.trace().re - 1.0).abs() < 1e-10);
        assert!(eigh(&red).values[0] >= -1e-10);
    }
}
