//! Property-based invariants of the matrix layer.

use darwin_certify::qmath::{trace_norm, CMatrix, C64};
use proptest::prelude::*;

fn hermitian_strategy(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |vals| {
        CMatrix::from_fn(dim, |i, j| {
            let (re, im) = vals[i * dim + j];
            C64::new(re, im)
        })
        .symmetrize()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_trace_multiplies(a in hermitian_strategy(2), b in hermitian_strategy(3)) {
        let ab = a.kron(&b);
        let lhs = ab.trace().re;
        let rhs = a.trace().re * b.trace().re;
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn kron_matches_entrywise_oracle(a in hermitian_strategy(2), b in hermitian_strategy(2)) {
        let ab = a.kron(&b);
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        let expect = a[(i1, j1)] * b[(i2, j2)];
                        let got = ab[(i1 * 2 + i2, j1 * 2 + j2)];
                        prop_assert!((expect - got).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_linear_and_trace_preserving(m in hermitian_strategy(6)) {
        let reduced = m.partial_trace(&[2, 3], &[0]).unwrap();
        prop_assert!((reduced.trace().re - m.trace().re).abs() < 1e-10);
        let reduced2 = m.scale_re(2.0).partial_trace(&[2, 3], &[0]).unwrap();
        prop_assert!(reduced2.max_abs_diff(&reduced.scale_re(2.0)) < 1e-12);
    }

    #[test]
    fn trace_norm_triangle(a in hermitian_strategy(3), b in hermitian_strategy(3)) {
        prop_assert!(trace_norm(&a.add(&b)) <= trace_norm(&a) + trace_norm(&b) + 1e-10);
    }

    #[test]
    fn hermiticity_survives_products(a in hermitian_strategy(3), b in hermitian_strategy(3)) {
        // ABA is Hermitian for Hermitian A, B.
        let aba = a.matmul(&b).matmul(&a);
        prop_assert!(aba.hermiticity_defect() < 1e-12);
    }
}
