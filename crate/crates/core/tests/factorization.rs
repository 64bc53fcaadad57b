mod common;

use std::f64::consts::{PI, SQRT_2};

use common::{max_abs_diff, random_vector, rng};
use rdst::kernels::{
    apply_butterfly, apply_butterfly_transpose, apply_even_odd_perm, apply_even_odd_perm_inverse,
    apply_hat_butterfly, apply_q, apply_reversal, apply_sign_alternation, apply_v,
};
use rdst::oracle::{
    build_kernel_matrix, build_matrix, chain_product, materialize_factors, matvec, DenseMatrix,
    KernelId,
};
use rdst::{OpCount, RotationConstants, ScaleMode, TransformKind};

type Kernel = fn(&[f64], &mut [f64]) -> rdst::Result<OpCount>;

#[test]
fn kernels_match_their_matrices() {
    let cases: [(KernelId, Kernel); 8] = [
        (KernelId::Reversal, apply_reversal),
        (KernelId::SignAlternation, apply_sign_alternation),
        (KernelId::EvenOdd, apply_even_odd_perm),
        (KernelId::EvenOddTranspose, apply_even_odd_perm_inverse),
        (KernelId::Sqrt2H, apply_butterfly),
        (KernelId::Sqrt2HTranspose, apply_butterfly_transpose),
        (KernelId::Sqrt2HHat, apply_hat_butterfly),
        (KernelId::Sqrt2V, apply_v),
    ];
    let mut rng = rng(13);
    for (id, kernel) in cases {
        for t in 2..=8 {
            let size = if id == KernelId::Sqrt2HHat {
                (1 << t) - 1
            } else {
                1 << t
            };
            let m = build_kernel_matrix(id, size).unwrap();
            let x = random_vector(&mut rng, size);
            let mut y = vec![0.0; size];
            kernel(&x, &mut y).unwrap();
            let err = max_abs_diff(&y, &matvec(&m, &x).unwrap());
            assert!(err <= 1e-13, "{} size={size} err={err:e}", id.label());
        }
    }
    for t in 1..=8 {
        let n = 1 << t;
        let m = build_kernel_matrix(KernelId::Q, n).unwrap();
        let consts = RotationConstants::new(n).unwrap();
        let x = random_vector(&mut rng, n);
        let mut y = vec![0.0; n];
        let ops = apply_q(&x, &mut y, &consts).unwrap();
        assert_eq!(ops, OpCount::new(n as u64, 2 * n as u64));
        assert!(max_abs_diff(&y, &matvec(&m, &x).unwrap()) <= 1e-13);
    }
}

#[test]
fn n8_chains_reproduce_scaled_matrices() {
    for kind in TransformKind::ALL {
        let prod = chain_product(&materialize_factors(kind, 8).unwrap()).unwrap();
        let want = build_matrix(kind, 8, ScaleMode::Scaled).unwrap();
        assert!(prod.max_abs_diff(&want) <= 1e-12, "{kind}");
    }
}

#[test]
fn chain_lengths() {
    let lens: Vec<usize> = TransformKind::ALL
        .iter()
        .map(|&k| materialize_factors(k, 8).unwrap().len())
        .collect();
    assert_eq!(lens, vec![5, 6, 6, 6]);
}

#[test]
fn displayed_v8_and_q8() {
    let r2 = SQRT_2;
    let v8 = build_kernel_matrix(KernelId::Sqrt2V, 8).unwrap();
    let want = DenseMatrix::from_rows(&[
        vec![0.0, 0.0, 0.0, r2, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
        vec![0.0, 0.0, -1.0, 0.0, -1.0, 0.0, 0.0, 0.0],
        vec![0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, r2],
    ]);
    assert_eq!(v8.max_abs_diff(&want), 0.0);

    let q8 = build_kernel_matrix(KernelId::Q, 8).unwrap();
    let mut want = DenseMatrix::zeros(8, 8);
    for k in 0..4 {
        let (s, c) = ((2 * k + 1) as f64 * PI / 32.0).sin_cos();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        want.set(k, k, sign * s);
        want.set(k, 7 - k, sign * c);
        want.set(7 - k, k, -c);
        want.set(7 - k, 7 - k, s);
    }
    assert!(q8.max_abs_diff(&want) <= 1e-16);
}
