//! Sparse factor operators used by the recursions.
//!
//! Every kernel is out-of-place: it reads `src` and overwrites `dst`, which
//! must have the same length. The public `apply_*` functions validate lengths
//! and finiteness before touching `dst`; the crate-internal `*_into` variants
//! skip validation and are what the transform recursions call.
//!
//! Counting convention: each addition/subtraction and each multiplication by
//! a constant other than `±1` is tallied as it is executed. Sign flips and
//! index permutations are free.

use std::f64::consts::{PI, SQRT_2};
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::error::{check_finite, log2_exact, DstError, Result};

/// Number of additions and multiplications performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCount {
    pub adds: u64,
    pub mults: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount { adds: 0, mults: 0 };

    pub const fn new(adds: u64, mults: u64) -> Self {
        Self { adds, mults }
    }

    #[inline(always)]
    pub(crate) fn adds(&mut self, k: u64) {
        self.adds += k;
    }

    #[inline(always)]
    pub(crate) fn mults(&mut self, k: u64) {
        self.mults += k;
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(self.adds + rhs.adds, self.mults + rhs.mults)
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.adds += rhs.adds;
        self.mults += rhs.mults;
    }
}

impl Sum for OpCount {
    fn sum<I: Iterator<Item = OpCount>>(iter: I) -> Self {
        iter.fold(OpCount::ZERO, Add::add)
    }
}

/// `sin((2k+1)π/4n)` and `cos((2k+1)π/4n)` for `k < n/2`, the angles of `Q_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationConstants {
    half_len: usize,
    sines: Vec<f64>,
    cosines: Vec<f64>,
}

impl RotationConstants {
    /// Constants for the rotation-reflection of even size `n >= 2`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(DstError::Size {
                len: n,
                constraint: "rotation size must be even and >= 2",
            });
        }
        let half_len = n / 2;
        let (sines, cosines) = (0..half_len)
            .map(|k| ((2 * k + 1) as f64 * PI / (4 * n) as f64).sin_cos())
            .unzip();
        Ok(Self {
            half_len,
            sines,
            cosines,
        })
    }

    pub fn half_len(&self) -> usize {
        self.half_len
    }

    pub fn size(&self) -> usize {
        2 * self.half_len
    }

    pub fn sines(&self) -> &[f64] {
        &self.sines
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    /// Flips the sign of every cosine. Only useful for mutation testing of
    /// verification drivers.
    #[doc(hidden)]
    pub fn negate_cosines(&mut self) {
        self.cosines.iter_mut().for_each(|c| *c = -*c);
    }
}

fn check_pair(src: &[f64], dst: &[f64]) -> Result<()> {
    if dst.len() != src.len() {
        return Err(DstError::Dimension {
            expected: src.len(),
            found: dst.len(),
        });
    }
    Ok(())
}

fn check_nonempty(src: &[f64]) -> Result<()> {
    if src.is_empty() {
        return Err(DstError::Size {
            len: 0,
            constraint: "buffer must not be empty",
        });
    }
    Ok(())
}

fn check_even(src: &[f64], min: usize, constraint: &'static str) -> Result<()> {
    let n = src.len();
    if n < min || !n.is_multiple_of(2) {
        return Err(DstError::Size { len: n, constraint });
    }
    Ok(())
}

/// Index that the inverse even-odd permutation sends position `i` to.
#[inline(always)]
pub(crate) fn shuffle_index(i: usize, evens: usize) -> usize {
    if i < evens {
        2 * i
    } else {
        2 * (i - evens) + 1
    }
}

// --- unchecked kernels -----------------------------------------------------

pub(crate) fn reversal_into(src: &[f64], dst: &mut [f64]) {
    for (d, s) in dst.iter_mut().zip(src.iter().rev()) {
        *d = *s;
    }
}

pub(crate) fn sign_alternation_into(src: &[f64], dst: &mut [f64]) {
    for (k, (d, s)) in dst.iter_mut().zip(src).enumerate() {
        *d = if k % 2 == 0 { *s } else { -*s };
    }
}

pub(crate) fn even_odd_into(src: &[f64], dst: &mut [f64]) {
    let evens = src.len().div_ceil(2);
    for (i, d) in dst.iter_mut().enumerate() {
        *d = src[shuffle_index(i, evens)];
    }
}

pub(crate) fn even_odd_inverse_into(src: &[f64], dst: &mut [f64]) {
    let evens = src.len().div_ceil(2);
    for (i, s) in src.iter().enumerate() {
        dst[shuffle_index(i, evens)] = *s;
    }
}

pub(crate) fn butterfly_into(src: &[f64], dst: &mut [f64], ops: &mut OpCount) {
    let n = src.len();
    let h = n / 2;
    for k in 0..h {
        let a = src[k];
        let b = src[n - 1 - k];
        dst[k] = a + b;
        dst[h + k] = a - b;
        ops.adds(2);
    }
}

/// Transposed butterfly with the output permutation `place` fused in.
#[inline(always)]
fn butterfly_transpose_core(src: &[f64], ops: &mut OpCount, mut emit: impl FnMut(usize, f64)) {
    let n = src.len();
    let h = n / 2;
    for k in 0..h {
        let a = src[k];
        let b = src[h + k];
        emit(k, a + b);
        emit(n - 1 - k, a - b);
        ops.adds(2);
    }
}

pub(crate) fn butterfly_transpose_into(src: &[f64], dst: &mut [f64], ops: &mut OpCount) {
    butterfly_transpose_core(src, ops, |i, v| dst[i] = v);
}

pub(crate) fn hat_butterfly_into(src: &[f64], dst: &mut [f64], ops: &mut OpCount) {
    let m = src.len();
    let h = m.div_ceil(2);
    for k in 0..h - 1 {
        let a = src[k];
        let b = src[m - 1 - k];
        dst[k] = a + b;
        dst[h + k] = a - b;
        ops.adds(2);
    }
    dst[h - 1] = SQRT_2 * src[h - 1];
    ops.mults(1);
}

/// `√2·V_n` evaluated straight from `src`; `Ĩ` and `D` are folded into the
/// read pattern and the signs of the additions.
#[inline(always)]
fn sqrt2_v_core(src: &[f64], ops: &mut OpCount, mut emit: impl FnMut(usize, f64)) {
    let n = src.len();
    let h = n / 2;
    emit(0, SQRT_2 * src[h - 1]);
    ops.mults(1);
    for j in 0..h - 1 {
        let a = src[h - 2 - j];
        let b = src[h + j];
        if j % 2 == 0 {
            emit(1 + j, a - b);
            emit(h + j, -(a + b));
        } else {
            emit(1 + j, a + b);
            emit(h + j, b - a);
        }
        ops.adds(2);
    }
    // -√2 · (-1)^(h-1) · x[n-1]
    let last = SQRT_2 * src[n - 1];
    emit(n - 1, if h.is_multiple_of(2) { last } else { -last });
    ops.mults(1);
}

pub(crate) fn sqrt2_v_into(src: &[f64], dst: &mut [f64], ops: &mut OpCount) {
    sqrt2_v_core(src, ops, |i, v| dst[i] = v);
}

/// `P_n^T · √2V_n` in one pass.
pub(crate) fn sqrt2_v_shuffled_into(src: &[f64], dst: &mut [f64], ops: &mut OpCount) {
    let h = src.len() / 2;
    sqrt2_v_core(src, ops, |i, v| dst[shuffle_index(i, h)] = v);
}

pub(crate) fn rotation_into(
    src: &[f64],
    dst: &mut [f64],
    consts: &RotationConstants,
    ops: &mut OpCount,
) {
    let n = src.len();
    for (k, (&s, &c)) in consts.sines.iter().zip(&consts.cosines).enumerate() {
        let a = src[k];
        let b = src[n - 1 - k];
        let top = s * a + c * b;
        ops.mults(2);
        ops.adds(1);
        dst[k] = if k % 2 == 0 { top } else { -top };
        dst[n - 1 - k] = s * b - c * a;
        ops.mults(2);
        ops.adds(1);
    }
}

// --- checked public API ----------------------------------------------------

/// `Ĩ x`: `dst[k] = src[m-1-k]`.
pub fn apply_reversal(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_nonempty(src)?;
    check_pair(src, dst)?;
    check_finite(src)?;
    reversal_into(src, dst);
    Ok(OpCount::ZERO)
}

/// `D x`: `dst[k] = (-1)^k src[k]`.
pub fn apply_sign_alternation(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_nonempty(src)?;
    check_pair(src, dst)?;
    check_finite(src)?;
    sign_alternation_into(src, dst);
    Ok(OpCount::ZERO)
}

/// `P x`: even-indexed samples followed by odd-indexed ones.
pub fn apply_even_odd_perm(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_nonempty(src)?;
    check_pair(src, dst)?;
    check_finite(src)?;
    even_odd_into(src, dst);
    Ok(OpCount::ZERO)
}

/// `P^T x`, the perfect shuffle undoing [`apply_even_odd_perm`].
pub fn apply_even_odd_perm_inverse(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_nonempty(src)?;
    check_pair(src, dst)?;
    check_finite(src)?;
    even_odd_inverse_into(src, dst);
    Ok(OpCount::ZERO)
}

/// `√2·H_n x` for even `n`. Costs `n` additions.
pub fn apply_butterfly(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_even(src, 2, "butterfly length must be even and >= 2")?;
    check_pair(src, dst)?;
    check_finite(src)?;
    let mut ops = OpCount::ZERO;
    butterfly_into(src, dst, &mut ops);
    Ok(ops)
}

/// `√2·H_n^T x` for even `n`. Costs `n` additions.
pub fn apply_butterfly_transpose(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_even(src, 2, "butterfly length must be even and >= 2")?;
    check_pair(src, dst)?;
    check_finite(src)?;
    let mut ops = OpCount::ZERO;
    butterfly_transpose_into(src, dst, &mut ops);
    Ok(ops)
}

/// `√2·Ĥ_{n-1} x` for a length `n - 1` with `n` a power of two.
/// Costs `n - 2` additions and one multiplication.
pub fn apply_hat_butterfly(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    let m = src.len();
    if log2_exact(m + 1).is_none() {
        return Err(DstError::Size {
            len: m,
            constraint: "length+1 must be a power of two",
        });
    }
    check_pair(src, dst)?;
    check_finite(src)?;
    let mut ops = OpCount::ZERO;
    hat_butterfly_into(src, dst, &mut ops);
    Ok(ops)
}

/// `√2·V_n x` for even `n >= 4`. Costs `n - 2` additions, 2 multiplications.
pub fn apply_v(src: &[f64], dst: &mut [f64]) -> Result<OpCount> {
    check_even(src, 4, "V length must be even and >= 4")?;
    check_pair(src, dst)?;
    check_finite(src)?;
    let mut ops = OpCount::ZERO;
    sqrt2_v_into(src, dst, &mut ops);
    Ok(ops)
}

/// `Q_n x`. Costs `n` additions and `2n` multiplications.
pub fn apply_q(src: &[f64], dst: &mut [f64], consts: &RotationConstants) -> Result<OpCount> {
    check_even(src, 2, "Q length must be even and >= 2")?;
    if consts.size() != src.len() {
        return Err(DstError::Plan(format!(
            "rotation constants built for n = {}, buffer has length {}",
            consts.size(),
            src.len()
        )));
    }
    check_pair(src, dst)?;
    check_finite(src)?;
    let mut ops = OpCount::ZERO;
    rotation_into(src, dst, consts, &mut ops);
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: fn(&[f64], &mut [f64]) -> Result<OpCount>, x: &[f64]) -> (Vec<f64>, OpCount) {
        let mut out = vec![0.0; x.len()];
        let ops = f(x, &mut out).unwrap();
        (out, ops)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn reversal_examples() {
        assert_eq!(run(apply_reversal, &[1.0, 2.0, 3.0]).0, vec![3.0, 2.0, 1.0]);
        assert_eq!(run(apply_reversal, &[7.0]).0, vec![7.0]);
        let once = run(apply_reversal, &[1.0, 2.0, 3.0, 4.0]).0;
        let (twice, ops) = run(apply_reversal, &once);
        assert_eq!(twice, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ops, OpCount::ZERO);
    }

    #[test]
    fn empty_buffers_rejected() {
        let mut out = [];
        assert!(matches!(
            apply_reversal(&[], &mut out),
            Err(DstError::Size { .. })
        ));
        assert!(matches!(
            apply_sign_alternation(&[], &mut out),
            Err(DstError::Size { .. })
        ));
    }

    #[test]
    fn sign_alternation_examples() {
        assert_eq!(
            run(apply_sign_alternation, &[1.0; 4]).0,
            vec![1.0, -1.0, 1.0, -1.0]
        );
        assert_eq!(run(apply_sign_alternation, &[0.0, 5.0]).0, vec![0.0, -5.0]);
        let once = run(apply_sign_alternation, &[2.0, 3.0, 4.0]).0;
        assert_eq!(run(apply_sign_alternation, &once).0, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn even_odd_examples() {
        assert_eq!(
            run(apply_even_odd_perm, &[1.0, 2.0, 3.0, 4.0]).0,
            vec![1.0, 3.0, 2.0, 4.0]
        );
        assert_eq!(
            run(apply_even_odd_perm, &[1.0, 2.0, 3.0, 4.0, 5.0]).0,
            vec![1.0, 3.0, 5.0, 2.0, 4.0]
        );
        assert_eq!(run(apply_even_odd_perm, &[4.0, 9.0]).0, vec![4.0, 9.0]);
        assert_eq!(run(apply_even_odd_perm, &[4.0]).0, vec![4.0]);
    }

    #[test]
    fn even_odd_inverse_roundtrip_all_lengths() {
        for m in 1..=257 {
            let x: Vec<f64> = (0..m).map(|i| i as f64 * 0.5 - 3.0).collect();
            let fwd = run(apply_even_odd_perm, &x).0;
            assert_eq!(run(apply_even_odd_perm_inverse, &fwd).0, x, "m = {m}");
            let inv = run(apply_even_odd_perm_inverse, &x).0;
            assert_eq!(run(apply_even_odd_perm, &inv).0, x, "m = {m}");
        }
    }

    #[test]
    fn butterfly_examples() {
        let (y, ops) = run(apply_butterfly, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(y, vec![5.0, 5.0, -3.0, -1.0]);
        assert_eq!(ops, OpCount::new(4, 0));
        assert_eq!(run(apply_butterfly, &[1.0, 0.0]).0, vec![1.0, 1.0]);
        let (z, ops) = run(apply_butterfly_transpose, &y);
        assert_eq!(z, vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(ops, OpCount::new(4, 0));
        assert!(apply_butterfly(&[1.0, 2.0, 3.0], &mut [0.0; 3]).is_err());
    }

    #[test]
    fn hat_butterfly_examples() {
        let r2 = SQRT_2;
        let (y, ops) = run(apply_hat_butterfly, &[1.0, 2.0, 3.0]);
        assert!(close(&y, &[4.0, 2.0 * r2, -2.0], 1e-15));
        assert_eq!(ops, OpCount::new(2, 1));
        let (y, ops) = run(apply_hat_butterfly, &[5.0]);
        assert!(close(&y, &[5.0 * r2], 1e-15));
        assert_eq!(ops, OpCount::new(0, 1));
        assert_eq!(run(apply_hat_butterfly, &[0.5; 7]).1, OpCount::new(6, 1));
        assert!(apply_hat_butterfly(&[1.0, 2.0], &mut [0.0; 2]).is_err());
        assert!(apply_hat_butterfly(&[1.0; 5], &mut [0.0; 5]).is_err());
    }

    #[test]
    fn v_examples() {
        let r2 = SQRT_2;
        let (a, b, c, d) = (0.3, -1.7, 2.25, 0.9);
        let (y, ops) = run(apply_v, &[a, b, c, d]);
        assert!(close(&y, &[r2 * b, a - c, -a - c, r2 * d], 1e-15));
        assert_eq!(ops, OpCount::new(2, 2));
        let (y, _) = run(apply_v, &[0.0, 1.0, 0.0, 0.0]);
        assert!(close(&y, &[r2, 0.0, 0.0, 0.0], 0.0));
        let mut e3 = [0.0; 8];
        e3[3] = 1.0;
        let (y, ops) = run(apply_v, &e3);
        assert!(close(&y, &[r2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.0));
        assert_eq!(ops, OpCount::new(6, 2));
        assert!(apply_v(&[1.0, 2.0], &mut [0.0; 2]).is_err());
    }

    #[test]
    fn q_examples() {
        let consts = RotationConstants::new(4).unwrap();
        let mut out = [0.0; 4];
        let ops = apply_q(&[1.0, 0.0, 0.0, 0.0], &mut out, &consts).unwrap();
        let (s1, c1) = (PI / 16.0).sin_cos();
        assert!(close(&out, &[s1, 0.0, 0.0, -c1], 1e-16));
        assert_eq!(ops, OpCount::new(4, 8));
        apply_q(&[0.0, 1.0, 0.0, 0.0], &mut out, &consts).unwrap();
        let (s3, c3) = (3.0 * PI / 16.0).sin_cos();
        assert!(close(&out, &[0.0, -s3, -c3, 0.0], 1e-16));

        let wrong = RotationConstants::new(8).unwrap();
        assert!(matches!(
            apply_q(&[1.0; 4], &mut out, &wrong),
            Err(DstError::Plan(_))
        ));
    }

    #[test]
    fn q_preserves_norm() {
        let consts = RotationConstants::new(8).unwrap();
        let x = [0.3, -0.1, 0.8, 0.25, -0.6, 0.45, 0.05, -0.9];
        let mut y = [0.0; 8];
        apply_q(&x, &mut y, &consts).unwrap();
        let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((nx - ny).abs() <= 1e-13);
    }

    #[test]
    fn rotation_constants_invariants() {
        for t in 1..=12 {
            let n = 1usize << t;
            let rc = RotationConstants::new(n).unwrap();
            assert_eq!(rc.half_len(), n / 2);
            for (s, c) in rc.sines().iter().zip(rc.cosines()) {
                assert!((s * s + c * c - 1.0).abs() <= 1e-15);
                assert!(0.0 < *s && s < c);
            }
        }
        assert!(RotationConstants::new(3).is_err());
        assert!(RotationConstants::new(0).is_err());
    }

    #[test]
    fn kernel_counts_for_all_sizes() {
        for t in 1..=12 {
            let n = 1usize << t;
            let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let mut y = vec![0.0; n];
            assert_eq!(
                apply_butterfly(&x, &mut y).unwrap(),
                OpCount::new(n as u64, 0)
            );
            assert_eq!(
                apply_butterfly_transpose(&x, &mut y).unwrap(),
                OpCount::new(n as u64, 0)
            );
            let consts = RotationConstants::new(n).unwrap();
            assert_eq!(
                apply_q(&x, &mut y, &consts).unwrap(),
                OpCount::new(n as u64, 2 * n as u64)
            );
            if n >= 4 {
                assert_eq!(apply_v(&x, &mut y).unwrap(), OpCount::new(n as u64 - 2, 2));
            }
            let mut z = vec![0.0; n - 1];
            assert_eq!(
                apply_hat_butterfly(&x[..n - 1], &mut z).unwrap(),
                OpCount::new(n as u64 - 2, 1)
            );
            for f in [
                apply_reversal,
                apply_sign_alternation,
                apply_even_odd_perm,
                apply_even_odd_perm_inverse,
            ] {
                assert_eq!(f(&x, &mut y).unwrap(), OpCount::ZERO);
            }
        }
    }

    #[test]
    fn non_finite_rejected_before_write() {
        let mut out = [9.0; 4];
        let err = apply_butterfly(&[1.0, f64::NAN, 0.0, 0.0], &mut out).unwrap_err();
        assert!(matches!(err, DstError::Numeric { index: 1, .. }));
        assert_eq!(out, [9.0; 4]);
    }

    #[test]
    fn fused_v_matches_v_then_shuffle() {
        let x: Vec<f64> = (0..16).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let mut v = vec![0.0; 16];
        let mut shuffled = vec![0.0; 16];
        let mut fused = vec![0.0; 16];
        let mut ops = OpCount::ZERO;
        sqrt2_v_into(&x, &mut v, &mut ops);
        even_odd_inverse_into(&v, &mut shuffled);
        sqrt2_v_shuffled_into(&x, &mut fused, &mut ops);
        assert_eq!(fused, shuffled);
    }
}
