//! The four scaled recursions and the plan that drives them.
//!
//! Each recursion reads its input buffer (which it is free to clobber) and
//! writes its output buffer; the two sub-transforms of a level run with the
//! roles of the buffers swapped, so a whole transform needs exactly two
//! length-`n` buffers and no allocation.

use std::collections::BTreeSet;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{check_finite, log2_exact, DstError, Result};
use crate::kernels::{
    butterfly_into, butterfly_transpose_into, even_odd_into, even_odd_inverse_into,
    hat_butterfly_into, rotation_into, sqrt2_v_shuffled_into, OpCount, RotationConstants,
};
use crate::{ScaleMode, TransformKind};

/// Operation counts of one plan execution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecCounts {
    /// The scaled recursion proper.
    pub transform: OpCount,
    /// The `1/√n` pass of unitary output (zero for scaled output).
    pub normalization: OpCount,
}

impl ExecCounts {
    pub fn total(&self) -> OpCount {
        self.transform + self.normalization
    }
}

#[derive(Debug, Clone)]
struct Tables {
    // indexed by log2 of the Q size
    rotations: Vec<Option<RotationConstants>>,
    base_sin: f64,
    base_cos: f64,
}

impl Tables {
    #[inline]
    fn rotation(&self, n: usize) -> &RotationConstants {
        self.rotations[n.trailing_zeros() as usize]
            .as_ref()
            .expect("plan is missing rotation constants for a visited size")
    }
}

/// Sizes `n` of every `Q_n` applied by the recursion for `(kind, n)`.
pub fn rotation_sizes(kind: TransformKind, n: usize) -> BTreeSet<usize> {
    fn visit(kind: TransformKind, n: usize, out: &mut BTreeSet<usize>) {
        if n < 4 {
            return;
        }
        let h = n / 2;
        match kind {
            TransformKind::Dst1 => {
                visit(TransformKind::Dst3, h, out);
                visit(TransformKind::Dst1, h, out);
            }
            TransformKind::Dst2 => {
                visit(TransformKind::Dst4, h, out);
                visit(TransformKind::Dst2, h, out);
            }
            TransformKind::Dst3 => {
                visit(TransformKind::Dst4, h, out);
                visit(TransformKind::Dst3, h, out);
            }
            TransformKind::Dst4 => {
                out.insert(n);
                visit(TransformKind::Dst2, h, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    visit(kind, n, &mut out);
    out
}

/// Precomputed constants and scratch space for one `(kind, n)`.
///
/// A plan is reusable; execution never allocates. One execution at a time per
/// plan: create a plan per thread for parallel work.
#[derive(Debug, Clone)]
pub struct DstPlan {
    kind: TransformKind,
    n: usize,
    len: usize,
    inv_sqrt_n: f64,
    tables: Tables,
    work: Vec<f64>,
    spare: Vec<f64>,
}

impl DstPlan {
    /// Plan for radix size `n = 2^t`, `t >= 1`. DST-I plans act on `n - 1`
    /// samples, the others on `n`.
    pub fn new(kind: TransformKind, n: usize) -> Result<Self> {
        let t = log2_exact(n).ok_or(DstError::Size {
            len: n,
            constraint: "transform size n must be a power of two >= 2",
        })?;
        let mut rotations = vec![None; t as usize + 1];
        for size in rotation_sizes(kind, n) {
            rotations[size.trailing_zeros() as usize] = Some(RotationConstants::new(size)?);
        }
        let (base_sin, base_cos) = (PI / 8.0).sin_cos();
        let len = kind.signal_len(n);
        Ok(Self {
            kind,
            n,
            len,
            inv_sqrt_n: 1.0 / (n as f64).sqrt(),
            tables: Tables {
                rotations,
                base_sin,
                base_cos,
            },
            work: vec![0.0; len],
            spare: vec![0.0; len],
        })
    }

    /// Plan sized for a signal of `len` samples.
    pub fn for_len(kind: TransformKind, len: usize) -> Result<Self> {
        Self::new(kind, kind.size_for_len(len)?)
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// Radix size `n` (one more than the signal length for DST-I).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Signal length.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `1/√n`, the factor turning scaled output into unitary output.
    pub fn normalization(&self) -> f64 {
        self.inv_sqrt_n
    }

    /// Sizes for which this plan holds rotation constants.
    pub fn rotation_sizes(&self) -> Vec<usize> {
        self.tables
            .rotations
            .iter()
            .flatten()
            .map(RotationConstants::size)
            .collect()
    }

    #[doc(hidden)]
    pub fn map_rotations(&mut self, mut f: impl FnMut(&mut RotationConstants)) {
        self.tables.rotations.iter_mut().flatten().for_each(&mut f);
    }

    fn check_io(&self, input: &[f64], output: &[f64]) -> Result<()> {
        if input.len() != self.len {
            return Err(DstError::Plan(format!(
                "{} plan for n = {} expects {} samples, got {}",
                self.kind,
                self.n,
                self.len,
                input.len()
            )));
        }
        if output.len() != self.len {
            return Err(DstError::Dimension {
                expected: self.len,
                found: output.len(),
            });
        }
        check_finite(input)
    }

    /// `output = √n · S · input`.
    pub fn scaled(&mut self, input: &[f64], output: &mut [f64]) -> Result<OpCount> {
        self.check_io(input, output)?;
        self.work.copy_from_slice(input);
        let mut ops = OpCount::ZERO;
        run(self.kind, &self.tables, &mut self.work, output, &mut ops);
        Ok(ops)
    }

    /// `output = S · input`: the scaled result times `1/√n`, one
    /// multiplication per element.
    pub fn unitary(&mut self, input: &[f64], output: &mut [f64]) -> Result<ExecCounts> {
        self.process(input, output, ScaleMode::Unitary)
    }

    pub fn process(
        &mut self,
        input: &[f64],
        output: &mut [f64],
        mode: ScaleMode,
    ) -> Result<ExecCounts> {
        let transform = self.scaled(input, output)?;
        let normalization = match mode {
            ScaleMode::Scaled => OpCount::ZERO,
            ScaleMode::Unitary => scale_by(output, self.inv_sqrt_n),
        };
        Ok(ExecCounts {
            transform,
            normalization,
        })
    }

    /// Like [`DstPlan::process`], overwriting `buf` with the result.
    pub fn process_in_place(&mut self, buf: &mut [f64], mode: ScaleMode) -> Result<ExecCounts> {
        self.check_io(buf, buf)?;
        self.work.copy_from_slice(buf);
        let mut transform = OpCount::ZERO;
        run(
            self.kind,
            &self.tables,
            &mut self.work,
            &mut self.spare,
            &mut transform,
        );
        buf.copy_from_slice(&self.spare);
        let normalization = match mode {
            ScaleMode::Scaled => OpCount::ZERO,
            ScaleMode::Unitary => scale_by(buf, self.inv_sqrt_n),
        };
        Ok(ExecCounts {
            transform,
            normalization,
        })
    }
}

fn scale_by(buf: &mut [f64], factor: f64) -> OpCount {
    let mut ops = OpCount::ZERO;
    for v in buf.iter_mut() {
        *v *= factor;
        ops.mults(1);
    }
    ops
}

fn run(kind: TransformKind, tables: &Tables, x: &mut [f64], out: &mut [f64], ops: &mut OpCount) {
    match kind {
        TransformKind::Dst1 => dst1_rec(tables, x, out, ops),
        TransformKind::Dst2 => dst2_rec(tables, x, out, ops),
        TransformKind::Dst3 => dst3_rec(tables, x, out, ops),
        TransformKind::Dst4 => dst4_rec(tables, x, out, ops),
    }
}

#[inline(always)]
fn base_pair(x: &[f64], out: &mut [f64], ops: &mut OpCount) {
    out[0] = x[0] + x[1];
    out[1] = x[0] - x[1];
    ops.adds(2);
}

// MS2 = P^T · blkdiag(MS4, MS2) · √2 H_n
fn dst2_rec(tables: &Tables, x: &mut [f64], out: &mut [f64], ops: &mut OpCount) {
    let n = x.len();
    if n == 2 {
        return base_pair(x, out, ops);
    }
    let h = n / 2;
    butterfly_into(x, out, ops);
    {
        let (ot, ob) = out.split_at_mut(h);
        let (xt, xb) = x.split_at_mut(h);
        dst4_rec(tables, ot, xt, ops);
        dst2_rec(tables, ob, xb, ops);
    }
    even_odd_inverse_into(x, out);
}

// MS4 = P^T · √2 V_n · blkdiag(MS2, MS2) · Q_n
fn dst4_rec(tables: &Tables, x: &mut [f64], out: &mut [f64], ops: &mut OpCount) {
    let n = x.len();
    if n == 2 {
        let (s, c) = (tables.base_sin, tables.base_cos);
        let r0 = s * x[0] + c * x[1];
        let r1 = c * x[0] - s * x[1];
        ops.mults(4);
        ops.adds(2);
        out[0] = SQRT_2 * r0;
        out[1] = SQRT_2 * r1;
        ops.mults(2);
        return;
    }
    let h = n / 2;
    rotation_into(x, out, tables.rotation(n), ops);
    {
        let (ot, ob) = out.split_at_mut(h);
        let (xt, xb) = x.split_at_mut(h);
        dst2_rec(tables, ot, xt, ops);
        dst2_rec(tables, ob, xb, ops);
    }
    sqrt2_v_shuffled_into(x, out, ops);
}

// MS3 = √2 H_n^T · blkdiag(MS4, MS3) · P_n
fn dst3_rec(tables: &Tables, x: &mut [f64], out: &mut [f64], ops: &mut OpCount) {
    let n = x.len();
    if n == 2 {
        return base_pair(x, out, ops);
    }
    let h = n / 2;
    even_odd_into(x, out);
    {
        let (ot, ob) = out.split_at_mut(h);
        let (xt, xb) = x.split_at_mut(h);
        dst4_rec(tables, ot, xt, ops);
        dst3_rec(tables, ob, xb, ops);
    }
    butterfly_transpose_into(x, out, ops);
}

// MS1 = P_{n-1}^T · blkdiag(MS3, MS1) · √2 Ĥ_{n-1}
fn dst1_rec(tables: &Tables, x: &mut [f64], out: &mut [f64], ops: &mut OpCount) {
    let m = x.len();
    if m == 1 {
        // √2 · S_1^I
        out[0] = SQRT_2 * x[0];
        ops.mults(1);
        return;
    }
    let h = m.div_ceil(2);
    hat_butterfly_into(x, out, ops);
    {
        let (ot, ob) = out.split_at_mut(h);
        let (xt, xb) = x.split_at_mut(h);
        dst3_rec(tables, ot, xt, ops);
        dst1_rec(tables, ob, xb, ops);
    }
    even_odd_inverse_into(x, out);
}

fn expect_kind(plan: &DstPlan, kind: TransformKind) -> Result<()> {
    if plan.kind() != kind {
        return Err(DstError::Plan(format!(
            "plan built for {}, called as {}",
            plan.kind(),
            kind
        )));
    }
    Ok(())
}

/// Scaled transform of `kind` into a fresh vector.
pub fn dst_scaled(
    kind: TransformKind,
    plan: &mut DstPlan,
    x: &[f64],
) -> Result<(Vec<f64>, OpCount)> {
    expect_kind(plan, kind)?;
    let mut out = vec![0.0; plan.len()];
    let ops = plan.scaled(x, &mut out)?;
    Ok((out, ops))
}

/// `√n · S_n^{II} x`.
pub fn dst2_scaled(plan: &mut DstPlan, x: &[f64]) -> Result<(Vec<f64>, OpCount)> {
    dst_scaled(TransformKind::Dst2, plan, x)
}

/// `√n · S_n^{IV} x`.
pub fn dst4_scaled(plan: &mut DstPlan, x: &[f64]) -> Result<(Vec<f64>, OpCount)> {
    dst_scaled(TransformKind::Dst4, plan, x)
}

/// `√n · S_n^{III} x`.
pub fn dst3_scaled(plan: &mut DstPlan, x: &[f64]) -> Result<(Vec<f64>, OpCount)> {
    dst_scaled(TransformKind::Dst3, plan, x)
}

/// `√n · S_{n-1}^{I} x`.
pub fn dst1_scaled(plan: &mut DstPlan, x: &[f64]) -> Result<(Vec<f64>, OpCount)> {
    dst_scaled(TransformKind::Dst1, plan, x)
}

/// Orthogonal transform `S x`.
pub fn dst_unitary(kind: TransformKind, plan: &mut DstPlan, x: &[f64]) -> Result<Vec<f64>> {
    expect_kind(plan, kind)?;
    let mut out = vec![0.0; plan.len()];
    plan.unitary(x, &mut out)?;
    Ok(out)
}

/// Inverse of [`dst_unitary`] for `kind`. The plan must be built for
/// `kind.inverse()`.
pub fn idst_unitary(kind: TransformKind, plan: &mut DstPlan, x: &[f64]) -> Result<Vec<f64>> {
    dst_unitary(kind.inverse(), plan, x)
}

/// Inverse of the scaled transform: `(√n S)^{-1} = (√n S^T) / n`. The plan
/// must be built for `kind.inverse()`.
pub fn idst_scaled(
    kind: TransformKind,
    plan: &mut DstPlan,
    x: &[f64],
) -> Result<(Vec<f64>, ExecCounts)> {
    expect_kind(plan, kind.inverse())?;
    let mut out = vec![0.0; plan.len()];
    let transform = plan.scaled(x, &mut out)?;
    let normalization = scale_by(&mut out, 1.0 / plan.n() as f64);
    Ok((
        out,
        ExecCounts {
            transform,
            normalization,
        },
    ))
}
