//! Definition-based ground truth.
//!
//! Everything here is built directly from the closed-form matrix entries and
//! the block definitions of the sparse factors, never by calling into the
//! fast kernels, so it can be used to check them. It is O(n²) and allocates
//! freely; keep it off any performance path.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{log2_exact, DstError, Result};
use crate::{ScaleMode, TransformKind};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from nested rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(DstError::Dimension {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entrywise difference; `INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Block-diagonal assembly.
    pub fn block_diag(blocks: &[&DenseMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

/// Dense `m · x`.
pub fn matvec(m: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != m.cols {
        return Err(DstError::Dimension {
            expected: m.cols,
            found: x.len(),
        });
    }
    Ok((0..m.rows)
        .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect())
}

fn edge_weight(n: usize, j: usize) -> f64 {
    if j == 0 || j == n {
        FRAC_1_SQRT_2
    } else {
        1.0
    }
}

/// Entry-by-entry DST matrix. DST-I is `(n-1) x (n-1)`, the others `n x n`.
/// `Scaled` multiplies every entry by `√n`.
pub fn build_matrix(kind: TransformKind, n: usize, scale: ScaleMode) -> Result<DenseMatrix> {
    log2_exact(n).ok_or(DstError::Size {
        len: n,
        constraint: "transform size n must be a power of two >= 2",
    })?;
    let nf = n as f64;
    let norm = match scale {
        ScaleMode::Unitary => (2.0 / nf).sqrt(),
        ScaleMode::Scaled => SQRT_2,
    };
    let m = kind.signal_len(n);
    let entry = |j: usize, k: usize| -> f64 {
        let (jf, kf) = (j as f64, k as f64);
        match kind {
            TransformKind::Dst1 => ((jf + 1.0) * (kf + 1.0) * PI / nf).sin(),
            TransformKind::Dst2 => {
                edge_weight(n, j + 1) * ((jf + 1.0) * (2.0 * kf + 1.0) * PI / (2.0 * nf)).sin()
            }
            TransformKind::Dst3 => {
                edge_weight(n, k + 1) * ((2.0 * jf + 1.0) * (kf + 1.0) * PI / (2.0 * nf)).sin()
            }
            TransformKind::Dst4 => ((2.0 * jf + 1.0) * (2.0 * kf + 1.0) * PI / (4.0 * nf)).sin(),
        }
    };
    Ok(DenseMatrix::from_fn(m, m, |j, k| norm * entry(j, k)))
}

/// One sparse matrix in a factor chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFactor {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
    blocks: Vec<String>,
}

impl SparseFactor {
    /// Keeps the exactly-nonzero entries of a square matrix.
    pub fn from_dense(label: impl Into<String>, m: &DenseMatrix) -> Self {
        assert_eq!(m.rows, m.cols, "factors are square");
        let mut entries = Vec::new();
        for i in 0..m.rows {
            for j in 0..m.cols {
                let v = m.get(i, j);
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            dim: m.rows,
            entries,
            blocks: vec![label.into()],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: (0..dim).map(|i| (i, i, 1.0)).collect(),
            blocks: vec![format!("I_{dim}")],
        }
    }

    pub fn block_diag(parts: &[&SparseFactor]) -> Self {
        let mut dim = 0;
        let mut entries = Vec::new();
        let mut blocks = Vec::new();
        for p in parts {
            entries.extend(p.entries.iter().map(|&(i, j, v)| (i + dim, j + dim, v)));
            blocks.extend(p.blocks.iter().cloned());
            dim += p.dim;
        }
        Self {
            dim,
            entries,
            blocks,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Labels of the diagonal blocks, top-left first.
    pub fn blocks(&self) -> &[String] {
        &self.blocks
    }

    pub fn label(&self) -> String {
        if self.blocks.len() == 1 {
            self.blocks[0].clone()
        } else {
            format!("blkdiag({})", self.blocks.join(", "))
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m.set(i, j, m.get(i, j) + v);
        }
        m
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(DstError::Dimension {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        Ok(y)
    }

    /// `self · rhs`.
    pub fn left_mul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if rhs.rows != self.dim {
            return Err(DstError::Dimension {
                expected: self.dim,
                found: rhs.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.dim, rhs.cols);
        for &(i, j, v) in &self.entries {
            for c in 0..rhs.cols {
                let cur = out.get(i, c);
                out.set(i, c, cur + v * rhs.get(j, c));
            }
        }
        Ok(out)
    }

    pub fn max_nonzeros_per_row(&self) -> usize {
        let mut counts = vec![0usize; self.dim];
        self.entries.iter().for_each(|&(i, _, _)| counts[i] += 1);
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn max_nonzeros_per_col(&self) -> usize {
        let mut counts = vec![0usize; self.dim];
        self.entries.iter().for_each(|&(_, j, _)| counts[j] += 1);
        counts.into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for SparseFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Left-to-right product of a factor chain.
pub fn chain_product(factors: &[SparseFactor]) -> Result<DenseMatrix> {
    let dim = factors.first().map_or(0, SparseFactor::dim);
    factors
        .iter()
        .rev()
        .try_fold(DenseMatrix::identity(dim), |acc, f| f.left_mul(&acc))
}

/// The sparse operators, by their matrix definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    /// `Ĩ`
    Reversal,
    /// `D = diag((-1)^k)`
    SignAlternation,
    /// `P`
    EvenOdd,
    /// `P^T`
    EvenOddTranspose,
    /// `√2·H_n`
    Sqrt2H,
    /// `√2·H_n^T`
    Sqrt2HTranspose,
    /// `√2·Ĥ_{n-1}`; its size argument is the odd dimension `n - 1`.
    Sqrt2HHat,
    /// `√2·V_n`
    Sqrt2V,
    /// `Q_n`
    Q,
}

impl KernelId {
    pub fn label(self) -> &'static str {
        match self {
            Self::Reversal => "I_rev",
            Self::SignAlternation => "D",
            Self::EvenOdd => "P",
            Self::EvenOddTranspose => "P_T",
            Self::Sqrt2H => "sqrt2_H",
            Self::Sqrt2HTranspose => "sqrt2_H_T",
            Self::Sqrt2HHat => "sqrt2_Hhat",
            Self::Sqrt2V => "sqrt2_V",
            Self::Q => "Q",
        }
    }
}

impl FromStr for KernelId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            Self::Reversal,
            Self::SignAlternation,
            Self::EvenOdd,
            Self::EvenOddTranspose,
            Self::Sqrt2H,
            Self::Sqrt2HTranspose,
            Self::Sqrt2HHat,
            Self::Sqrt2V,
            Self::Q,
        ]
        .into_iter()
        .find(|k| k.label() == s)
        .ok_or_else(|| format!("unknown kernel '{s}'"))
    }
}

fn size_err(len: usize, constraint: &'static str) -> DstError {
    DstError::Size { len, constraint }
}

fn reversal_matrix(m: usize) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, j| if i + j + 1 == m { 1.0 } else { 0.0 })
}

fn sign_matrix(m: usize) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, j| match (i == j, i % 2) {
        (true, 0) => 1.0,
        (true, _) => -1.0,
        _ => 0.0,
    })
}

fn even_odd_matrix(m: usize) -> DenseMatrix {
    // row r picks x_{order[r]}: evens then odds
    let order: Vec<usize> = (0..m).step_by(2).chain((1..m).step_by(2)).collect();
    DenseMatrix::from_fn(m, m, |i, j| if order[i] == j { 1.0 } else { 0.0 })
}

fn scaled_identity(m: usize, v: f64) -> DenseMatrix {
    DenseMatrix::identity(m).scaled(v)
}

/// Places `blocks[r][c]` into a grid; `None` is a zero block. Block sizes are
/// taken from the first present block in each block-row/-column.
fn assemble(
    row_sizes: &[usize],
    col_sizes: &[usize],
    blocks: &[Vec<Option<DenseMatrix>>],
) -> DenseMatrix {
    let rows = row_sizes.iter().sum();
    let cols = col_sizes.iter().sum();
    let mut out = DenseMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for (br, rs) in row_sizes.iter().enumerate() {
        let mut c0 = 0;
        for (bc, cs) in col_sizes.iter().enumerate() {
            if let Some(b) = &blocks[br][bc] {
                assert_eq!((b.rows, b.cols), (*rs, *cs), "block shape");
                for i in 0..*rs {
                    for j in 0..*cs {
                        out.set(r0 + i, c0 + j, b.get(i, j));
                    }
                }
            }
            c0 += cs;
        }
        r0 += rs;
    }
    out
}

fn sqrt2_h_matrix(n: usize) -> DenseMatrix {
    let h = n / 2;
    let i = DenseMatrix::identity(h);
    let j = reversal_matrix(h);
    assemble(
        &[h, h],
        &[h, h],
        &[
            vec![Some(i.clone()), Some(j.clone())],
            vec![Some(i), Some(j.scaled(-1.0))],
        ],
    )
}

fn sqrt2_hhat_matrix(m: usize) -> DenseMatrix {
    let h = m.div_ceil(2) - 1;
    let i = DenseMatrix::identity(h);
    let j = reversal_matrix(h);
    let mid = scaled_identity(1, SQRT_2);
    assemble(
        &[h, 1, h],
        &[h, 1, h],
        &[
            vec![Some(i.clone()), None, Some(j.clone())],
            vec![None, Some(mid), None],
            vec![Some(i), None, Some(j.scaled(-1.0))],
        ],
    )
}

fn sqrt2_v_matrix(n: usize) -> DenseMatrix {
    let h = n / 2;
    let q = h - 1;
    let i = DenseMatrix::identity(q);
    let inner = assemble(
        &[q, q],
        &[q, q],
        &[
            vec![Some(i.clone()), Some(i.scaled(-1.0))],
            vec![Some(i.scaled(-1.0)), Some(i.scaled(-1.0))],
        ],
    );
    let outer = DenseMatrix::block_diag(&[
        &scaled_identity(1, SQRT_2),
        &inner,
        &scaled_identity(1, -SQRT_2),
    ]);
    let right = DenseMatrix::block_diag(&[&reversal_matrix(h), &sign_matrix(h)]);
    outer.matmul(&right).expect("square blocks")
}

fn q_matrix(n: usize) -> DenseMatrix {
    let h = n / 2;
    let angle = |k: usize| (2 * k + 1) as f64 * PI / (4 * n) as f64;
    let diag = |f: &dyn Fn(usize) -> f64| {
        DenseMatrix::from_fn(h, h, |i, j| if i == j { f(i) } else { 0.0 })
    };
    let ds = diag(&|k| angle(k).sin());
    let dc = diag(&|k| angle(k).cos());
    let ds_rev = diag(&|k| angle(h - 1 - k).sin());
    let j = reversal_matrix(h);
    let inner = assemble(
        &[h, h],
        &[h, h],
        &[
            vec![Some(ds), Some(dc.matmul(&j).expect("square"))],
            vec![
                Some(j.matmul(&dc).expect("square").scaled(-1.0)),
                Some(ds_rev),
            ],
        ],
    );
    let left = DenseMatrix::block_diag(&[&sign_matrix(h), &DenseMatrix::identity(h)]);
    left.matmul(&inner).expect("square blocks")
}

/// Dense materialization of one sparse operator of dimension `size`.
pub fn build_kernel_matrix(id: KernelId, size: usize) -> Result<DenseMatrix> {
    let even = |min: usize, what: &'static str| {
        if size < min || !size.is_multiple_of(2) {
            Err(size_err(size, what))
        } else {
            Ok(())
        }
    };
    match id {
        KernelId::Reversal
        | KernelId::SignAlternation
        | KernelId::EvenOdd
        | KernelId::EvenOddTranspose => {
            if size == 0 {
                return Err(size_err(0, "matrix dimension must be >= 1"));
            }
        }
        KernelId::Sqrt2H | KernelId::Sqrt2HTranspose | KernelId::Q => {
            even(2, "dimension must be even and >= 2")?
        }
        KernelId::Sqrt2V => even(4, "dimension must be even and >= 4")?,
        KernelId::Sqrt2HHat => {
            if log2_exact(size + 1).is_none() {
                return Err(size_err(size, "dimension+1 must be a power of two"));
            }
        }
    }
    Ok(match id {
        KernelId::Reversal => reversal_matrix(size),
        KernelId::SignAlternation => sign_matrix(size),
        KernelId::EvenOdd => even_odd_matrix(size),
        KernelId::EvenOddTranspose => even_odd_matrix(size).transpose(),
        KernelId::Sqrt2H => sqrt2_h_matrix(size),
        KernelId::Sqrt2HTranspose => sqrt2_h_matrix(size).transpose(),
        KernelId::Sqrt2HHat => sqrt2_hhat_matrix(size),
        KernelId::Sqrt2V => sqrt2_v_matrix(size),
        KernelId::Q => q_matrix(size),
    })
}

fn kernel_factor(id: KernelId, size: usize, label: String) -> SparseFactor {
    let m = build_kernel_matrix(id, size).expect("sizes produced by the recursion are valid");
    SparseFactor::from_dense(label, &m)
}

/// Base-case matrices of the scaled recursions.
fn base_factor(kind: TransformKind) -> SparseFactor {
    match kind {
        TransformKind::Dst1 => SparseFactor::from_dense("MS1_1", &scaled_identity(1, SQRT_2)),
        TransformKind::Dst2 | TransformKind::Dst3 => {
            let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
            let label = if kind == TransformKind::Dst2 {
                "MS2_2"
            } else {
                "MS3_2"
            };
            SparseFactor::from_dense(label, &m)
        }
        TransformKind::Dst4 => {
            let (s, c) = (PI / 8.0).sin_cos();
            let m = DenseMatrix::from_rows(&[vec![s, c], vec![c, -s]]).scaled(SQRT_2);
            SparseFactor::from_dense("MS4_2", &m)
        }
    }
}

struct Chain {
    /// Factors left of the base layer, outermost first.
    post: Vec<SparseFactor>,
    base: SparseFactor,
    /// Factors right of the base layer, innermost first.
    pre: Vec<SparseFactor>,
}

impl Chain {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn beside(a: Chain, b: Chain) -> Chain {
        let (da, db) = (a.dim(), b.dim());
        let layer = |x: Option<&SparseFactor>, y: Option<&SparseFactor>| {
            let ia = SparseFactor::identity(da);
            let ib = SparseFactor::identity(db);
            SparseFactor::block_diag(&[x.unwrap_or(&ia), y.unwrap_or(&ib)])
        };
        // post: aligned at the outer end, identities pad next to the base
        let post_len = a.post.len().max(b.post.len());
        let post = (0..post_len)
            .map(|i| layer(a.post.get(i), b.post.get(i)))
            .collect();
        // pre: aligned at the outer end as well
        let pre_len = a.pre.len().max(b.pre.len());
        let pre = (0..pre_len)
            .map(|i| {
                fn pick(v: &[SparseFactor], i: usize, pre_len: usize) -> Option<&SparseFactor> {
                    (i + v.len()).checked_sub(pre_len).map(|k| &v[k])
                }
                layer(pick(&a.pre, i, pre_len), pick(&b.pre, i, pre_len))
            })
            .collect();
        Chain {
            post,
            base: SparseFactor::block_diag(&[&a.base, &b.base]),
            pre,
        }
    }

    fn into_factors(self) -> Vec<SparseFactor> {
        let mut out = self.post;
        out.push(self.base);
        out.extend(self.pre);
        out
    }
}

fn unroll(kind: TransformKind, n: usize) -> Chain {
    use TransformKind::*;
    if n == 2 {
        return Chain {
            post: Vec::new(),
            base: base_factor(kind),
            pre: Vec::new(),
        };
    }
    let h = n / 2;
    let (top, bottom) = match kind {
        Dst1 => (Dst3, Dst1),
        Dst2 => (Dst4, Dst2),
        Dst3 => (Dst4, Dst3),
        Dst4 => (Dst2, Dst2),
    };
    let inner = Chain::beside(unroll(top, h), unroll(bottom, h));
    let m = kind.signal_len(n);
    let (own_post, own_pre) = match kind {
        Dst1 => (
            vec![kernel_factor(
                KernelId::EvenOddTranspose,
                m,
                format!("P_{m}^T"),
            )],
            kernel_factor(KernelId::Sqrt2HHat, m, format!("sqrt2_Hhat_{m}")),
        ),
        Dst2 => (
            vec![kernel_factor(
                KernelId::EvenOddTranspose,
                n,
                format!("P_{n}^T"),
            )],
            kernel_factor(KernelId::Sqrt2H, n, format!("sqrt2_H_{n}")),
        ),
        Dst3 => (
            vec![kernel_factor(
                KernelId::Sqrt2HTranspose,
                n,
                format!("sqrt2_H_{n}^T"),
            )],
            kernel_factor(KernelId::EvenOdd, n, format!("P_{n}")),
        ),
        Dst4 => (
            vec![
                kernel_factor(KernelId::EvenOddTranspose, n, format!("P_{n}^T")),
                kernel_factor(KernelId::Sqrt2V, n, format!("sqrt2_V_{n}")),
            ],
            kernel_factor(KernelId::Q, n, format!("Q_{n}")),
        ),
    };
    let mut post = own_post;
    post.extend(inner.post);
    let mut pre = inner.pre;
    pre.push(own_pre);
    Chain {
        post,
        base: inner.base,
        pre,
    }
}

/// Fully unrolled factor chain of `√n · S` for `kind`; the left-to-right
/// product of the returned factors is the scaled transform matrix.
pub fn materialize_factors(kind: TransformKind, n: usize) -> Result<Vec<SparseFactor>> {
    log2_exact(n).ok_or(DstError::Size {
        len: n,
        constraint: "transform size n must be a power of two >= 2",
    })?;
    Ok(unroll(kind, n).into_factors())
}

#[cfg(test)]
mod tests {
    use super::*;
    use TransformKind::*;

    #[test]
    fn small_scaled_matrices() {
        let m = build_matrix(Dst2, 2, ScaleMode::Scaled).unwrap();
        let want = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        assert!(m.max_abs_diff(&want) <= 1e-15);

        let (s, c) = (PI / 8.0).sin_cos();
        let m = build_matrix(Dst4, 2, ScaleMode::Scaled).unwrap();
        let want = DenseMatrix::from_rows(&[vec![s, c], vec![c, -s]]).scaled(SQRT_2);
        assert!(m.max_abs_diff(&want) <= 1e-15);

        let m = build_matrix(Dst1, 4, ScaleMode::Scaled).unwrap();
        let want = DenseMatrix::from_rows(&[
            vec![1.0, SQRT_2, 1.0],
            vec![SQRT_2, 0.0, -SQRT_2],
            vec![1.0, -SQRT_2, 1.0],
        ]);
        assert!(m.max_abs_diff(&want) <= 1e-15);
        assert!(build_matrix(Dst1, 6, ScaleMode::Scaled).is_err());
    }

    #[test]
    fn matvec_examples() {
        let id = DenseMatrix::identity(3);
        assert_eq!(matvec(&id, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let h = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        assert_eq!(matvec(&h, &[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(
            matvec(&h, &[1.0]),
            Err(DstError::Dimension {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn dst3_is_transpose_of_dst2() {
        for t in 1..=8 {
            let n = 1 << t;
            for scale in [ScaleMode::Scaled, ScaleMode::Unitary] {
                let a = build_matrix(Dst3, n, scale).unwrap();
                let b = build_matrix(Dst2, n, scale).unwrap().transpose();
                assert_eq!(a.max_abs_diff(&b), 0.0);
            }
        }
    }

    #[test]
    fn displayed_kernel_matrices() {
        let r2 = SQRT_2;
        let v4 = build_kernel_matrix("sqrt2_V".parse().unwrap(), 4).unwrap();
        let want = DenseMatrix::from_rows(&[
            vec![0.0, r2, 0.0, 0.0],
            vec![1.0, 0.0, -1.0, 0.0],
            vec![-1.0, 0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.0, r2],
        ]);
        assert_eq!(v4.max_abs_diff(&want), 0.0);

        let hh = build_kernel_matrix("sqrt2_Hhat".parse().unwrap(), 3).unwrap();
        let want = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, r2, 0.0],
            vec![1.0, 0.0, -1.0],
        ]);
        assert_eq!(hh.max_abs_diff(&want), 0.0);

        let q4 = build_kernel_matrix(KernelId::Q, 4).unwrap();
        let (s1, c1) = (PI / 16.0).sin_cos();
        let (s3, c3) = (3.0 * PI / 16.0).sin_cos();
        let want = DenseMatrix::from_rows(&[
            vec![s1, 0.0, 0.0, c1],
            vec![0.0, -s3, -c3, 0.0],
            vec![0.0, -c3, s3, 0.0],
            vec![-c1, 0.0, 0.0, s1],
        ]);
        assert!(q4.max_abs_diff(&want) <= 1e-16);
        assert!("nope".parse::<KernelId>().is_err());
        assert!(build_kernel_matrix(KernelId::Sqrt2V, 2).is_err());
        assert!(build_kernel_matrix(KernelId::Sqrt2HHat, 4).is_err());
    }

    #[test]
    fn factor_chain_shapes() {
        let f = materialize_factors(Dst2, 8).unwrap();
        let labels: Vec<String> = f.iter().map(SparseFactor::label).collect();
        assert_eq!(
            labels,
            vec![
                "P_8^T",
                "blkdiag(P_4^T, P_4^T)",
                "blkdiag(sqrt2_V_4, I_4)",
                "blkdiag(MS2_2, MS2_2, MS4_2, MS2_2)",
                "blkdiag(Q_4, sqrt2_H_4)",
                "sqrt2_H_8",
            ]
        );
        let f = materialize_factors(Dst4, 2).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].label(), "MS4_2");
    }

    #[test]
    fn chain_products_match_definition() {
        for kind in TransformKind::ALL {
            for t in 1..=6 {
                let n = 1 << t;
                let prod = chain_product(&materialize_factors(kind, n).unwrap()).unwrap();
                let want = build_matrix(kind, n, ScaleMode::Scaled).unwrap();
                let err = prod.max_abs_diff(&want);
                assert!(err <= 1e-12, "{kind} n={n} err={err:e}");
            }
        }
    }

    #[test]
    fn factors_are_sparse() {
        for kind in TransformKind::ALL {
            for f in materialize_factors(kind, 64).unwrap() {
                assert!(f.max_nonzeros_per_row() <= 2, "{kind} {}", f.label());
                assert!(f.max_nonzeros_per_col() <= 2, "{kind} {}", f.label());
            }
        }
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let f = materialize_factors(Dst4, 16).unwrap();
        let x: Vec<f64> = (0..16).map(|i| (i as f64).cos()).collect();
        for factor in &f {
            let a = factor.apply(&x).unwrap();
            let b = matvec(&factor.to_dense(), &x).unwrap();
            assert_eq!(a, b);
        }
    }
}
