//! Closed-form and recurrence arithmetic costs of the scaled recursions.
//!
//! Closed forms are evaluated exactly: every coefficient is carried as an
//! integer multiple of 1/18 and the result must divide out cleanly.

use std::fmt::Write as _;

use crate::error::{log2_exact, DstError, Result};
use crate::kernels::OpCount;
use crate::TransformKind;

pub const MAX_TABLE_T: usize = 20;

/// Additions and multiplications of the scaled transform at `n = 2^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountFormulaResult {
    pub kind: TransformKind,
    pub n: usize,
    pub t: u32,
    pub adds: u64,
    pub mults: u64,
}

impl CountFormulaResult {
    pub fn op_count(&self) -> OpCount {
        OpCount::new(self.adds, self.mults)
    }
}

fn size_of(n: usize) -> Result<u32> {
    log2_exact(n).ok_or(DstError::Size {
        len: n,
        constraint: "transform size n must be a power of two >= 2",
    })
}

/// 18 × (adds, mults) from the closed forms, exact.
fn closed_form_times_18(kind: TransformKind, n: usize, t: u32) -> (i128, i128) {
    let n = n as i128;
    let t = t as i128;
    let nt = n * t;
    let s: i128 = if t % 2 == 0 { 1 } else { -1 };
    match kind {
        TransformKind::Dst2 | TransformKind::Dst3 => {
            (24 * nt - 16 * n - 2 * s + 18, 12 * nt + 4 * n + 14 * s - 18)
        }
        TransformKind::Dst4 => (24 * nt - 4 * n + 4 * s, 12 * nt + 28 * n - 28 * s),
        TransformKind::Dst1 => (
            24 * nt - 28 * n + s - 18 * t + 27,
            12 * nt - 20 * n - 7 * s + 27,
        ),
    }
}

/// Evaluates the closed forms without the `t = 1` special case.
pub fn closed_form_counts(kind: TransformKind, n: usize) -> Result<CountFormulaResult> {
    let t = size_of(n)?;
    let (a18, m18) = closed_form_times_18(kind, n, t);
    if a18 % 18 != 0 || m18 % 18 != 0 || a18 < 0 || m18 < 0 {
        return Err(DstError::NonIntegral { kind, n });
    }
    Ok(CountFormulaResult {
        kind,
        n,
        t,
        adds: (a18 / 18) as u64,
        mults: (m18 / 18) as u64,
    })
}

fn initial_condition(kind: TransformKind) -> (u64, u64) {
    match kind {
        TransformKind::Dst1 => (0, 1),
        TransformKind::Dst2 | TransformKind::Dst3 => (2, 0),
        TransformKind::Dst4 => (2, 6),
    }
}

/// Cost of `kind` at size `n`: the closed forms for `t >= 2`, the stated
/// initial conditions at `t = 1`.
pub fn formula_counts(kind: TransformKind, n: usize) -> Result<CountFormulaResult> {
    let t = size_of(n)?;
    if t == 1 {
        let (adds, mults) = initial_condition(kind);
        return Ok(CountFormulaResult {
            kind,
            n,
            t,
            adds,
            mults,
        });
    }
    closed_form_counts(kind, n)
}

/// Cost of `kind` at size `n` by iterating the coupled recurrences upward
/// from the base cases.
pub fn recurrence_counts(kind: TransformKind, n: usize) -> Result<CountFormulaResult> {
    let t = size_of(n)?;
    let base = |k| {
        let (a, m) = initial_condition(k);
        OpCount::new(a, m)
    };
    let (mut c1, mut c2, mut c3, mut c4) = (
        base(TransformKind::Dst1),
        base(TransformKind::Dst2),
        base(TransformKind::Dst3),
        base(TransformKind::Dst4),
    );
    for level in 2..=t {
        let size = 1u64 << level;
        let butterfly = OpCount::new(size, 0);
        let hat = OpCount::new(size - 2, 1);
        let v = OpCount::new(size - 2, 2);
        let q = OpCount::new(size, 2 * size);
        let next1 = c1 + c3 + hat;
        let next2 = c2 + c4 + butterfly;
        let next3 = c3 + c4 + butterfly;
        let next4 = c2 + c2 + v + q;
        (c1, c2, c3, c4) = (next1, next2, next3, next4);
    }
    let c = match kind {
        TransformKind::Dst1 => c1,
        TransformKind::Dst2 => c2,
        TransformKind::Dst3 => c3,
        TransformKind::Dst4 => c4,
    };
    Ok(CountFormulaResult {
        kind,
        n,
        t,
        adds: c.adds,
        mults: c.mults,
    })
}

/// One line of the cost table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRow {
    pub kind: TransformKind,
    pub n: usize,
    pub adds: u64,
    pub mults: u64,
    /// `n · log2(n)`
    pub nlogn: u64,
}

/// Formula counts for every kind and `t = 1..=t_max`, kind-major.
pub fn count_table(t_max: usize) -> Result<Vec<CountRow>> {
    if !(1..=MAX_TABLE_T).contains(&t_max) {
        return Err(DstError::Range {
            name: "t_max",
            value: t_max,
            min: 1,
            max: MAX_TABLE_T,
        });
    }
    let mut rows = Vec::with_capacity(4 * t_max);
    for kind in TransformKind::ALL {
        for t in 1..=t_max {
            let n = 1usize << t;
            let c = formula_counts(kind, n)?;
            rows.push(CountRow {
                kind,
                n,
                adds: c.adds,
                mults: c.mults,
                nlogn: (n * t) as u64,
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "kind,n,adds,mults,nlogn";

/// CSV rendering with a header line; LF line endings.
pub fn table_csv(rows: &[CountRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.kind, r.n, r.adds, r.mults, r.nlogn);
    }
    out
}
