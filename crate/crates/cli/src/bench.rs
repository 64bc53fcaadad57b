//! Timing for `rdst bench`.

use std::hint::black_box;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rdst::oracle::{build_matrix, matvec};
use rdst::{DstPlan, ScaleMode, TransformKind};

/// Largest `t` accepted by `bench`.
pub const MAX_BENCH_T: usize = 16;

/// Largest `t` timed against the dense matrix.
pub const MAX_DENSE_T: usize = 12;

/// Smallest size used for the growth-rate check.
pub const GROWTH_MIN_N: usize = 512;

const MAX_SIGNALS: usize = 8;
const SAMPLES_PER_REP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub plan_ns: f64,
    pub exec_ns: f64,
    pub dense_ns: Option<f64>,
}

impl BenchRow {
    /// Samples per second of the planned transform, in millions.
    pub fn throughput_msps(&self, len: usize) -> f64 {
        len as f64 / self.exec_ns * 1e3
    }

    /// Cost of building a plan per call over reusing one.
    pub fn reuse_ratio(&self) -> f64 {
        (self.plan_ns + self.exec_ns) / self.exec_ns
    }

    pub fn dense_speedup(&self) -> Option<f64> {
        self.dense_ns.map(|d| d / self.exec_ns)
    }
}

fn elapsed_ns(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e9
}

pub fn measure(kind: TransformKind, n: usize, reps: usize) -> rdst::Result<BenchRow> {
    let start = Instant::now();
    for _ in 0..reps {
        black_box(DstPlan::new(kind, black_box(n))?);
    }
    let plan_ns = elapsed_ns(start) / reps as f64;

    let mut plan = DstPlan::new(kind, n)?;
    let len = plan.len();
    let mut rng = StdRng::seed_from_u64(n as u64);
    let signals: Vec<Vec<f64>> = (0..reps.min(MAX_SIGNALS))
        .map(|_| (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let mut out = vec![0.0; len];
    let batch = (SAMPLES_PER_REP / n).max(1);
    let start = Instant::now();
    for r in 0..reps {
        let x = &signals[r % signals.len()];
        for _ in 0..batch {
            plan.scaled(black_box(x), &mut out)?;
            black_box(&out);
        }
    }
    let exec_ns = elapsed_ns(start) / (reps * batch) as f64;

    let dense_ns = if n <= 1 << MAX_DENSE_T {
        let m = build_matrix(kind, n, ScaleMode::Scaled)?;
        let dense_reps = reps.min(MAX_SIGNALS);
        let start = Instant::now();
        for x in signals.iter().cycle().take(dense_reps) {
            black_box(matvec(&m, black_box(x))?);
        }
        Some(elapsed_ns(start) / dense_reps as f64)
    } else {
        None
    };
    Ok(BenchRow {
        n,
        plan_ns,
        exec_ns,
        dense_ns,
    })
}

/// Least-squares slope of `log(exec time)` against `log(n)` over rows with
/// `n >= GROWTH_MIN_N`; `None` with fewer than two such rows.
pub fn growth_exponent(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= GROWTH_MIN_N)
        .map(|r| ((r.n as f64).ln(), r.exec_ns.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, exec_ns: f64) -> BenchRow {
        BenchRow {
            n,
            plan_ns: 10.0,
            exec_ns,
            dense_ns: None,
        }
    }

    #[test]
    fn slope_of_power_law() {
        let rows: Vec<BenchRow> = (9..=12)
            .map(|t| row(1 << t, ((1u64 << t) as f64).powi(2)))
            .collect();
        assert!((growth_exponent(&rows).unwrap() - 2.0).abs() < 1e-12);
        assert!(growth_exponent(&rows[..1]).is_none());
        assert!(growth_exponent(&[row(64, 1.0), row(128, 2.0)]).is_none());
    }

    #[test]
    fn ratios() {
        let r = row(8, 20.0);
        assert_eq!(r.reuse_ratio(), 1.5);
        assert_eq!(r.throughput_msps(8), 400.0);
    }
}
