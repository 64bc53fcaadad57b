//! Self-check suites run by `rdst verify`.

use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rdst::opcount::closed_form_counts;
use rdst::oracle::{build_matrix, chain_product, materialize_factors, matvec};
use rdst::{DstPlan, ScaleMode, TransformKind};

/// Largest `t` accepted by `verify`.
pub const MAX_VERIFY_T: usize = 12;

/// Largest `t` whose factor chain is multiplied out densely.
pub const MAX_CHAIN_T: usize = 7;

/// Largest `t` compared against a dense matrix.
pub const MAX_DENSE_T: usize = 10;

const VECTORS_PER_CELL: usize = 4;

/// Builds the plans under test; swapping it out lets tests check that a
/// broken build is caught.
pub type PlanFactory<'a> = &'a dyn Fn(TransformKind, usize) -> rdst::Result<DstPlan>;

pub fn default_factory(kind: TransformKind, n: usize) -> rdst::Result<DstPlan> {
    DstPlan::new(kind, n)
}

/// One failing `(kind, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub kind: TransformKind,
    pub n: usize,
    pub detail: String,
}

impl fmt::Display for CellFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}: {}", self.kind, self.n, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<CellFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One summary line plus one line per failure.
    pub fn render(&self) -> String {
        let mut out = if self.passed() {
            format!("{}: PASS ({} checks)", self.name, self.checks)
        } else {
            format!(
                "{}: FAIL ({} of {} checks failed)",
                self.name,
                self.failures.len(),
                self.checks
            )
        };
        for f in &self.failures {
            out.push_str(&format!("\n  {f}"));
        }
        out
    }
}

fn random_vector(rng: &mut StdRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

struct Suite {
    report: SuiteReport,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            report: SuiteReport {
                name,
                checks: 0,
                failures: Vec::new(),
            },
        }
    }

    fn check(&mut self, kind: TransformKind, n: usize, outcome: Result<(), String>) {
        self.report.checks += 1;
        if let Err(detail) = outcome {
            self.report.failures.push(CellFailure { kind, n, detail });
        }
    }
}

fn cells(t_max: usize) -> impl Iterator<Item = (TransformKind, usize)> {
    TransformKind::ALL
        .into_iter()
        .flat_map(move |k| (1..=t_max).map(move |t| (k, 1usize << t)))
}

fn oracle_equivalence(t_max: usize, factory: PlanFactory) -> SuiteReport {
    let mut suite = Suite::new("oracle-equivalence");
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for (kind, n) in cells(t_max.min(MAX_DENSE_T)) {
        let outcome = (|| {
            let m = build_matrix(kind, n, ScaleMode::Scaled).map_err(|e| e.to_string())?;
            let mut plan = factory(kind, n).map_err(|e| e.to_string())?;
            let mut y = vec![0.0; plan.len()];
            let tol = 1e-10 * (n as f64).sqrt();
            let mut worst = 0.0f64;
            for _ in 0..VECTORS_PER_CELL {
                let x = random_vector(&mut rng, plan.len());
                plan.scaled(&x, &mut y).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs_diff(
                    &y,
                    &matvec(&m, &x).map_err(|e| e.to_string())?,
                ));
            }
            if worst <= tol {
                Ok(())
            } else {
                Err(format!("max-error={worst:.3e} exceeds {tol:.1e}"))
            }
        })();
        suite.check(kind, n, outcome);
    }
    suite.report
}

fn factor_product(t_max: usize) -> SuiteReport {
    let mut suite = Suite::new("factor-product");
    for (kind, n) in cells(t_max.min(MAX_CHAIN_T)) {
        let outcome = (|| {
            let factors = materialize_factors(kind, n).map_err(|e| e.to_string())?;
            let prod = chain_product(&factors).map_err(|e| e.to_string())?;
            let want = build_matrix(kind, n, ScaleMode::Scaled).map_err(|e| e.to_string())?;
            let err = prod.max_abs_diff(&want);
            if err <= 1e-12 {
                Ok(())
            } else {
                Err(format!("max-error={err:.3e}"))
            }
        })();
        suite.check(kind, n, outcome);
    }
    suite.report
}

fn orthogonality(t_max: usize, factory: PlanFactory) -> SuiteReport {
    let mut suite = Suite::new("orthogonality");
    let mut rng = StdRng::seed_from_u64(0x0e7a);
    for (kind, n) in cells(t_max) {
        let outcome = (|| {
            let mut fwd = factory(kind, n).map_err(|e| e.to_string())?;
            let mut inv = factory(kind.inverse(), n).map_err(|e| e.to_string())?;
            let x = random_vector(&mut rng, fwd.len());
            let mut y = vec![0.0; x.len()];
            let mut back = vec![0.0; x.len()];
            fwd.unitary(&x, &mut y).map_err(|e| e.to_string())?;
            inv.unitary(&y, &mut back).map_err(|e| e.to_string())?;
            let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let drift = (norm(&y) - norm(&x)).abs();
            let err = max_abs_diff(&x, &back);
            if drift > 1e-10 {
                Err(format!("norm changed by {drift:.3e}"))
            } else if err > 1e-10 {
                Err(format!("round-trip max-error={err:.3e}"))
            } else {
                Ok(())
            }
        })();
        suite.check(kind, n, outcome);
    }
    suite.report
}

fn exact_counts(t_max: usize, factory: PlanFactory) -> SuiteReport {
    let mut suite = Suite::new("exact-count");
    for (kind, n) in cells(t_max) {
        let outcome = (|| {
            let mut plan = factory(kind, n).map_err(|e| e.to_string())?;
            let x = vec![1.0; plan.len()];
            let mut y = vec![0.0; plan.len()];
            let got = plan.scaled(&x, &mut y).map_err(|e| e.to_string())?;
            let want = closed_form_counts(kind, n)
                .map_err(|e| e.to_string())?
                .op_count();
            if got == want {
                Ok(())
            } else {
                Err(format!(
                    "measured ({}, {}) vs closed form ({}, {})",
                    got.adds, got.mults, want.adds, want.mults
                ))
            }
        })();
        suite.check(kind, n, outcome);
    }
    suite.report
}

/// Runs every suite for `t = 1..=t_max`; `t_max` must already be in range.
pub fn run_suites(t_max: usize, factory: PlanFactory) -> Vec<SuiteReport> {
    vec![
        oracle_equivalence(t_max, factory),
        factor_product(t_max),
        orthogonality(t_max, factory),
        exact_counts(t_max, factory),
    ]
}
