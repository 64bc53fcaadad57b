//! Command-line front end for the `rdst` transforms.
//!
//! Standard output carries only the requested data; counts and diagnostics
//! go to standard error. Exit status: 0 success, 1 verification failure,
//! 2 usage, size or parse error.

pub mod bench;
pub mod signal;
pub mod verify;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rdst::opcount::{table_csv, MAX_TABLE_T};
use rdst::{
    build_flowgraph, count_table, export_dot, idst_scaled, DstPlan, ScaleMode, TransformKind,
};

use verify::{PlanFactory, MAX_VERIFY_T};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// A command outcome other than success.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, sizes or input files.
    Usage(anyhow::Error),
    /// A check ran and did not hold.
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Check(_) => EXIT_VERIFY,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<rdst::DstError> for Failure {
    fn from(e: rdst::DstError) -> Self {
        Failure::Usage(e.into())
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Debug, Parser)]
#[command(
    name = "rdst",
    version,
    about = "Fast recursive discrete sine transforms (DST I-IV)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transform a signal file.
    Transform(TransformArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
    /// Emit the operation-count table as CSV.
    CountTable(CountTableArgs),
    /// Write the signal flow graph in DOT format.
    Graph(GraphArgs),
    /// Time planned execution against the dense definition.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Scaled,
    Unitary,
}

impl From<Scale> for ScaleMode {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Scaled => ScaleMode::Scaled,
            Scale::Unitary => ScaleMode::Unitary,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Transform type: 1, 2, 3 or 4.
    #[arg(long, value_parser = parse_kind)]
    pub kind: TransformKind,
    #[arg(long, value_enum, default_value_t = Scale::Unitary)]
    pub scale: Scale,
    /// Apply the inverse transform instead.
    #[arg(long)]
    pub inverse: bool,
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub t_max: usize,
}

#[derive(Debug, Args)]
pub struct CountTableArgs {
    #[arg(long, default_value_t = 12)]
    pub t_max: usize,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: TransformKind,
    #[arg(long)]
    pub n: usize,
    /// Leave outputs in the order the butterfly network produces them.
    #[arg(long)]
    pub bit_reversed: bool,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_kind, default_value = "2")]
    pub kind: TransformKind,
    #[arg(long, default_value_t = 12)]
    pub t_max: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
}

fn parse_kind(s: &str) -> Result<TransformKind, String> {
    s.parse::<TransformKind>().map_err(|e| e.to_string())
}

fn check_range(name: &str, value: usize, min: usize, max: usize) -> anyhow::Result<()> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        bail!("--{name} = {value} out of range [{min}, {max}]")
    }
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .context("writing standard output")?;
            out.flush().context("writing standard output")
        }
    }
}

pub fn cmd_transform(args: &TransformArgs) -> CmdResult {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let x = signal::parse_signal(&text).map_err(|e| anyhow!("{}: {e}", args.input.display()))?;
    let n = args.kind.size_for_len(x.len())?;
    let plan_kind = if args.inverse {
        args.kind.inverse()
    } else {
        args.kind
    };
    let mut plan = DstPlan::new(plan_kind, n)?;
    let mut y = vec![0.0; x.len()];
    let counts = match (args.inverse, args.scale) {
        (true, Scale::Scaled) => {
            let (out, counts) = idst_scaled(args.kind, &mut plan, &x)?;
            y = out;
            counts
        }
        // the unitary inverse is the unitary transform of the inverse kind
        _ => plan.process(&x, &mut y, args.scale.into())?,
    };
    write_output(args.output.as_deref(), &signal::format_signal(&y))?;
    let total = counts.total();
    eprintln!(
        "{}{} n={} len={}: adds={} mults={} (transform {}+{}, normalization {}+{})",
        if args.inverse { "inverse " } else { "" },
        args.kind,
        n,
        x.len(),
        total.adds,
        total.mults,
        counts.transform.adds,
        counts.transform.mults,
        counts.normalization.adds,
        counts.normalization.mults,
    );
    Ok(())
}

/// `verify` with a caller-supplied plan factory.
pub fn cmd_verify_with(args: &VerifyArgs, factory: PlanFactory) -> CmdResult {
    check_range("t-max", args.t_max, 1, MAX_VERIFY_T)?;
    let reports = verify::run_suites(args.t_max, factory);
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.render());
        text.push('\n');
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name)
        .collect();
    text.push_str(&format!(
        "verify t-max={}: {}\n",
        args.t_max,
        if failed.is_empty() {
            "all suites passed".to_string()
        } else {
            format!("FAILED {}", failed.join(", "))
        }
    ));
    print!("{text}");
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "failed suites: {}",
            failed.join(", ")
        )))
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    cmd_verify_with(args, &verify::default_factory)
}

pub fn cmd_count_table(args: &CountTableArgs) -> CmdResult {
    check_range("t-max", args.t_max, 1, MAX_TABLE_T)?;
    let rows = count_table(args.t_max)?;
    let mut mismatches = Vec::new();
    for r in &rows {
        let mut plan = DstPlan::new(r.kind, r.n)?;
        let x = vec![1.0; plan.len()];
        let mut y = vec![0.0; plan.len()];
        let got = plan.scaled(&x, &mut y)?;
        let (da, dm) = (
            got.adds as i64 - r.adds as i64,
            got.mults as i64 - r.mults as i64,
        );
        if da != 0 || dm != 0 {
            mismatches.push(format!("{},{}: adds {da:+}, mults {dm:+}", r.kind, r.n));
        }
    }
    write_output(args.output.as_deref(), &table_csv(&rows))?;
    if mismatches.is_empty() {
        eprintln!(
            "measured-vs-formula: all differences zero ({} rows)",
            rows.len()
        );
        Ok(())
    } else {
        for m in &mismatches {
            eprintln!("measured-vs-formula: {m}");
        }
        Err(Failure::Check(format!(
            "{} rows differ from the formulas",
            mismatches.len()
        )))
    }
}

pub fn cmd_graph(args: &GraphArgs) -> CmdResult {
    let g = build_flowgraph(args.kind, args.n, args.bit_reversed)?;
    write_output(args.output.as_deref(), &export_dot(&g))?;
    eprintln!(
        "{} n={}: {} nodes, {} edges, {} adders, {} multiplier edges",
        args.kind,
        args.n,
        g.nodes.len(),
        g.edges.len(),
        g.additions(),
        g.multiplications()
    );
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> CmdResult {
    check_range("t-max", args.t_max, 1, bench::MAX_BENCH_T)?;
    if args.reps == 0 {
        return Err(Failure::Usage(anyhow!("--reps must be at least 1")));
    }
    let mut text =
        String::from("kind,n,plan_ns,exec_ns,throughput_msps,reuse_ratio,dense_ns,dense_speedup\n");
    let mut rows = Vec::new();
    for t in 1..=args.t_max {
        let n = 1usize << t;
        let row = bench::measure(args.kind, n, args.reps)?;
        let fmt_opt =
            |v: Option<f64>, digits: usize| v.map_or(String::new(), |v| format!("{v:.digits$}"));
        text.push_str(&format!(
            "{},{},{:.1},{:.1},{:.2},{:.2},{},{}\n",
            args.kind,
            n,
            row.plan_ns,
            row.exec_ns,
            row.throughput_msps(args.kind.signal_len(n)),
            row.reuse_ratio(),
            fmt_opt(row.dense_ns, 1),
            fmt_opt(row.dense_speedup(), 1),
        ));
        rows.push(row);
    }
    write_output(None, &text)?;
    let mut problems = Vec::new();
    match bench::growth_exponent(&rows) {
        Some(slope) => {
            eprintln!(
                "growth exponent for n >= {}: {slope:.2}",
                bench::GROWTH_MIN_N
            );
            if slope >= 2.0 {
                problems.push(format!("execution time grows like n^{slope:.2}"));
            }
        }
        None => eprintln!(
            "growth exponent: needs two sizes >= {}",
            bench::GROWTH_MIN_N
        ),
    }
    for r in rows.iter().filter(|r| r.n >= bench::GROWTH_MIN_N) {
        if let Some(s) = r.dense_speedup() {
            if s <= 1.0 {
                problems.push(format!(
                    "n={} is not faster than the dense product ({s:.2}x)",
                    r.n
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        let msg = problems.join("; ");
        eprintln!("bench: {msg}");
        Err(Failure::Check(msg))
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Transform(a) => cmd_transform(a),
        Command::Verify(a) => cmd_verify(a),
        Command::CountTable(a) => cmd_count_table(a),
        Command::Graph(a) => cmd_graph(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(e) => eprintln!("error: {e:#}"),
                Failure::Check(msg) => eprintln!("verification failed: {msg}"),
            }
            f.exit_code()
        }
    }
}
