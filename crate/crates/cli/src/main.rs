//! `jlroa` command-line front end.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jlroa::algorithms::{hosvd_init, result_json, run_shopm, run_slroat, write_trace_csv};
use jlroa::experiments::{
    cmd_compare, cmd_condcheck, cmd_orderings, compare_plot, condcheck_plot, kofidis_report, orderings_plot,
    write_rows_csv, Algo, CompareParams, CondcheckParams, OrderingsParams,
};
use jlroa::io::load_tensor;
use jlroa::svg::Scatter;
use jlroa::tensor::{random_symmetric_from, EntryDistribution};
use jlroa::{random_ordering, run, Error, Init, OrderingRule, RunConfig, SymTensor};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "jlroa",
    version,
    about = "Low rank orthogonal approximation of symmetric tensors by Jacobi rotations"
)]
struct Cli {
    /// Master seed for generated tensors, orderings and trials.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory receiving report and plot files instead of stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Objective values closer than this count as equal.
    #[arg(long, global = true, default_value_t = jlroa::experiments::DEFAULT_EQ_TOL)]
    eq_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm on one tensor.
    Approx(ApproxArgs),
    /// Compare two algorithms over random tensors.
    Compare(CompareArgs),
    /// Run the cyclic method under random pair orderings on one tensor.
    Orderings(OrderingsArgs),
    /// Greedy runs at p = 2 followed by the nondegeneracy check.
    Condcheck(CondcheckArgs),
    /// Jacobi runs and the power method on the built-in Kofidis tensor.
    Kofidis(KofidisArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ApproxAlgo {
    #[value(alias = "jlroa")]
    Cyclic,
    /// Cyclic sweeps over a random pair ordering drawn from the seed.
    General,
    JacobiG,
    Shopm,
    Slroat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InitArg {
    Identity,
    Hosvd,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Gaussian,
    Uniform,
}

impl From<DistArg> for EntryDistribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Gaussian => EntryDistribution::Gaussian,
            DistArg::Uniform => EntryDistribution::Uniform,
        }
    }
}

#[derive(Args, Debug)]
struct ApproxArgs {
    /// Tensor JSON file, or `@kofidis` for the built-in example.
    #[arg(long, conflicts_with_all = ["n", "d"])]
    input: Option<String>,
    /// Dimension of a generated tensor.
    #[arg(long)]
    n: Option<usize>,
    /// Order of a generated tensor.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_enum, default_value_t = DistArg::Gaussian)]
    dist: DistArg,
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum, default_value_t = ApproxAlgo::Cyclic)]
    algo: ApproxAlgo,
    #[arg(long, value_enum, default_value_t = InitArg::Identity)]
    init: InitArg,
    /// Gradient tolerance for the Jacobi methods, step tolerance for the baselines.
    #[arg(long)]
    tol: Option<f64>,
    /// A sweep gaining at most this much in total stops the run; 0 stops only
    /// when a whole sweep leaves the objective unchanged.
    #[arg(long, default_value_t = jlroa::algorithms::DEFAULT_TOL_GAIN)]
    tol_gain: f64,
    #[arg(long, default_value_t = jlroa::algorithms::DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    /// Iteration cap; the baselines default to 2000.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Greedy selection threshold, at most 2/n.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Result JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace CSV path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value = "jlroa")]
    algo_a: Algo,
    #[arg(long, default_value = "slroat")]
    algo_b: Algo,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    #[arg(long, value_enum, default_value_t = InitArg::Hosvd)]
    jacobi_init: InitArg,
}

#[derive(Args, Debug)]
struct OrderingsArgs {
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
}

#[derive(Args, Debug)]
struct CondcheckArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Iteration budget per trial.
    #[arg(long = "iterations", short = 'k', default_value_t = 500)]
    iterations: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
}

#[derive(Args, Debug)]
struct KofidisArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 500)]
    shopm_iterations: usize,
    #[arg(long, default_value_t = 100)]
    window: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Shape(_) | Error::IndexOutOfRange { .. } | Error::Unsupported(_) => 1,
        Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::NotSymmetric { .. }
        | Error::NotOrthonormal { .. } => 2,
        Error::Breakdown(_) | Error::Precondition { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(cli: &Cli) -> jlroa::Result<()> {
    if let Some(dir) = &cli.out_dir {
        fs::create_dir_all(dir)?;
    }
    match &cli.command {
        Command::Approx(args) => approx(cli, args),
        Command::Compare(args) => {
            let mut params =
                CompareParams::new(args.trials, args.n, args.d, args.p, cli.seed, args.algo_a, args.algo_b);
            params.eq_tol = cli.eq_tol;
            params.dist = args.dist.into();
            params.settings.jacobi_init = init(args.jacobi_init, cli.seed);
            let report = cmd_compare(&params)?;
            emit(cli, "compare", &report, &report.rows, Some(compare_plot(&report)))
        }
        Command::Orderings(args) => {
            let mut params = OrderingsParams::new(args.trials, args.n, args.d, args.p, cli.seed);
            params.eq_tol = cli.eq_tol;
            params.dist = args.dist.into();
            let report = cmd_orderings(&params)?;
            emit(cli, "orderings", &report, &report.rows, Some(orderings_plot(&report)))
        }
        Command::Condcheck(args) => {
            let mut params = CondcheckParams::new(args.trials, args.n, args.iterations, cli.seed);
            params.dist = args.dist.into();
            let report = cmd_condcheck(&params)?;
            emit(cli, "condcheck", &report, &report.rows, Some(condcheck_plot(&report)))
        }
        Command::Kofidis(args) => {
            let report = kofidis_report(args.tol, args.max_sweeps, args.shopm_iterations, args.window)?;
            emit(cli, "kofidis", &report, &report.runs, None)
        }
    }
}

fn init(arg: InitArg, seed: u64) -> Init {
    match arg {
        InitArg::Identity => Init::Identity,
        InitArg::Hosvd => Init::Hosvd,
        InitArg::Random => Init::RandomOrthogonal(seed),
    }
}

/// Writes the report (JSON) or its rows (CSV) to `<out-dir>/<name>.<ext>` or
/// stdout, plus `<name>.svg` when an output directory is given.
fn emit<R: Serialize, T: Serialize>(
    cli: &Cli,
    name: &str,
    report: &R,
    rows: &[T],
    plot: Option<Scatter>,
) -> jlroa::Result<()> {
    let ext = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let write = |out: &mut dyn Write| -> jlroa::Result<()> {
        match cli.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, report)?;
                writeln!(out)?;
            }
            Format::Csv => write_rows_csv(rows, &mut *out)?,
        }
        Ok(())
    };
    match &cli.out_dir {
        Some(dir) => {
            let path = dir.join(format!("{name}.{ext}"));
            write(&mut BufWriter::new(File::create(&path)?))?;
            println!("wrote {}", path.display());
            if let Some(plot) = plot {
                let svg = dir.join(format!("{name}.svg"));
                fs::write(&svg, plot.svg)?;
                println!("wrote {}", svg.display());
            }
        }
        None => write(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn load(args: &ApproxArgs, seed: u64) -> jlroa::Result<SymTensor> {
    match (&args.input, args.n, args.d) {
        (Some(source), _, _) => load_tensor(source),
        (None, Some(n), Some(d)) => {
            if n == 0 || d == 0 {
                return Err(Error::Config("--n and --d must be positive".into()));
            }
            Ok(random_symmetric_from(d, n, seed, args.dist.into()))
        }
        _ => Err(Error::Config("give --input, or both --n and --d".into())),
    }
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> jlroa::Result<()> {
    match path {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
        None => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn approx(cli: &Cli, args: &ApproxArgs) -> jlroa::Result<()> {
    let a = load(args, cli.seed)?;
    let n = a.dim();
    if args.p == 0 || args.p > n {
        return Err(Error::Config(format!("p must lie in 1..={n}, got {}", args.p)));
    }
    let out = args
        .out
        .clone()
        .or_else(|| cli.out_dir.as_ref().map(|dir| dir.join("result.json")));
    // with --format csv the trace goes to stdout, so the result needs a file
    let trace_to_stdout = cli.format == Format::Csv && args.trace.is_none();
    if trace_to_stdout && out.is_none() {
        return Err(Error::Config(
            "--format csv needs --out or --out-dir for the result JSON".into(),
        ));
    }
    let value = match args.algo {
        ApproxAlgo::Shopm | ApproxAlgo::Slroat => {
            if args.trace.is_some() {
                return Err(Error::Config("--trace applies to the Jacobi methods only".into()));
            }
            let iters = args.max_iters.unwrap_or(2000);
            let tol = args.tol.unwrap_or(1e-12);
            let x0 = hosvd_init(&a, args.p)?;
            if args.algo == ApproxAlgo::Shopm {
                if args.p != 1 {
                    return Err(Error::Config(
                        "the power method computes a rank-1 approximation; use --p 1".into(),
                    ));
                }
                let res = run_shopm(&a, &x0.column(0), iters, tol)?;
                serde_json::json!({
                    "objective": res.sigma * res.sigma,
                    "residual_sq": a.frobenius_norm().powi(2) - res.sigma * res.sigma,
                    "sigmas": [res.sigma],
                    "X": res.x,
                    "X_shape": [n, 1],
                    "converged": res.converged,
                    "iterations": res.iterations,
                })
            } else {
                let res = run_slroat(&a, &x0, iters, tol)?;
                let objective: f64 = res.sigmas.iter().map(|s| s * s).sum();
                serde_json::json!({
                    "objective": objective,
                    "residual_sq": a.frobenius_norm().powi(2) - objective,
                    "sigmas": res.sigmas,
                    "X": res.x.matrix().as_slice(),
                    "X_shape": [n, args.p],
                    "converged": res.converged,
                    "iterations": res.iterations,
                    "rank_deficient_steps": res.rank_deficient,
                })
            }
        }
        algo => {
            let mut cfg = RunConfig::new(args.p)
                .with_tol_gain(args.tol_gain)
                .with_max_sweeps(args.max_sweeps)
                .with_init(init(args.init, cli.seed));
            cfg.tol_grad = args.tol;
            cfg.epsilon = args.epsilon;
            cfg.max_iters = args.max_iters;
            cfg.ordering = match algo {
                ApproxAlgo::General => OrderingRule::Explicit(random_ordering(n, args.p, cli.seed)?),
                ApproxAlgo::JacobiG => OrderingRule::JacobiG,
                _ => {
                    if args.epsilon.is_some() {
                        return Err(Error::Config("--epsilon applies to --algo jacobi-g only".into()));
                    }
                    OrderingRule::Cyclic
                }
            };
            let (res, trace) = run(&a, &cfg)?;
            if let Some(path) = &args.trace {
                write_trace_csv(&trace, BufWriter::new(File::create(path)?))?;
            } else if trace_to_stdout {
                write_trace_csv(&trace, io::stdout().lock())?;
            }
            result_json(&res, &trace)
        }
    };
    write_json(out.as_deref(), &value)
}
