use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod config;
mod run;

use config::Failure;

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nlibrary: orlicz-eigen ",
    env!("CARGO_PKG_VERSION"),
    "\nbuild: ",
    env!("ORLICZ_BUILD_PROFILE"),
);

/// First eigenvalue of the Orlicz a-Laplacian as a function of the modular
/// constraint α.
#[derive(Parser, Debug)]
#[command(name = "orlicz", version, long_version = LONG_VERSION)]
struct Cli {
    /// Worker threads for parallel solves.
    #[arg(long, global = true, env = "ORLICZ_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Δ₂ reports, growth indices and Matuszewska exponents of a Young function.
    Inspect {
        /// Young function: inline JSON or a path to a JSON file.
        #[arg(long)]
        young: String,
        #[arg(long)]
        json: bool,
    },
    /// Minimize the energy at one α on a mesh.
    Solve {
        #[arg(long)]
        young: String,
        /// Mesh `{dim, extents, counts, holes?}`: inline JSON or a path.
        #[arg(long)]
        mesh: String,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the minimizer (all nodes, boundary included).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve over a geometric α-grid and run verification checks.
    Sweep(SweepArgs),
    /// Minimize the fractional energy at one α on an interval.
    Nonlocal {
        #[arg(long)]
        young: String,
        #[command(flatten)]
        interval: IntervalArgs,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative weak-residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    /// Number of starting fields.
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct IntervalArgs {
    /// Interval length L (domain (0, L)).
    #[arg(long, default_value_t = 1.0)]
    interval: f64,
    /// Interior nodes.
    #[arg(long, default_value_t = 128)]
    nodes: usize,
    /// Fractional order in (0, 1).
    #[arg(long)]
    s: Option<f64>,
    /// Exterior cutoff radius (default 4L).
    #[arg(long)]
    rcut: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    young: String,
    #[arg(long, required_unless_present = "nonlocal")]
    mesh: Option<String>,
    /// Use the fractional energy on (0, --interval) instead of --mesh.
    #[arg(long, conflicts_with = "mesh", requires = "s")]
    nonlocal: bool,
    #[command(flatten)]
    interval: IntervalArgs,
    #[arg(long)]
    alpha_min: f64,
    #[arg(long)]
    alpha_max: f64,
    #[arg(long, default_value_t = 5)]
    per_decade: usize,
    /// Comma-separated checks to run.
    #[arg(long, value_delimiter = ',')]
    check: Vec<Check>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Solve every α from scratch, in parallel.
    #[arg(long)]
    no_warm_start: bool,
    /// Fraction of the α = 1 quotient the decay check must reach.
    #[arg(long, default_value_t = 0.2)]
    decay_fraction: f64,
    /// Records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Verification report as JSON (also printed to stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// A matplotlib script plotting the CSV.
    #[arg(long, requires = "csv")]
    plot_script: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    Bounds,
    Derivative,
    Limits,
    Decay,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Inspect { young, json } => run::inspect(&young, json),
        Command::Solve { young, mesh, alpha, solver, csv } => run::solve(&young, &mesh, alpha, &solver, csv.as_deref()),
        Command::Sweep(args) => run::sweep(&args),
        Command::Nonlocal { young, interval, alpha, solver, csv } => {
            run::nonlocal(&young, &interval, alpha, &solver, csv.as_deref())
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
