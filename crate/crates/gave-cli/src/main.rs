use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod bench;
mod commands;
mod failure;

use failure::Failure;

/// Certify, solve, convert and benchmark generalized absolute value equations.
#[derive(Debug, Parser)]
#[command(name = "gave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check unique solvability, sigma_min(A) > ||B||.
    Certify {
        problem: PathBuf,
    },
    /// Solve a problem file.
    Solve(SolveArgs),
    /// Turn an LCP or HLCP file into a GAVE problem file.
    Convert(ConvertArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Solve a batch of random instances and write one CSV row each.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// RK4 on the flow up to the settling-time bound.
    Reference,
    /// The forward-Euler iteration.
    Euler,
    /// The inverse-based baseline flow.
    Baseline,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho2: f64,
    /// Sets lambda1 = 1 - 2/xi and lambda2 = 1 + 2/xi.
    #[arg(long, default_value_t = 4.0, conflicts_with_all = ["lambda1", "lambda2"])]
    pub xi: f64,
    /// Explicit exponent in (0, 1); disables the step-count report.
    #[arg(long, requires = "lambda2")]
    pub lambda1: Option<f64>,
    /// Explicit exponent > 1.
    #[arg(long, requires = "lambda1")]
    pub lambda2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Reference)]
    pub method: Method,
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: usize,
    /// Write the iterates or trajectory samples as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Draw the starting point uniformly from [-1, 1]^n instead of using 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solve even when the problem is not certified.
    #[arg(long)]
    pub force: bool,
    /// Halve Euler steps that do not decrease the residual.
    #[arg(long)]
    pub safeguard: bool,
    /// Base step for the reference and baseline integrators.
    #[arg(long)]
    pub h: Option<f64>,
    /// Integration horizon; defaults to T_max (reference) or 1000 (baseline).
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Scaling constant of the baseline flow.
    #[arg(long, default_value_t = 1.0)]
    pub rho_scale: f64,
    /// Write the solution as {"x": [...]}.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Lcp2gave,
    Hlcp2gave,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also solve, recover the complementarity variables and verify them.
    #[arg(long)]
    pub solve: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Random B with unit norm.
    Gave,
    /// B = I.
    Ave,
    /// Symmetric positive definite LCP.
    Lcp,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = Kind::Gave)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gap: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the embedded solution as {"x": [...]} (GAVE kinds only).
    #[arg(long)]
    pub solution_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gap: f64,
    #[arg(long, default_value_t = 4.0)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Generate instances with B = I and report the earlier bound too.
    #[arg(long)]
    pub identity_b: bool,
    /// Write 0 for wall_time so that repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify { problem } => commands::certify(&problem),
        Command::Solve(args) => commands::solve(&args),
        Command::Convert(args) => commands::convert(&args),
        Command::Gen(args) => commands::generate(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
