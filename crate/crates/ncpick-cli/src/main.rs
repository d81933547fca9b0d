use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;
mod report;

use commands::Options;

#[derive(Parser)]
#[command(
    name = "ncpick",
    version,
    about = "Maximal-entropy interpolation on truncated Fock spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a ball, operatorial, cs or sarason problem.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Entropy of a contractive symbol or of a multi-Toeplitz operator.
    Entropy {
        path: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Square outer spectral factor of a strictly positive multi-Toeplitz operator.
    Factor {
        path: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Recompute the checks of a result file against its problem file.
    Verify {
        result: PathBuf,
        problem: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Joint spectral radius of an operator tuple.
    Radius {
        path: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Clone)]
struct Flags {
    /// Truncation degree of Fock computations and output coefficients.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result file (solve, factor).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Norm-optimal route instead of the central solution.
    #[arg(long)]
    optimal: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl Flags {
    fn options(&self) -> Options {
        Options {
            degree: self.degree,
            tolerance: self.tolerance,
            seed: self.seed,
            out: self.out.clone(),
            optimal: self.optimal,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (flags, outcome) = match &cli.command {
        Command::Solve { path, flags } => (flags, commands::solve(path, &flags.options())),
        Command::Entropy { path, flags } => (flags, commands::entropy(path, &flags.options())),
        Command::Factor { path, flags } => (flags, commands::factor(path, &flags.options())),
        Command::Verify {
            result,
            problem,
            flags,
        } => (flags, commands::verify(result, problem, &flags.options())),
        Command::Radius { path, flags } => (flags, commands::radius(path, &flags.options())),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let emit = |mut rep: report::RunReport| {
        rep.wall_time_s = Some(io::Num(elapsed));
        match flags.format {
            Format::Json => print!("{}", report::to_json(&rep)),
            Format::Text => print!("{}", report::to_text(&rep)),
        }
    };
    match outcome {
        Ok(rep) => {
            emit(rep);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("ncpick: {}", f.message);
            if let Some(rep) = f.report {
                emit(rep);
            }
            ExitCode::from(f.code as u8)
        }
    }
}
