use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relsmooth_cli::commands::{
    cmd_bench_dopt, cmd_certify, cmd_solve, Algo, BenchArgs, CertifyArgs, CmdResult, SolveArgs,
};

#[derive(Parser)]
#[command(name = "relsmooth", version, about = "Relative-smoothness solvers and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on a problem spec and write its trace.
    Solve {
        #[arg(long)]
        spec: PathBuf,
        /// pgs, das, cpgs or fw
        #[arg(long)]
        algo: Algo,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
        /// Record per-iteration wall time in the trace.
        #[arg(long)]
        wall_time: bool,
    },
    /// Sample the relative-smoothness conditions of a problem spec.
    Certify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Overrides the seed in the problem file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare pgs, das and fw on a D-optimal design instance.
    BenchDopt {
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Iteration budget; at least the predicted bound is always run.
        #[arg(long)]
        iters: Option<usize>,
        /// Use a dopt spec instead of a random instance.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: CmdResult = match cli.command {
        Command::Solve { spec, algo, iters, out, wall_time } => {
            cmd_solve(&SolveArgs { spec, algo, iters, out, wall_time })
        }
        Command::Certify { spec, samples, seed, out } => cmd_certify(&CertifyArgs { spec, samples, seed, out }),
        Command::BenchDopt { m, n, eps, seed, out, iters, spec } => {
            cmd_bench_dopt(&BenchArgs { m, n, eps, seed, out, iters, spec })
        }
    };
    match result {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("relsmooth: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
