use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qaffine::qadm::{parse_checks, run, RunConfig, CACHE_DIR_ENV};
use qaffine::rootdata::{AffineType, Family};

/// Solve and verify R matrices, L operators and Drinfeld currents.
#[derive(Parser, Debug)]
#[command(name = "qadm", version)]
struct Args {
    /// A, B, C, D, A2even, A2odd or D2.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    rank: usize,
    /// Truncation order K of the spectral expansion.
    #[arg(long, default_value_t = 2)]
    order: i64,
    /// `all` or a comma-separated subset of selfcheck, solve, structure,
    /// classical, ybe, rll, wrel, qdet, gauss, drinfeld.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Write the solved artifact to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reuse and store artifacts in this directory.
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Total order of the Yang-Baxter check (default: min(K, 2)).
    #[arg(long)]
    ybe_order: Option<i64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = AffineType::new(args.family, args.rank).and_then(|ty| {
        let mut c = RunConfig::new(ty, args.order, parse_checks(&args.checks, args.family)?);
        c.out = args.out;
        c.cache_dir = args.cache_dir;
        c.jobs = args.jobs;
        c.ybe_order = args.ybe_order;
        Ok(c)
    });
    match config.and_then(|c| run(&c)) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("qadm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
