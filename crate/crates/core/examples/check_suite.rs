//! Runs the full check suite for a type given on the command line,
//! e.g. `cargo run --example check_suite -- A2odd 3 1`.
use qaffine::qadm::{parse_checks, run, RunConfig};
use qaffine::rootdata::{AffineType, Family};

fn main() -> qaffine::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map(String::as_str).unwrap_or("C").parse()?;
    let rank = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(family.min_rank());
    let k = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut config = RunConfig::new(AffineType::new(family, rank)?, k, parse_checks("all", family)?);
    config.jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let report = run(&config)?;
    print!("{report}");
    Ok(())
}
