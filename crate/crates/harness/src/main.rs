use std::path::PathBuf;

use clap::Parser;
use irac_harness::bench::{bench_run, BenchConfig};

/// Runs the benchmark and writes a JSON report plus a text table.
#[derive(Parser)]
#[command(name = "irac-bench")]
struct Args {
    /// Small sizes instead of the reference configuration.
    #[arg(long)]
    quick: bool,
    /// Where to write the JSON report.
    #[arg(long, default_value = "bench_report.json")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let mut cfg = if args.quick { BenchConfig::quick() } else { BenchConfig::reference() };
    cfg.seed = args.seed;
    let report = bench_run(&cfg);
    std::fs::write(&args.out, serde_json::to_string_pretty(&report)?)?;
    let table = report.table();
    std::fs::write(args.out.with_extension("txt"), &table)?;
    print!("{table}");
    Ok(())
}
