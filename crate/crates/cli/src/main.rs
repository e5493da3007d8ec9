use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use chiral_cli::run::EXIT_USAGE;
use chiral_cli::{run_source, Flags};
use clap::Parser;

/// Run a chiral script. Exit codes: 0 all checks pass, 1 a verification
/// failed, 2 usage or parse error, 3 a resource bound was hit.
#[derive(Parser, Debug)]
#[command(name = "chiral", version)]
struct Cli {
    /// Script file; reads standard input when absent or `-`.
    script: Option<PathBuf>,
    /// One JSON object per command on standard output.
    #[arg(long)]
    json: bool,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Weight bound for probe-based checks.
    #[arg(long, default_value_t = 2)]
    max_weight: i32,
    /// Number of t-series terms computed for flows (`p1 reflect`).
    #[arg(long, default_value_t = 12)]
    series_order: usize,
    /// First Čech degree window for `p1 sections`.
    #[arg(long, default_value_t = 2)]
    degree_window: i64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut src = String::new();
    let read = match &cli.script {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map(|s| src = s),
        _ => std::io::stdin().read_to_string(&mut src).map(|_| ()),
    };
    if let Err(e) = read {
        eprintln!("error: cannot read script: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let flags = Flags {
        json: cli.json,
        seed: cli.seed,
        max_weight: cli.max_weight,
        series_order: cli.series_order,
        degree_window: cli.degree_window,
    };
    let out = run_source(&src, &flags);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
