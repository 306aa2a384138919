use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use torfib_cli::cache::ResolutionCache;
use torfib_cli::runner::write_csv;
use torfib_cli::{run_text, CliError, RunOptions};

/// Resolutions, Tor tables and theorem scans over fiber products of finite
/// local algebras.
#[derive(Debug, Parser)]
#[command(name = "torfib", version)]
struct Args {
    /// Script file, or `-` for standard input.
    #[arg(conflicts_with = "expr", required_unless_present = "expr")]
    script: Option<String>,

    /// Script text given inline.
    #[arg(short = 'e', long = "expr")]
    expr: Option<String>,

    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write Betti, Tor and scan rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Worker threads for scans; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,

    /// Highest Tor degree examined by scans.
    #[arg(long = "resolution-bound", default_value_t = 8)]
    resolution_bound: usize,

    /// Overrides the seed of every scan statement.
    #[arg(long)]
    seed: Option<u64>,
}

fn read_script(args: &Args) -> Result<String, CliError> {
    if let Some(e) = &args.expr {
        return Ok(e.clone());
    }
    match args.script.as_deref() {
        Some("-") | None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::usage(format!("reading standard input: {e}")))?;
            Ok(s)
        }
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::usage(format!("reading {path}: {e}"))),
    }
}

fn run(args: &Args) -> Result<i32, CliError> {
    let text = read_script(args)?;
    let opts = RunOptions {
        jobs: args.jobs,
        resolution_bound: args.resolution_bound,
        seed: args.seed,
        cache: ResolutionCache::from_env(),
        ..RunOptions::default()
    };
    let report = run_text(&text, &opts)?;
    let json = serde_json::to_string_pretty(&report.document).expect("report serializes") + "\n";
    match &args.out {
        Some(p) => fs::write(p, json).map_err(|e| CliError::usage(format!("writing {}: {e}", p.display())))?,
        None => print!("{json}"),
    }
    if let Some(p) = &args.csv {
        let f = fs::File::create(p).map_err(|e| CliError::usage(format!("writing {}: {e}", p.display())))?;
        write_csv(&report.csv, f).map_err(|e| CliError::usage(format!("writing {}: {e}", p.display())))?;
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
