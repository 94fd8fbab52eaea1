use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cubegap_cli::commands::Command;
use cubegap_cli::config::{Config, Flags, OutFormat};
use cubegap_cli::execute;

/// Verification harness for the explicit prime-between-cubes estimates.
#[derive(Debug, Parser)]
#[command(name = "cubegap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match Config::load(&cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match execute(cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::from(1);
        }
    };
    let text = match cfg.out {
        OutFormat::Json => out.report.to_json(),
        OutFormat::Csv => out.csv.clone().unwrap_or_else(|| out.report.records_csv()),
    };
    let written = match &cli.flags.report {
        Some(p) => std::fs::write(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(2);
    }
    for id in &out.report.summary.blocking {
        eprintln!("must-hold check did not hold: {id}");
    }
    ExitCode::from(out.report.exit_code() as u8)
}
