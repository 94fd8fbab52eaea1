//! Command-line front end: configuration, subcommands and versioned reports.

pub mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

use commands::{run, Command};
use config::Config;
use report::{Summary, VerificationReport, SCHEMA};

pub struct RunOutput {
    pub report: VerificationReport,
    /// Tabular form of the main result, when the subcommand has one.
    pub csv: Option<String>,
}

/// Run a subcommand and assemble its report.
pub fn execute(cmd: Command, cfg: &Config) -> cubegap_core::Result<RunOutput> {
    let start = Instant::now();
    let sec = run(cmd, cfg)?;
    let digest = cfg.digest(cmd.name());
    let mut timings = sec.timings;
    timings.insert("total".into(), start.elapsed().as_secs_f64());
    let report = VerificationReport {
        schema: SCHEMA,
        run_id: format!("{}-{}", cmd.name(), &digest[..16]),
        subcommand: cmd.name().to_string(),
        config: cfg.canonical(),
        config_digest: digest,
        summary: Summary::of(&sec.records),
        records: sec.records,
        ledger: sec.ledger,
        tables: sec.tables,
        timings,
    };
    Ok(RunOutput { report, csv: sec.csv })
}
