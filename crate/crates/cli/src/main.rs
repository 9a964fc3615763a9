//! `szlab`: every subcommand emits one report embedding its resolved
//! config, independent verdicts, and a status that fixes the exit code
//! (0 ok, 1 certificate failure or failed check, 2 usage, 3 resource limit).

mod args;
mod commands;
mod report;

use args::{Cli, Format};
use clap::Parser;
use commands::Ctx;
use report::{Outcome, Report, RunConfig, Status, SCHEMA_VERSION};
use std::process::ExitCode;
use szlab::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.global.json { Format::Json } else { cli.global.format };
    let guard = commands::resolve_guard(&cli.command, &cli.global);
    let ctx = Ctx { seed: cli.global.seed, mode: cli.global.mode, guard };

    let (status, outcome) = match commands::execute(&cli.command, &ctx) {
        Ok(o) => (if o.verified.values().all(|&v| v) { Status::Ok } else { Status::InvariantBreach }, o),
        Err(e @ (Error::InvalidArgument(_) | Error::ShapeMismatch(_) | Error::PreconditionViolated(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e @ Error::CertificateFailure(_)) => (Status::CertificateFailure, failed(e)),
        Err(e @ (Error::ResourceLimit { .. } | Error::IterationLimit { .. })) => (Status::ResourceLimit, failed(e)),
    };

    let report = Report {
        tool: "szlab",
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        config: RunConfig {
            command: cli.command.name(),
            parameters: cli.command.parameters(),
            master_seed: cli.global.seed,
            arithmetic_mode: cli.global.mode,
            guard,
            format,
            prng: szlab::seed::PRNG_NAME,
        },
        status,
        verified: outcome.verified,
        result: outcome.result,
        diagnostics: outcome.diagnostics,
        rows: outcome.rows,
    };
    let stdout = std::io::stdout();
    if let Err(e) = report.emit(format, &mut stdout.lock()) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    if status != Status::Ok {
        eprintln!("szlab: {}", report.diagnostics.first().map_or("check failed", String::as_str));
    }
    ExitCode::from(status.exit_code() as u8)
}

fn failed(e: Error) -> Outcome {
    Outcome { result: serde_json::Value::Null, diagnostics: vec![e.to_string()], ..Default::default() }
}
