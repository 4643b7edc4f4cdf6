//! Command-line orchestration: each subcommand fronts one library
//! operation and produces a JSON result document, optionally with CSV
//! polylines for plotting.

pub mod commands;
pub mod config;
pub mod document;
pub mod export;

use std::time::Instant;

use thiserror::Error;

use config::{Cli, Command, CommandName, OutputArgs, RunConfig};
use document::{CertStatus, Payload, ResultDocument, Timings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}: {1}")]
    Io(String, String),
    #[error(transparent)]
    Curve(#[from] trefoil_core::curve::CurveError),
    #[error(transparent)]
    Solve(#[from] trefoil_core::solve::SolveError),
    #[error(transparent)]
    Hex(#[from] trefoil_core::hexknot::HexError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Exit status: 0 on success, 2 when no trefoil was certified.
pub fn exit_code(doc: &ResultDocument) -> i32 {
    match &doc.payload {
        Payload::Certify(c) if !c.results.iter().any(|r| r.status == CertStatus::Certified) => 2,
        _ => 0,
    }
}

/// Runs one command and returns the document without writing anything.
pub fn build_document(cli: &Cli) -> Result<ResultDocument, CliError> {
    let start = Instant::now();
    let (cfg_echo, payload, output) = match &cli.command {
        Command::ClassifyHex(h) => {
            let (echo, payload) = commands::cmd_classify_hex(&h.points)?;
            (echo, payload, &h.output)
        }
        Command::Search(a) | Command::Invariant(a) | Command::Thickness(a) | Command::Certify(a) | Command::Quadrisecants(a) => {
            let name = match &cli.command {
                Command::Search(_) => CommandName::Search,
                Command::Invariant(_) => CommandName::Invariant,
                Command::Thickness(_) => CommandName::Thickness,
                Command::Certify(_) => CommandName::Certify,
                _ => CommandName::Quadrisecants,
            };
            let cfg = RunConfig::from_args(name, a)?;
            let payload = match name {
                CommandName::Search => commands::cmd_search(&cfg)?,
                CommandName::Invariant => commands::cmd_invariant(&cfg)?,
                CommandName::Thickness => commands::cmd_thickness(&cfg)?,
                CommandName::Certify => commands::cmd_certify(&cfg)?,
                _ => commands::cmd_quadrisecants(&cfg)?,
            };
            (cfg.echo(), payload, &a.output)
        }
    };
    let mut doc = ResultDocument::new(cfg_echo, payload);
    if output.timings {
        doc.timings = Some(Timings { total_seconds: start.elapsed().as_secs_f64() });
    }
    Ok(doc)
}

pub fn output_args(cli: &Cli) -> &OutputArgs {
    match &cli.command {
        Command::ClassifyHex(h) => &h.output,
        Command::Search(a) | Command::Invariant(a) | Command::Thickness(a) | Command::Certify(a) | Command::Quadrisecants(a) => {
            &a.output
        }
    }
}

/// Builds, writes and exports; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let doc = build_document(cli)?;
    if let Payload::Invariant(inv) = &doc.payload {
        for w in &inv.warnings {
            eprintln!("warning: {w}");
        }
    }
    let text = doc.to_json()?;
    let out = output_args(cli);
    match &out.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io("stdout".into(), e.to_string()))?;
        }
    }
    if let Some(dir) = &out.plot_dir {
        export::export_plot_data(&doc, dir)?;
    }
    Ok(exit_code(&doc))
}
