mod commands;
mod config;
mod emit;
mod svg;

use clap::{Parser, Subcommand};
use config::UsageError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral-stability laboratory for peaked waves of the reduced Ostrovsky equations.
#[derive(Parser, Debug)]
#[command(name = "ostrovsky", version)]
struct Cli {
    /// JSON file of settings; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for data artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Peaked or smooth traveling-wave profile.
    Wave(commands::WaveArgs),
    /// Eigenvalues of the truncated operator.
    Spectrum(commands::SpectrumArgs),
    /// σ_min portrait over a λ window.
    Pseudo(commands::PseudoArgs),
    /// Half-line problem after the change of variables.
    #[command(subcommand)]
    Halfline(commands::HalflineCommand),
    /// Point-spectrum scan over candidate λ.
    Pointspec(commands::PointspecArgs),
    /// Linear or nonlinear time evolution.
    Evolve(commands::EvolveArgs),
    /// Portraits and tables for p = 1 and p = 2.
    Report(commands::ReportArgs),
}

fn fail(kind: &str, err: &anyhow::Error) {
    let chain: Vec<String> = err.chain().skip(1).map(|e| e.to_string()).collect();
    let body = serde_json::json!({ "error": { "kind": kind, "message": err.to_string(), "context": chain } });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config::load_file(cli.config.as_deref()).and_then(|file| {
        let ctx = commands::Context { out: cli.out.clone(), file };
        match &cli.command {
            Command::Wave(a) => commands::wave(&ctx, a),
            Command::Spectrum(a) => commands::spectrum(&ctx, a),
            Command::Pseudo(a) => commands::pseudo(&ctx, a),
            Command::Halfline(a) => commands::halfline(&ctx, a),
            Command::Pointspec(a) => commands::pointspec(&ctx, a),
            Command::Evolve(a) => commands::evolve(&ctx, a),
            Command::Report(a) => commands::report(&ctx, a),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let usage = e.downcast_ref::<UsageError>().is_some()
                || e.downcast_ref::<ostrovsky_core::Error>().is_some_and(|c| c.is_usage());
            if usage {
                fail("usage", &e);
                ExitCode::from(2)
            } else {
                let kind = e.downcast_ref::<ostrovsky_core::Error>().map_or("failure", |c| c.kind());
                fail(kind, &e);
                ExitCode::from(1)
            }
        }
    }
}
