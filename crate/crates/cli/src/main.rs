mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command, FileConfig, Generate};
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let fallback_seed = file.seed;
    match cli.command {
        Command::Generate(Generate::Cg(a)) => commands::generate_cg(a.overlay(file.cg), fallback_seed),
        Command::Generate(Generate::D12(a)) => commands::generate_motif(a.overlay(file.d12), fallback_seed, true),
        Command::Generate(Generate::Motif(a)) => commands::generate_motif(a.overlay(file.motif), fallback_seed, false),
        Command::Embed(a) => commands::embed(a.overlay(file.embed)),
        Command::Infer(a) => commands::infer(a.overlay(file.infer), fallback_seed),
        Command::Benchmark(a) => commands::benchmark(a.overlay(file.benchmark)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
