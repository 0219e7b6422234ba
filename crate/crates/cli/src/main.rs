//! `mattekit` command-line tool. Results go to stdout as JSON; logs go to
//! stderr.

mod args;
mod commands;
mod eval;
mod synth;

use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use args::{Cli, Command};

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("MATTEKIT_LOG")
        .target(env_logger::Target::Stderr)
        .init();
}

fn thread_pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        anyhow::ensure!(n > 0, "--threads must be at least 1");
        builder = builder.num_threads(n);
    }
    builder.build().context("building worker pool")
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let pool = thread_pool(cli.threads)?;
    match cli.command {
        Command::Trimap(a) => commands::trimap(&a).map(|_| true),
        Command::TrimapConv(a) => commands::trimap_conv(&a, cli.seed).map(|_| true),
        Command::Synth(a) => synth::run(&a, cli.seed, &pool),
        Command::Compose(a) => commands::compose(&a).map(|_| true),
        Command::Fuse(a) => commands::fuse(&a).map(|_| true),
        Command::Harden(a) => commands::harden(&a).map(|_| true),
        Command::Eval(a) => eval::run(&a, &pool),
        Command::Pyramid(a) => commands::pyramid(&a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
