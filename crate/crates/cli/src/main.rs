//! Command-line runner for the cubic tangency laboratory.

mod commands;
mod report;
mod svg;
mod table;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::Parser;

use tangency_core::config::{Command, ExperimentConfig};

use crate::commands::Context;
use crate::report::{Provenance, Report};

#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    /// validate, leaves, rects, slopes, cascade, classify, moduli, conjugacy or all
    #[arg(value_parser = parse_command)]
    command: Command,

    /// Experiment configuration (TOML)
    #[arg(short, long)]
    config: PathBuf,

    /// Output directory, overriding the config
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// Seed for randomized sampling, overriding the config
    #[arg(short, long)]
    seed: Option<u64>,
}

fn parse_command(s: &str) -> Result<Command, String> {
    Command::parse(s).ok_or_else(|| format!("unknown command `{s}`"))
}

enum Failure {
    Config(anyhow::Error),
    Other(anyhow::Error),
}

fn load(cli: &Cli) -> Result<(String, ExperimentConfig, Context), Failure> {
    let text = fs::read_to_string(&cli.config)
        .with_context(|| format!("reading {}", cli.config.display()))
        .map_err(Failure::Config)?;
    let cfg = ExperimentConfig::parse(&text)
        .with_context(|| format!("parsing {}", cli.config.display()))
        .map_err(Failure::Config)?;
    let sys = cfg
        .to_system()
        .with_context(|| format!("building the system from {}", cli.config.display()))
        .map_err(Failure::Config)?;
    let seed = cli.seed.unwrap_or(cfg.sweep.seed);
    let ctx = Context {
        cfg: cfg.clone(),
        sys,
        seed,
    };
    Ok((text, cfg, ctx))
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let (text, cfg, ctx) = load(cli)?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let list = match cli.command {
        Command::All => cfg.command_list(),
        c => vec![c],
    };
    let outputs: Vec<_> = list.iter().map(|&c| (c, commands::run(&ctx, c))).collect();

    let write = || -> Result<Report> {
        fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
        let mut report = Report::new(Provenance::new(&text, ctx.seed));
        for (c, out) in &outputs {
            report.absorb(c.name(), out);
            for t in &out.tables {
                t.write(&out_dir)?;
            }
            for (file, svg) in &out.plots {
                fs::write(out_dir.join(file), svg)?;
            }
        }
        let json = serde_json::to_string_pretty(&report)?;
        fs::write(out_dir.join("report.json"), json + "\n")?;
        Ok(report)
    };
    write().map_err(Failure::Other)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            for c in &report.acceptance {
                println!(
                    "{} {}.{}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.command,
                    c.name,
                    c.detail
                );
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("failing criteria: {}", report.failed.join(", "));
                ExitCode::from(1)
            }
        }
        Err(Failure::Config(e)) => {
            eprintln!("{e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
