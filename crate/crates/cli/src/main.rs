//! Command-line driver for the equidistribution experiments.

mod config;
mod error;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{load_config, RunConfig};
use error::{CliError, CliResult};
use output::{ManifestEntry, OutputDir};
use suites::{Ctx, SuiteReport};

#[derive(Parser)]
#[command(name = "equidist", version, about = "Random eigenbasis equidistribution experiments on S^2 and flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long, global = true, env = "EQUIDIST_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Constancy of the projector kernel diagonal.
    KernelCheck,
    /// Pointwise law of a random eigenfunction against the exact survival function.
    LawCheck,
    /// Ball-mass defects over coverings for Haar-random eigenbases.
    Equidist,
    /// Log-log decay of Var(F) and the mean-median gap, plus Levy tails.
    Scaling,
    /// Covering construction and verification across radii.
    CoveringCheck,
    /// Every suite in sequence.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::KernelCheck => "kernel-check",
            Command::LawCheck => "law-check",
            Command::Equidist => "equidist",
            Command::Scaling => "scaling",
            Command::CoveringCheck => "covering-check",
            Command::All => "all",
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'static str,
    pass: bool,
    exit_code: i32,
    total_seconds: f64,
    threads: usize,
    suites: &'a [SuiteReport],
    manifest: &'a [ManifestEntry],
    config: &'a RunConfig,
}

fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    cfg.resolve()
}

fn run(cli: &Cli) -> CliResult<i32> {
    let cfg = resolve_config(cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config("--threads", e.to_string()))?;
    }
    let start = Instant::now();
    let mut out = OutputDir::create(&cfg.output.dir)?;
    let mut reports = Vec::new();
    {
        let mut ctx = Ctx::new(&cfg, &mut out)?;
        let plan: &[fn(&mut Ctx) -> CliResult<SuiteReport>] = match cli.command {
            Command::KernelCheck => &[suites::kernel_check],
            Command::LawCheck => &[suites::law_check],
            Command::Equidist => &[suites::equidist],
            Command::Scaling => &[suites::scaling],
            Command::CoveringCheck => &[suites::covering_check],
            Command::All => &[
                suites::kernel_check,
                suites::law_check,
                suites::covering_check,
                suites::scaling,
                suites::equidist,
            ],
        };
        for suite in plan {
            let r = suite(&mut ctx)?;
            println!("{} {} ({:.2}s)", if r.pass { "PASS" } else { "FAIL" }, r.name, r.seconds);
            reports.push(r);
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    let exit_code = if pass { 0 } else { 2 };
    let manifest = out.manifest().to_vec();
    let report = RunReport {
        command: cli.command.name(),
        pass,
        exit_code,
        total_seconds: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        suites: &reports,
        manifest: &manifest,
        config: &cfg,
    };
    out.write_json("report.json", &report)?;
    println!("report: {}", out.path().join("report.json").display());
    Ok(exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
