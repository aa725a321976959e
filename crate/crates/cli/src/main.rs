//! Command-line front end for the vortex laboratory: static solves, temporal
//! gauge evolution, moduli-space geometry, the adiabatic comparison, and the
//! algebraic / product-manifold checks, all driven by a small key = value
//! configuration format with inline overrides.
//!
//! Every run writes a `manifest.txt` into the output directory recording the
//! command, configuration, phase timings, and produced files. Exit code 0
//! means the run completed and any requested checks passed; 1 is a runtime
//! or check failure; 2 is a configuration problem (all violations are
//! listed, nothing is run).

mod commands;
mod config;
mod manifest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Cfg;
use manifest::Manifest;

#[derive(Parser)]
#[command(name = "vortexlab", version, about = "Vortex dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the static vortex equations for prescribed zeros
    SolveVortex(RunArgs),
    /// Integrate the second-order field equations in the temporal gauge
    Evolve(RunArgs),
    /// Evaluate the kinetic-energy metric at a point of the moduli space
    Metric(RunArgs),
    /// Integrate a moduli-space geodesic
    Geodesic(RunArgs),
    /// Compare slow field dynamics against the geodesic across a list of eps
    AdiabaticCompare(RunArgs),
    /// Verify the Clifford algebra and spin representation identities
    CliffordCheck(RunArgs),
    /// Compare the two Dirac assemblies on a refinement ladder
    DiracCheck(RunArgs),
    /// Scan the coupled curvature-spinor residuals over lifted vortices
    SwScan(RunArgs),
}

impl Command {
    fn split(self) -> (&'static str, RunArgs) {
        match self {
            Command::SolveVortex(a) => ("solve-vortex", a),
            Command::Evolve(a) => ("evolve", a),
            Command::Metric(a) => ("metric", a),
            Command::Geodesic(a) => ("geodesic", a),
            Command::AdiabaticCompare(a) => ("adiabatic-compare", a),
            Command::CliffordCheck(a) => ("clifford-check", a),
            Command::DiracCheck(a) => ("dirac-check", a),
            Command::SwScan(a) => ("sw-scan", a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file: `key = value` lines with optional `[section]`s
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inline configuration overrides, `section.key=value`
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let (name, args) = Cli::parse().cmd.split();
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(errors)) => {
            for e in &errors {
                eprintln!("config error: {e}");
            }
            eprintln!("{} configuration problem(s); nothing was run", errors.len());
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

enum Failure {
    Config(Vec<String>),
    Run(anyhow::Error),
}

fn run(name: &'static str, args: RunArgs) -> Result<(), Failure> {
    let text = match &args.config {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Failure::Config(vec![format!("cannot read {}: {e}", p.display())]))?,
        None => String::new(),
    };
    let cfg = Cfg::load(&text, &args.overrides).map_err(Failure::Config)?;
    let echo = cfg.echo();
    let job = commands::prepare(name, &cfg, args.seed);
    let errors = cfg.finish();
    if !errors.is_empty() {
        return Err(Failure::Config(errors));
    }
    let job = job.ok_or_else(|| {
        Failure::Config(vec!["configuration could not be assembled".to_string()])
    })?;

    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Run(anyhow::anyhow!("creating {}: {e}", args.out.display())))?;
    let mut man = Manifest::new(name, args.seed);
    man.set_config(echo);
    let result = job(&args.out, &mut man);
    if let Err(e) = &result {
        man.set_status(format!("failed: {e:#}"));
    }
    if let Err(e) = man.write(&args.out) {
        eprintln!("warning: could not write manifest.txt: {e}");
    }
    result.map_err(Failure::Run)
}
