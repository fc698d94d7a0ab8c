use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elliptic_hecke::runner::{list_identities, run, ConfigError, RunConfig};

/// Numerical verification of elliptic Hecke algebra identities.
#[derive(Debug, Parser)]
#[command(name = "ehecke", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run identity suites and print a JSON report.
    ///
    /// Exit status: 0 if every identity passes, 1 if one fails, 2 on an
    /// invalid configuration.
    Run(Box<RunArgs>),
    /// List every identity with its suite and anchor.
    List,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Config file of `key = value` lines; flags override it.
    config: Option<PathBuf>,
    /// Cartan type: A1, A1xA1, A2, A3, B2, C2, G2, B3 or C3.
    #[arg(long = "type")]
    label: Option<String>,
    /// adjoint or simply_connected.
    #[arg(long)]
    isogeny: Option<String>,
    /// Modular parameter, e.g. 0.75i or 0.1+0.8i.
    #[arg(long)]
    tau: Option<String>,
    /// Comma-separated values of the dynamical shift.
    #[arg(long = "h", allow_hyphen_values = true)]
    hbar: Option<String>,
    /// Comma-separated subset of theta, weyl, residue, gamma, psi, inverse.
    #[arg(long)]
    suites: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// Sample points per identity, seed and h value.
    #[arg(long)]
    samples: Option<String>,
    /// Replace every per-identity threshold.
    #[arg(long)]
    tol: Option<String>,
    /// Number of theta product factors.
    #[arg(long)]
    truncation: Option<String>,
    /// Use deliberately corrupted operators.
    #[arg(long)]
    negative_control: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let overrides = [
        ("type", &args.label),
        ("isogeny", &args.isogeny),
        ("tau", &args.tau),
        ("h", &args.hbar),
        ("suites", &args.suites),
        ("seeds", &args.seeds),
        ("samples", &args.samples),
        ("tol", &args.tol),
        ("truncation", &args.truncation),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if args.negative_control {
        cfg.negative_control = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for e in list_identities() {
                println!("{}\t{}\t{}", e.name, e.suite, e.anchor);
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let report = match load(&args).and_then(|cfg| run(&cfg)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("configuration error: {e}");
                    return ExitCode::from(2);
                }
            };
            let json = report.to_json();
            match &args.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => println!("{json}"),
            }
            for r in report.records.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}: {:.3e} (threshold {:.1e})", r.name, r.max_residual, r.threshold);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
