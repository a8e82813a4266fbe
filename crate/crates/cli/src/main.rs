use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cornerspec_cli::config::{validate, AnalysisKind, JobConfig};
use cornerspec_cli::run::{export_report, run_job};

#[derive(Parser)]
#[command(
    name = "cornerspec",
    about = "Spectral laboratory for complex-scaled operators on cylinder and corner models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the report files.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue classification against the predicted essential-spectrum rays.
    Spectrum(CommonArgs),
    /// Rotation-stable discrete eigenvalues (bound states and resonances).
    Resonances(CommonArgs),
    /// Numerical-range boundary and sector certificate.
    Numrange(CommonArgs),
    /// Boundary Weyl sequence decay and commutator smallness.
    Weyl(CommonArgs),
    /// Resolvent matrix elements and continuation scans.
    Resolvent(CommonArgs),
    /// Tensor-sum spectral checks.
    Ichinose(CommonArgs),
    /// Every analysis in sequence.
    All(CommonArgs),
}

fn analyses_for(command: &Command) -> Vec<AnalysisKind> {
    match command {
        Command::Spectrum(_) => vec![AnalysisKind::Spectrum],
        Command::Resonances(_) => vec![AnalysisKind::Resonances],
        Command::Numrange(_) => vec![AnalysisKind::Numrange],
        Command::Weyl(_) => vec![AnalysisKind::Weyl],
        Command::Resolvent(_) => vec![AnalysisKind::Resolvent],
        Command::Ichinose(_) => vec![AnalysisKind::Ichinose],
        Command::All(_) => AnalysisKind::all(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Spectrum(a)
        | Command::Resonances(a)
        | Command::Numrange(a)
        | Command::Weyl(a)
        | Command::Resolvent(a)
        | Command::Ichinose(a)
        | Command::All(a) => a,
    };
    let raw = match std::fs::read_to_string(&args.config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let mut config: JobConfig = match serde_json::from_str(&raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid configuration: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let requested = if config.analyses.is_empty() {
        analyses_for(&cli.command)
    } else {
        let from_cmd = analyses_for(&cli.command);
        if matches!(cli.command, Command::All(_)) {
            config.analyses.clone()
        } else {
            from_cmd
        }
    };
    let job = match validate(&config) {
        Ok(j) => j,
        Err(problems) => {
            eprintln!("error: configuration is invalid:");
            for p in problems {
                eprintln!("  - {p}");
            }
            return ExitCode::from(1);
        }
    };
    let report = run_job(&job, &requested);
    match export_report(&report, &args.out) {
        Ok(paths) => {
            for p in &paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write to {}: {e}", args.out.display());
            return ExitCode::from(1);
        }
    }
    for s in &report.summary.analyses {
        println!("{}: {} — {}", s.name, s.status, s.detail);
    }
    if report.summary.pass {
        ExitCode::SUCCESS
    } else if report.summary.analyses.iter().any(|s| s.status == "error") {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}
