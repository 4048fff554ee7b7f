use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clrank::harness::{self, ExperimentConfig, HarnessError, Kind};

#[derive(Parser)]
#[command(name = "clrank", version, about = "Class-group rank experiments on superelliptic specializations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class-group n-rank and ideal witnesses per parameter.
    Rank(RunArgs),
    /// Distinct-field growth under the shifted enumeration.
    DzCount(RunArgs),
    /// Field counts below a discriminant cut.
    Thquant(RunArgs),
    /// Lattice-point counts against the main term.
    CountLattice(RunArgs),
    /// Lattice points in scaled disks and boxes.
    Davenport(RunArgs),
    /// Local n-th power audit of the Kummer elements.
    LocalAudit(RunArgs),
    /// Reducible fibers on the real-sign family.
    ThinSet(RunArgs),
    /// Freeze the constant of a counting experiment.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset family label: AI-3, AI-5 or GREENBERG-5-1.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    jsonl: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Where to write the calibrated config (default: in place).
    #[arg(long)]
    write: Option<PathBuf>,
}

fn load(kind: Kind, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default_for(kind, args.family.as_deref()),
    };
    match cfg.experiment.kind {
        Some(k) if k != kind => {
            return Err(HarnessError::Config(format!(
                "experiment.kind: config is {k}, subcommand is {kind}"
            )))
        }
        _ => cfg.experiment.kind = Some(kind),
    }
    if let Some(f) = &args.family {
        cfg.experiment.family = Some(f.clone());
        cfg.experiment.m = None;
        cfg.experiment.f = None;
    }
    if let Some(p) = &args.jsonl {
        cfg.output.jsonl = p.display().to_string();
    }
    if let Some(p) = &args.csv {
        cfg.output.csv = p.display().to_string();
    }
    if let Some(s) = args.seed {
        cfg.experiment.seed = Some(s);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<u8, HarnessError> {
    let workers = harness::workers_from_env()?;
    let (kind, args) = match cli.command {
        Command::Calibrate(c) => {
            let cfg = ExperimentConfig::load(&c.config)?;
            let (updated, changed) = harness::with_workers(workers, || harness::calibrate(&cfg))??;
            if changed {
                let dest = c.write.unwrap_or(c.config);
                std::fs::write(&dest, updated.to_toml())?;
                eprintln!("calibrated constants written to {}", dest.display());
            } else {
                eprintln!("already calibrated; nothing to do");
            }
            return Ok(0);
        }
        Command::Rank(a) => (Kind::Rank, a),
        Command::DzCount(a) => (Kind::DzCount, a),
        Command::Thquant(a) => (Kind::Thquant, a),
        Command::CountLattice(a) => (Kind::CountLattice, a),
        Command::Davenport(a) => (Kind::Davenport, a),
        Command::LocalAudit(a) => (Kind::LocalAudit, a),
        Command::ThinSet(a) => (Kind::ThinSet, a),
    };
    let cfg = load(kind, &args)?;
    let outcome = harness::with_workers(workers, || harness::run(&cfg))??;
    harness::write_outputs(
        &outcome,
        &PathBuf::from(&cfg.output.jsonl),
        &PathBuf::from(&cfg.output.csv),
    )?;
    for v in &outcome.violations {
        eprintln!("violation: {v}");
    }
    eprintln!(
        "{kind}: {} records, {} violations -> {}",
        outcome.data().len(),
        outcome.violations.len(),
        cfg.output.jsonl
    );
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
