use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use mbherm_cli::pipeline::{self, Scope, EXIT_PARSE};
use mbherm_cli::problem::{self, Overrides};
use mbherm_cli::report::{render_human, Report};
use mbherm_core::ratlin::{parse_rational, Rational};

/// Invariant Hermitian forms for the Mellin-Barnes monodromy of
/// A-hypergeometric systems.
#[derive(Parser)]
#[command(name = "mbherm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Problem file (JSON).
    file: PathBuf,
    /// Residual tolerance override.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Working precision in bits (only 53 is supported).
    #[arg(long)]
    precision: Option<u32>,
    /// Seed for chamber sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the machine-readable report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and every verification.
    Analyze(CommonArgs),
    /// Enumerate chambers, walls and cotriangulations only.
    Chambers(CommonArgs),
    /// List solution points per chamber.
    Solutions(CommonArgs),
    /// Build the Hermitian package (optionally for a single chamber).
    Hermitian {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict output to one chamber index.
        #[arg(long)]
        chamber: Option<usize>,
    },
    /// Residue-identity table at an explicit tau in Z_B.
    Residues {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated rational coordinates, e.g. "1,0" or "1/2,-1".
        #[arg(long)]
        tau: String,
    },
}

fn load(common: &CommonArgs) -> anyhow::Result<problem::ResolvedProblem> {
    let text = std::fs::read_to_string(&common.file)
        .with_context(|| format!("cannot read {}", common.file.display()))?;
    let file = problem::parse_problem(&text)?;
    problem::resolve(
        file,
        &Overrides {
            tolerance: common.tolerance,
            precision: common.precision,
            seed: common.seed,
        },
    )
}

fn emit(report: &Report, common: &CommonArgs) -> anyhow::Result<()> {
    if let Some(path) = &common.json {
        std::fs::write(path, report.to_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    print!("{}", render_human(report));
    Ok(())
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(common) => {
            let prob = load(&common)?;
            let report = pipeline::analyze(&prob, Scope::FULL)?;
            emit(&report, &common)?;
            Ok(report.exit_code)
        }
        Command::Chambers(common) | Command::Solutions(common) => {
            let prob = load(&common)?;
            let report = pipeline::analyze(&prob, Scope::GEOMETRY)?;
            emit(&report, &common)?;
            Ok(if report.exit_code == pipeline::EXIT_RESONANT {
                pipeline::EXIT_RESONANT
            } else {
                pipeline::EXIT_PASS
            })
        }
        Command::Hermitian { common, chamber } => {
            let prob = load(&common)?;
            let mut report = pipeline::analyze(&prob, Scope::HERMITIAN)?;
            if let Some(idx) = chamber {
                if idx >= report.chambers.len() {
                    anyhow::bail!(
                        "chamber index {idx} out of range ({} chambers)",
                        report.chambers.len()
                    );
                }
                report.hermitian.retain(|h| h.chamber == idx);
                report.verification.invariance.retain(|e| e.h_chamber == idx && e.m_chamber == idx);
                report.verification.spectrum.retain(|e| e.chamber == idx);
                report.verification.h_reconstruction.retain(|e| e.chamber == idx);
            }
            emit(&report, &common)?;
            Ok(report.exit_code)
        }
        Command::Residues { common, tau } => {
            let prob = load(&common)?;
            let tau: Vec<Rational> = tau
                .split(',')
                .map(|s| parse_rational(s).map_err(anyhow::Error::from))
                .collect::<anyhow::Result<_>>()
                .context("cannot parse --tau")?;
            if tau.len() != prob.sys.d() {
                anyhow::bail!("--tau needs {} coordinates, got {}", prob.sys.d(), tau.len());
            }
            let (report, _) = pipeline::residues_at(&prob, &tau)?;
            emit(&report, &common)?;
            Ok(report.exit_code)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_PARSE as u8)
        }
    }
}
