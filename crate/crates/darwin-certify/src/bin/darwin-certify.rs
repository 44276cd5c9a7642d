//! Command-line front end: scenario ingestion, certification, sweeps, and
//! spectrum-broadcast detection. All heavy lifting lives in the library.
//!
//! Exit status contract: 0 = classical objectivity EMERGED, 2 = NOT_CERTIFIED,
//! 3 = MARGINAL, 64 = scenario validation or parse error, 70 = internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use darwin_certify::bounds::Verdict;
use darwin_certify::pipeline::{
    self, exit_codes, verdict_exit_code, PipelineError, RunConfig, SweepParameter,
};
use darwin_certify::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "darwin-certify",
    about = "Certifies emergence of classical objectivity in environment-as-witness dynamics",
    long_about = "Models environment-as-witness dynamics as measure-and-prepare channels, \
computes each observer's distinguishability η by certified minimum-error state \
discrimination, compares it against the pointer cut-off P̂, and constructs the explicit \
noncontextual ontological model whenever the certification succeeds.\n\n\
Solver defaults: the discrimination fixed point is capped at 10000 iterations, the \
distinguishability minimization at 2000 outer steps; certificate gaps default to 1e-6 \
(override with --tol or the scenario's tolerances block). A single 64-bit seed drives \
all random draws; DARWIN_CERTIFY_THREADS caps sweep parallelism.\n\n\
Exit status: 0 EMERGED, 2 NOT_CERTIFIED, 3 MARGINAL, 64 validation error, 70 internal error.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (UTF-8 JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Report output path; sibling artifacts (CSV, channel, models) are
    /// written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the certificate tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Full certification: η per observer, P̂, verdict, models.
    Certify(CommonArgs),
    /// Evaluate the scenario along one parameter grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Sweepable field: noise, coupling_angle, or n.
        #[arg(long)]
        param: SweepParameter,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Number of grid points.
        #[arg(long)]
        steps: usize,
    },
    /// Detect spectrum-broadcast structure on a joint channel and certify
    /// through the automatic path when present.
    Ssb(CommonArgs),
    /// Parse and validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn load(common: &CommonArgs) -> Result<(Scenario, RunConfig), PipelineError> {
    let scenario = Scenario::load(&common.scenario)?;
    let config = RunConfig {
        seed_override: common.seed,
        tol_override: common.tol,
    };
    Ok((scenario, config))
}

fn run() -> Result<i32, PipelineError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Certify(common) => {
            let (scenario, config) = load(&common)?;
            let report = pipeline::certify(&scenario, &config, common.out.as_deref())?;
            println!(
                "{}: verdict {} (eta {:.9} in [{:.9}, {:.9}], p_hat {:.9} ± {:.1e})",
                report.scenario,
                report.verdict,
                report.process_eta,
                report.process_eta_lower,
                report.process_eta_upper,
                report.cutoff.p_hat,
                report.cutoff.gap
            );
            if common.out.is_none() {
                print!("{}", report.to_json());
            }
            Ok(verdict_exit_code(report.verdict))
        }
        Command::Sweep {
            common,
            param,
            from,
            to,
            steps,
        } => {
            let (scenario, config) = load(&common)?;
            let table = pipeline::sweep(
                &scenario,
                &config,
                param,
                from,
                to,
                steps,
                common.out.as_deref(),
            )?;
            match table.crossing {
                Some((a, b)) => println!(
                    "{}: {} grid points; eta crosses p_hat between {a:.9} and {b:.9}",
                    scenario.name,
                    table.rows.len()
                ),
                None => println!(
                    "{}: {} grid points; no crossing inside the grid",
                    scenario.name,
                    table.rows.len()
                ),
            }
            if common.out.is_none() {
                print!("{}", table.to_csv());
            }
            Ok(0)
        }
        Command::Ssb(common) => {
            let (scenario, config) = load(&common)?;
            let report = pipeline::ssb(&scenario, &config, common.out.as_deref())?;
            if report.is_ssb {
                println!(
                    "{}: spectrum broadcast structure detected; verdict {} with p_hat {:.9}",
                    report.scenario,
                    report.verdict,
                    report.p_hat.unwrap_or(f64::NAN)
                );
            } else {
                println!(
                    "{}: no spectrum broadcast structure ({} violations)",
                    report.scenario,
                    report.violations.len()
                );
                for v in &report.violations {
                    println!("  - {v}");
                }
            }
            if common.out.is_none() {
                print!("{}", report.to_json());
            }
            Ok(match report.verdict {
                Verdict::Emerged => exit_codes::EMERGED,
                Verdict::Marginal => exit_codes::MARGINAL,
                Verdict::NotCertified => exit_codes::NOT_CERTIFIED,
            })
        }
        Command::Validate { scenario } => {
            let summary = pipeline::validate(&scenario)?;
            println!("OK {summary}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            let code = match &err {
                PipelineError::Scenario(_) | PipelineError::BadSweepParameter { .. } => {
                    exit_codes::VALIDATION
                }
                PipelineError::MissingSsbDeclaration => exit_codes::VALIDATION,
                _ => exit_codes::INTERNAL,
            };
            ExitCode::from(code as u8)
        }
    }
}
