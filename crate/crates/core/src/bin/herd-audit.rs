use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use herd_audit::cli::{self, CliError, CommandOutput, Experiment, RunConfig};
use herd_audit::equilibrium::SolveMode;

#[derive(Parser)]
#[command(
    name = "herd-audit",
    version,
    about = "Solve the herd-audit game from a TOML config"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    LeaderEnumeration,
    Iteration,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `run.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Equilibrium solution mode; overrides `run.mode`.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form audit confidence (and optionally the information strategy).
    SolveAuditor(Common),
    /// Stackelberg equilibrium with the per-candidate breakdown.
    Equilibrium(Common),
    /// Sweep over the configured lambda or ratio grid.
    Sweep(Common),
    /// Compare every solver against its brute-force oracle.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        corrupt_closed_form: bool,
    },
    /// Check the discretized Laplace mechanism against the DP inequality.
    VerifyDp(Common),
}

fn load(common: &Common) -> Result<(Experiment, PathBuf), CliError> {
    let mut exp = RunConfig::load(&common.config)?;
    if let Some(mode) = common.mode {
        exp.mode = match mode {
            Mode::LeaderEnumeration => SolveMode::LeaderEnumeration,
            Mode::Iteration => SolveMode::BestResponseIteration,
        };
    }
    let out = common
        .out
        .clone()
        .or_else(|| exp.out.clone())
        .unwrap_or_else(|| Path::new("out").to_path_buf());
    Ok((exp, out))
}

fn emit(output: &CommandOutput) {
    for line in &output.lines {
        println!("{line}");
    }
    for file in &output.files {
        println!("wrote {}", file.display());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::SolveAuditor(c) => {
            let (exp, out) = load(&c)?;
            emit(&cli::cmd_solve_auditor(&exp, &out)?);
        }
        Command::Equilibrium(c) => {
            let (exp, out) = load(&c)?;
            emit(&cli::cmd_equilibrium(&exp, &out)?);
        }
        Command::Sweep(c) => {
            let (exp, out) = load(&c)?;
            emit(&cli::cmd_sweep(&exp, &out)?);
        }
        Command::OracleCheck {
            common,
            corrupt_closed_form,
        } => {
            let (exp, _) = load(&common)?;
            let report = cli::cmd_oracle_check(&exp, corrupt_closed_form)?;
            for line in report.lines() {
                println!("{line}");
            }
            report.into_result()?;
        }
        Command::VerifyDp(c) => {
            let (exp, _) = load(&c)?;
            let (output, passed) = cli::cmd_verify_dp(&exp)?;
            emit(&output);
            if !passed {
                return Err(CliError::OracleFailure(vec![
                    "DP inequality violated".into()
                ]));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
