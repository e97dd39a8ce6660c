//! Configuration files, CSV output and the command runners behind the
//! `herd-audit` binary.

mod commands;
mod config;

use std::path::PathBuf;

use thiserror::Error;

use crate::error::AuditError;

pub use commands::{
    cmd_equilibrium, cmd_oracle_check, cmd_solve_auditor, cmd_sweep, cmd_verify_dp, CheckOutcome,
    CommandOutput, OracleReport,
};
pub use config::{
    read_table, AccuracyKind, AccuracySection, AuditorSection, BudgetsSection, DeveloperSection,
    Experiment, MechanismKind, MechanismSection, ModeName, RunConfig, RunSection, SweepKind,
    UtilitySection,
};

/// Exit status for a failed configuration or solver error.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status when an oracle check fails.
pub const EXIT_ORACLE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration value failed validation; `field` is its dotted path.
    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot parse config: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Model(#[from] AuditError),

    #[error("oracle check failed: {}", .0.join("; "))]
    OracleFailure(Vec<String>),
}

impl CliError {
    pub fn config(field: &str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleFailure(_) => EXIT_ORACLE,
            _ => EXIT_VALIDATION,
        }
    }
}

/// Formats `x` with 12 significant digits, switching to exponent notation
/// outside `[1e-4, 1e12)` and dropping trailing zeros.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
