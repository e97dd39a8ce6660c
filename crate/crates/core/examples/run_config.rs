//! Loads a TOML run configuration and drives the same commands as the
//! binary, writing CSVs to a temporary directory.

use std::path::Path;

use herd_audit::cli::{cmd_equilibrium, cmd_oracle_check, cmd_solve_auditor, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    let exp = RunConfig::load(&config)?;
    let out = std::env::temp_dir().join("herd-audit-example");

    for output in [cmd_solve_auditor(&exp, &out)?, cmd_equilibrium(&exp, &out)?] {
        for line in output.lines {
            println!("{line}");
        }
        for file in output.files {
            println!("--- {}", file.display());
            print!("{}", std::fs::read_to_string(file)?);
        }
    }
    for line in cmd_oracle_check(&exp, false)?.lines() {
        println!("{line}");
    }
    Ok(())
}
