//! Audit confidence against the epistemic factor at fixed hypotheses.
//! Prints CSV suitable for plotting.

use herd_audit::auditor::AuditorParams;
use herd_audit::equilibrium::{sweep_lambda, GameInstance};
use herd_audit::signal::{AccuracyModel, OutputMatrix, PrivacyBudgetGrid};

fn main() -> herd_audit::Result<()> {
    // Signal 0 has Q_b/v = 0.25, signal 1 has Q_b/v = 0.85.
    let grid = PrivacyBudgetGrid::new(vec![0.5, 2.0], 0)?;
    let p = OutputMatrix::new(
        &grid,
        vec![vec![21.0 / 24.0, 3.0 / 24.0], vec![7.0 / 24.0, 17.0 / 24.0]],
    )?;
    let auditor = AuditorParams::dp_game(0.5, -1.0, -1.0, 1.0)?;
    let game = GameInstance::new(grid, p, AccuracyModel::ExponentialSaturation, auditor, 1.0)?;

    let lambdas: Vec<f64> = (1..=100).map(|k| 0.05 * k as f64).collect();
    let rows = sweep_lambda(&game, &lambdas)?;
    println!("lambda,r_g_s0,chi_s0,r_b_s1,chi_s1");
    for row in rows {
        let r = row.equilibrium.confidence();
        println!(
            "{:.2},{:.6},{:+.3},{:.6},{:+.3}",
            row.lambda,
            r.good()[0],
            row.chi[0],
            r.bad()[1],
            row.chi[1]
        );
    }
    Ok(())
}
