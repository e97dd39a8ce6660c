//! Checks the binned Laplace mechanism against the ε-DP inequality and
//! prints how far each budget's output distribution is from the claimed one.

use herd_audit::signal::{
    check_dp_inequality, distinguishability, output_distribution, MechanismModel,
    PrivacyBudgetGrid, SignalSpace,
};

fn main() -> herd_audit::Result<()> {
    let grid = PrivacyBudgetGrid::new(vec![0.25, 0.5, 1.0, 2.0, 4.0], 1)?;
    let mech = MechanismModel::laplace(10.0, 1.0)?;
    for bins in [2, 8, 32] {
        let space = SignalSpace::uniform(0.0, 20.0, bins)?;
        println!("{bins} bins");
        for &eps in grid.budgets() {
            let check = check_dp_inequality(&mech, eps, &space)?;
            println!(
                "  eps {eps:>5}: max |ln ratio| = {:.12}  {}",
                check.max_log_ratio,
                if check.passes(1e-9) { "ok" } else { "VIOLATED" }
            );
        }
        let p = output_distribution(&mech, &grid, &space)?;
        let kl = distinguishability(&p, grid.claimed_index());
        println!("  KL(p(.|eps') || p(.|eps)) = {kl:.6?}");
    }
    Ok(())
}
