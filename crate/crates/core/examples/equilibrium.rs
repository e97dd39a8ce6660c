//! Stackelberg equilibrium of the three-budget Laplace game, solved by
//! leader enumeration (with mixture probing) and by best-response iteration.

use herd_audit::auditor::AuditorParams;
use herd_audit::equilibrium::{
    best_response_iteration, solve_stackelberg_with, GameInstance, LeaderOptions,
};
use herd_audit::signal::{
    output_distribution, AccuracyModel, MechanismModel, PrivacyBudgetGrid, SignalSpace,
};

fn main() -> herd_audit::Result<()> {
    let grid = PrivacyBudgetGrid::new(vec![0.5, 1.0, 2.0], 0)?;
    let mech = MechanismModel::laplace(0.0, 1.0)?;
    let space = SignalSpace::default_for(0.0, 1.0, &grid)?;
    let p = output_distribution(&mech, &grid, &space)?;
    let opts = LeaderOptions {
        mixture_step: Some(0.1),
    };

    for lambda in [0.1, 1.0, 1e6] {
        let auditor = AuditorParams::dp_game(0.5, -1.0, -1.0, lambda)?;
        let game = GameInstance::new(
            grid.clone(),
            p.clone(),
            AccuracyModel::ExponentialSaturation,
            auditor,
            1.0,
        )?;
        let eq = solve_stackelberg_with(&game, &opts)?;
        println!("lambda = {lambda}");
        for c in &eq.candidates {
            let i = c.developer.pure_index().unwrap();
            println!(
                "  eps {:>4}: total {:.6}  evasion {:.6}",
                grid.budgets()[i],
                c.developer_total,
                c.evasion_rate
            );
        }
        if let Some(m) = &eq.best_mixture {
            println!(
                "  best mixture {:?}: total {:.6}",
                m.developer.weights(),
                m.developer_total
            );
        }
        let chosen = eq.chosen_index().map(|i| grid.budgets()[i]);
        let it = best_response_iteration(&game, 50)?;
        println!(
            "  leader enumeration -> eps {chosen:?}; iteration -> history {:?}, converged {}",
            it.history, it.converged
        );
    }
    Ok(())
}
