use herd_audit::auditor::AuditConfidence;
use herd_audit::developer::{
    developer_payoff, irresponsible_best_response, switch_condition, DeveloperStrategy,
};
use herd_audit::signal::{AccuracyModel, OutputMatrix, PrivacyBudgetGrid};

fn main() -> herd_audit::Result<()> {
    let grid = PrivacyBudgetGrid::new(vec![0.5, 1.0, 2.0], 0)?;
    let p = OutputMatrix::new(&grid, vec![vec![0.7, 0.3], vec![0.5, 0.5], vec![0.2, 0.8]])?;
    let acc = AccuracyModel::table(&grid, vec![0.3, 0.6, 0.7])?;
    // The auditor trusts signal 0 and distrusts signal 1.
    let r = AuditConfidence::from_good(vec![0.9, 0.2])?;

    for beta in [0.0, 0.5, 2.0] {
        for i in grid.deviations() {
            let q = DeveloperStrategy::pure_irresponsible(&grid, i)?;
            let pay = developer_payoff(&q, &p, &acc, &r, beta)?;
            println!(
                "beta {beta}: eps {} -> A = {:.3}, evasion = {:.3}, total = {:.3}",
                grid.budgets()[i],
                pay.expected_accuracy,
                pay.evasion_rate,
                pay.total
            );
        }
        let best = irresponsible_best_response(&p, &acc, &r, beta, &grid)?;
        let cond = switch_condition(&p, &acc, &r, beta, &grid)?;
        println!(
            "  best response eps {}, switch condition {cond:+.3}",
            grid.budgets()[best.pure_index().unwrap()]
        );
    }
    Ok(())
}
