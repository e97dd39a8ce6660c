use herd_audit::auditor::{
    posterior_confidence, signal_posteriors, solve_information_strategy, AuditorParams,
    SolutionKind, Utility,
};

fn main() -> herd_audit::Result<()> {
    let utility = Utility {
        good_compliant: 1.0,
        good_noncompliant: -0.5,
        bad_compliant: -2.0,
        bad_noncompliant: 0.5,
    };
    for lambda in [0.1, 0.5, 2.0, 50.0] {
        let params = AuditorParams::new(0.7, utility, lambda)?;
        let sol = solve_information_strategy(&params, 3)?;
        let label = match sol.kind {
            SolutionKind::Consistent { consistent } => {
                format!("{consistent} consistent partitions")
            }
            SolutionKind::Degenerate => "no information acquired".to_string(),
        };
        println!(
            "lambda = {lambda}: value {:.6} (E[u] {:.6}, I {:.6}), {label}",
            sol.value, sol.expected_utility, sol.mutual_information
        );
        let posteriors = signal_posteriors(&params, &sol.strategy);
        for s in 0..sol.strategy.len() {
            println!(
                "  s{s}: d(s|g) = {:.6}  d(s|b) = {:.6}  action {}  mu(g|s) = {}",
                sol.strategy.good()[s],
                sol.strategy.bad()[s],
                sol.rule.action(s),
                posteriors[s].map_or("-".to_string(), |p| format!("{p:.6}")),
            );
        }
        let cells = posterior_confidence(&params, &sol.strategy, &sol.rule)?;
        println!("  P(g | reported T) = {:?}", cells.good_given_compliant);
    }
    Ok(())
}
