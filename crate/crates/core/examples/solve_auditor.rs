//! Closed-form audit confidence for a two-signal mechanism, with the
//! per-signal comparative statics.

use herd_audit::auditor::{comparative_statics, solve_audit_confidence, AuditorParams};
use herd_audit::developer::DeveloperStrategy;
use herd_audit::signal::{mix_hypotheses, OutputMatrix, PrivacyBudgetGrid};

fn main() -> herd_audit::Result<()> {
    let grid = PrivacyBudgetGrid::new(vec![0.5, 2.0], 0)?;
    let p = OutputMatrix::new(&grid, vec![vec![0.75, 0.25], vec![0.25, 0.75]])?;
    let good = DeveloperStrategy::responsible(&grid);
    let bad = DeveloperStrategy::pure_irresponsible(&grid, 1)?;
    let hyp = mix_hypotheses(&p, &good, &bad)?;

    for lambda in [0.1, 1.0, 5.0] {
        let params = AuditorParams::dp_game(0.5, -1.0, -1.0, lambda)?;
        let r = solve_audit_confidence(&params, &hyp)?;
        let cs = comparative_statics(&params, &hyp)?;
        println!("lambda = {lambda}");
        for s in 0..hyp.len() {
            println!(
                "  s{s}: Q_b/v = {:.2}  r(g|s) = {:.6}  r(b|s) = {:.6}  chi = {:+.3}  dr/dlambda = {:+.6}",
                hyp.bad_ratio(s).unwrap(),
                r.good()[s],
                r.bad()[s],
                cs.chi[s],
                cs.dr_dlambda[s],
            );
        }
    }
    Ok(())
}
