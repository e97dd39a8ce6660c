//! Compares each closed-form solver with its brute-force counterpart on a
//! handful of instances.

use herd_audit::auditor::{
    comparative_statics, solve_audit_confidence, solve_information_strategy, AuditorParams, Utility,
};
use herd_audit::oracle::{
    finite_difference, grid_max_information_strategy, simplex_max_confidence, GridSpec,
};
use herd_audit::signal::HypothesisPair;

fn main() -> herd_audit::Result<()> {
    let spec = GridSpec::default();
    let utility = Utility {
        good_compliant: 0.5,
        good_noncompliant: -1.0,
        bad_compliant: -2.0,
        bad_noncompliant: 0.0,
    };
    for lambda in [0.2, 1.0, 5.0] {
        let params = AuditorParams::new(0.6, utility, lambda)?;
        let sol = solve_information_strategy(&params, 2)?;
        let grid = grid_max_information_strategy(&params, &spec);
        println!(
            "information strategy, lambda {lambda}: solver {:.6}  grid {:.6}",
            sol.value, grid.value
        );
    }

    let hyp = HypothesisPair::new(vec![0.5, 0.3, 0.2], vec![0.1, 0.3, 0.6])?;
    let params = AuditorParams::dp_game(0.4, -1.5, -0.7, 0.8)?;
    let r = solve_audit_confidence(&params, &hyp)?;
    let best = simplex_max_confidence(&params, &hyp, &GridSpec::new(201, 1e-3)?)?;
    let cs = comparative_statics(&params, &hyp)?;
    for s in 0..hyp.len() {
        let fd = finite_difference(
            |l| Ok(solve_audit_confidence(&params.with_lambda(l)?, &hyp)?.good()[s]),
            params.lambda(),
            1e-5,
        )?;
        println!(
            "s{s}: r(g|s) closed {:.6} grid {:.6} | dr/dlambda analytic {:+.9} numeric {:+.9}",
            r.good()[s],
            best.r_good[s],
            cs.dr_dlambda[s],
            fd
        );
    }
    Ok(())
}
