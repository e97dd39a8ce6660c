use std::path::{Path, PathBuf};

use super::config::{Experiment, SweepKind};
use super::{format_number as num, CliError};
use crate::auditor::{
    comparative_statics, confidence_at_ratio, dr_dratio_at_ratio, signal_posteriors,
    solve_audit_confidence, solve_information_strategy, AuditConfidence, SolutionKind,
};
use crate::developer::{irresponsible_best_response, DeveloperStrategy};
use crate::equilibrium::{solve, sweep_lambda_with, sweep_qratio, EquilibriumResult, Outcome};
use crate::oracle::{
    confidence_objective_at, exhaustive_developer, finite_difference,
    grid_max_information_strategy, simplex_max_confidence,
};
use crate::signal::{check_dp_inequality, max_log_ratio, MechanismModel, DISTRIBUTION_TOLERANCE};

/// Files written and lines meant for standard output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

fn writer(out: &Path, name: &str) -> Result<(csv::Writer<std::fs::File>, PathBuf), CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let path = out.join(name);
    Ok((csv::Writer::from_path(&path)?, path))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `confidence.csv` for the configured developer strategy and, when
/// requested, `info_strategy.csv` from the general-utility solver.
pub fn cmd_solve_auditor(exp: &Experiment, out: &Path) -> Result<CommandOutput, CliError> {
    let params = exp.game.auditor();
    let hyp = exp.game.hypotheses(&exp.bad_strategy)?;
    let r = solve_audit_confidence(params, &hyp)?;
    let statics = comparative_statics(params, &hyp)?;
    let mut output = CommandOutput::default();

    let (mut w, path) = writer(out, "confidence.csv")?;
    w.write_record(["signal", "Q_g", "Q_b", "v", "r_g", "r_b", "chi", "phi"])?;
    for s in 0..hyp.len() {
        w.write_record([
            s.to_string(),
            num(hyp.q_good()[s]),
            num(hyp.q_bad()[s]),
            num(hyp.totals()[s]),
            num(r.good()[s]),
            num(r.bad()[s]),
            num(statics.chi[s]),
            num(statics.phi[s]),
        ])?;
    }
    finish(w, &path)?;
    output.lines.push(format!(
        "solve-auditor: lambda={} signals={} zero-mass={}",
        num(params.lambda()),
        hyp.len(),
        r.zero_mass().iter().filter(|z| **z).count()
    ));
    output.files.push(path);

    if exp.information_strategy {
        let general = &exp.general_auditor;
        let sol = solve_information_strategy(general, hyp.len())?;
        let posteriors = signal_posteriors(general, &sol.strategy);
        let (mut w, path) = writer(out, "info_strategy.csv")?;
        w.write_record(["signal", "d_g", "d_b", "action", "posterior_g"])?;
        for s in 0..hyp.len() {
            w.write_record([
                s.to_string(),
                num(sol.strategy.good()[s]),
                num(sol.strategy.bad()[s]),
                sol.rule.action(s).to_string(),
                posteriors[s].map(num).unwrap_or_default(),
            ])?;
        }
        finish(w, &path)?;
        let kind = match sol.kind {
            SolutionKind::Consistent { consistent } => format!("consistent({consistent})"),
            SolutionKind::Degenerate => "degenerate".into(),
        };
        output.lines.push(format!(
            "information strategy: value={} E[u]={} I={} partitions={kind}",
            num(sol.value),
            num(sol.expected_utility),
            num(sol.mutual_information)
        ));
        output.files.push(path);
    }
    Ok(output)
}

fn strategy_label(exp: &Experiment, d: &DeveloperStrategy) -> String {
    let budgets = exp.game.grid().budgets();
    match d.pure_index() {
        Some(i) => num(budgets[i]),
        None => d
            .weights()
            .iter()
            .zip(budgets)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, e)| format!("{}@{}", num(*w), num(*e)))
            .collect::<Vec<_>>()
            .join("+"),
    }
}

fn outcome_record(exp: &Experiment, kind: &str, o: &Outcome) -> [String; 6] {
    [
        kind.to_string(),
        strategy_label(exp, &o.developer),
        num(o.expected_accuracy),
        num(o.evasion_rate),
        num(o.developer_total),
        num(o.auditor_value),
    ]
}

fn summary(exp: &Experiment, eq: &EquilibriumResult) -> String {
    let mut line = format!(
        "equilibrium: mode={} epsilon={} developer_total={} evasion_rate={} auditor_value={} converged={}",
        eq.mode.name(),
        strategy_label(exp, eq.developer()),
        num(eq.developer_total()),
        num(eq.evasion_rate()),
        num(eq.auditor_value()),
        eq.converged
    );
    if !eq.history.is_empty() {
        let budgets = exp.game.grid().budgets();
        let path: Vec<String> = eq.history.iter().map(|&i| num(budgets[i])).collect();
        line.push_str(&format!(" history={}", path.join(",")));
    }
    line
}

/// Writes `equilibrium.csv`: the equilibrium row, one row per pure
/// deviation against its own follower response and the best probed mixture.
pub fn cmd_equilibrium(exp: &Experiment, out: &Path) -> Result<CommandOutput, CliError> {
    let eq = solve(&exp.game, exp.mode, &exp.leader, exp.max_rounds)?;
    let (mut w, path) = writer(out, "equilibrium.csv")?;
    w.write_record([
        "row",
        "epsilon",
        "expected_accuracy",
        "evasion_rate",
        "developer_total",
        "auditor_value",
    ])?;
    w.write_record(outcome_record(exp, "equilibrium", &eq.outcome))?;
    for c in &eq.candidates {
        w.write_record(outcome_record(exp, "candidate", c))?;
    }
    if let Some(m) = &eq.best_mixture {
        w.write_record(outcome_record(exp, "mixture", m))?;
    }
    finish(w, &path)?;
    Ok(CommandOutput {
        files: vec![path],
        lines: vec![summary(exp, &eq)],
    })
}

/// Writes `sweep.csv` over the configured `λ` grid (equilibrium per point)
/// or ratio grid (closed-form confidence per `λ` and ratio).
pub fn cmd_sweep(exp: &Experiment, out: &Path) -> Result<CommandOutput, CliError> {
    let kind = match exp.sweep {
        Some(k) => k,
        None if exp.ratio_grid.is_some() => SweepKind::Ratio,
        None if exp.lambda_grid.is_some() => SweepKind::Lambda,
        None => {
            return Err(CliError::config(
                "run.sweep",
                "no lambda_grid or ratio_grid configured",
            ))
        }
    };
    let (mut w, path) = writer(out, "sweep.csv")?;
    let mut lines = Vec::new();
    match kind {
        SweepKind::Lambda => {
            let lambdas = exp
                .lambda_grid
                .as_ref()
                .ok_or_else(|| CliError::config("auditor.lambda_grid", "missing"))?;
            let rows =
                sweep_lambda_with(&exp.game, lambdas, exp.mode, &exp.leader, exp.max_rounds)?;
            w.write_record([
                "lambda",
                "signal",
                "Q_g",
                "Q_b",
                "r_g",
                "r_b",
                "chi",
                "epsilon",
                "evasion_rate",
                "developer_total",
            ])?;
            for row in &rows {
                let eq = &row.equilibrium;
                let hyp = &eq.outcome.hypotheses;
                let label = strategy_label(exp, eq.developer());
                for s in 0..hyp.len() {
                    w.write_record([
                        num(row.lambda),
                        s.to_string(),
                        num(hyp.q_good()[s]),
                        num(hyp.q_bad()[s]),
                        num(eq.confidence().good()[s]),
                        num(eq.confidence().bad()[s]),
                        num(row.chi[s]),
                        label.clone(),
                        num(eq.evasion_rate()),
                        num(eq.developer_total()),
                    ])?;
                }
            }
            let violations = crate::equilibrium::deterrence_violations(&rows);
            lines.push(format!(
                "sweep: {} lambda points, deterrence violations={}",
                rows.len(),
                violations.len()
            ));
            for (a, b) in violations {
                lines.push(format!(
                    "  evasion rate fell from lambda={} to lambda={}",
                    num(a),
                    num(b)
                ));
            }
        }
        SweepKind::Ratio => {
            let ratios = exp
                .ratio_grid
                .as_ref()
                .ok_or_else(|| CliError::config("run.ratio_grid", "missing"))?;
            let mut lambdas = exp
                .lambda_grid
                .clone()
                .unwrap_or_else(|| vec![exp.game.auditor().lambda()]);
            lambdas.sort_by(f64::total_cmp);
            w.write_record(["lambda", "ratio", "r_g", "r_b", "dr_dratio"])?;
            for &lambda in &lambdas {
                let params = exp.game.auditor().with_lambda(lambda)?;
                let rows = sweep_qratio(&params, ratios)?;
                for row in &rows {
                    w.write_record([
                        num(lambda),
                        num(row.ratio),
                        num(row.r_good),
                        num(row.r_bad),
                        num(row.dr_dratio),
                    ])?;
                }
                lines.push(format!(
                    "sweep: lambda={} max |step r_g|={}",
                    num(lambda),
                    num(crate::equilibrium::max_abs_step(&rows))
                ));
            }
        }
    }
    finish(w, &path)?;
    Ok(CommandOutput {
        files: vec![path],
        lines,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub gap: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {} gap={} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            num(self.gap),
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleReport {
    pub checks: Vec<CheckOutcome>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks.iter().map(CheckOutcome::line).collect()
    }

    /// `Ok` when every check passed, otherwise the failing lines.
    pub fn into_result(self) -> Result<OracleReport, CliError> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::OracleFailure(
                self.checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(CheckOutcome::line)
                    .collect(),
            ))
        }
    }
}

fn derivative_gap(analytic: f64, numeric: f64) -> (f64, bool) {
    let gap = (analytic - numeric).abs();
    (gap, gap <= 1e-6 * analytic.abs() + 1e-9)
}

/// Runs every oracle against its solver on the configured instance. With
/// `corrupt_closed_form`, the closed-form confidence is perturbed before it
/// is compared so the failure path can be exercised.
pub fn cmd_oracle_check(
    exp: &Experiment,
    corrupt_closed_form: bool,
) -> Result<OracleReport, CliError> {
    let spec = &exp.oracle_grid;
    let params = exp.game.auditor();
    let mut checks = Vec::new();

    let general = &exp.general_auditor;
    let solved = solve_information_strategy(general, 2)?;
    let grid_best = grid_max_information_strategy(general, spec);
    let gap = grid_best.value - solved.value;
    checks.push(CheckOutcome {
        name: "information-strategy",
        passed: gap <= spec.tolerance(),
        gap: gap.max(0.0),
        detail: format!(
            "solver={} grid={} tol={}",
            num(solved.value),
            num(grid_best.value),
            num(spec.tolerance())
        ),
    });

    let hyp = exp.game.hypotheses(&exp.bad_strategy)?;
    let r = solve_audit_confidence(params, &hyp)?;
    let closed: Vec<f64> = if corrupt_closed_form {
        r.good()
            .iter()
            .map(|x| (x + 0.1).min(1.0) * 0.9 + 0.05)
            .collect()
    } else {
        r.good().to_vec()
    };
    let best = simplex_max_confidence(params, &hyp, spec)?;
    let r_gap = closed
        .iter()
        .zip(&best.r_good)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let closed_value: f64 = (0..hyp.len())
        .map(|s| confidence_objective_at(params, hyp.q_good()[s], hyp.q_bad()[s], closed[s]))
        .sum();
    let value_gap = best.total() - closed_value;
    checks.push(CheckOutcome {
        name: "audit-confidence",
        passed: r_gap <= spec.step() + 1e-6 && value_gap <= 1e-9,
        gap: r_gap,
        detail: format!(
            "step={} objective_gap={}",
            num(spec.step()),
            num(value_gap.max(0.0))
        ),
    });

    let statics = comparative_statics(params, &hyp)?;
    let h_lambda = 1e-5 * params.lambda().max(1.0);
    let h_ratio = 1e-5;
    let mut worst = 0.0_f64;
    let mut ok = true;
    let mut checked = 0;
    for s in 0..hyp.len() {
        let v = hyp.totals()[s];
        if !(v > 0.0) {
            continue;
        }
        let ratio = hyp.q_bad()[s] / v;
        let fd_lambda = finite_difference(
            |l| Ok(solve_audit_confidence(&params.with_lambda(l)?, &hyp)?.good()[s]),
            params.lambda(),
            h_lambda,
        )?;
        let (g, pass) = derivative_gap(statics.dr_dlambda[s], fd_lambda);
        worst = worst.max(g);
        ok &= pass;
        if ratio > h_ratio && ratio < 1.0 - h_ratio {
            let fd_ratio =
                finite_difference(|x| Ok(confidence_at_ratio(params, x)?.0), ratio, h_ratio)?;
            let (g, pass) = derivative_gap(dr_dratio_at_ratio(params, ratio)?, fd_ratio);
            worst = worst.max(g);
            ok &= pass;
        }
        checked += 1;
    }
    checks.push(CheckOutcome {
        name: "derivatives",
        passed: ok,
        gap: worst,
        detail: format!("signals={checked} rel_tol=1e-6"),
    });

    let grid = exp.game.grid();
    let confidence = AuditConfidence::from_good(r.good().to_vec())?;
    let exhaustive = exhaustive_developer(
        exp.game.outputs(),
        exp.game.accuracy(),
        &confidence,
        exp.game.beta(),
        grid,
    )?;
    let response = irresponsible_best_response(
        exp.game.outputs(),
        exp.game.accuracy(),
        &r,
        exp.game.beta(),
        grid,
    )?
    .pure_index()
    .expect("best response is pure");
    checks.push(CheckOutcome {
        name: "developer-best-response",
        passed: exhaustive == response,
        gap: if exhaustive == response { 0.0 } else { 1.0 },
        detail: format!(
            "solver={} exhaustive={}",
            num(grid.budgets()[response]),
            num(grid.budgets()[exhaustive])
        ),
    });
    Ok(OracleReport { checks })
}

/// Reports `max |ln p(B|D1) − ln p(B|D2)|` per budget and a zero-shift row.
pub fn cmd_verify_dp(exp: &Experiment) -> Result<(CommandOutput, bool), CliError> {
    let space = match (&exp.mechanism, &exp.space) {
        (MechanismModel::DiscretizedLaplace { .. }, Some(space)) => space,
        _ => {
            return Err(CliError::Model(crate::error::AuditError::Unsupported(
                "verify-dp needs the Laplace mechanism".into(),
            )))
        }
    };
    let tolerance = 1e-9;
    let mut lines = Vec::new();
    let mut all = true;
    for &eps in exp.game.grid().budgets() {
        let check = check_dp_inequality(&exp.mechanism, eps, space)?;
        let pass = check.passes(tolerance);
        all &= pass;
        lines.push(format!(
            "{} epsilon={} max_log_ratio={} bound={}",
            if pass { "PASS" } else { "FAIL" },
            num(eps),
            num(check.max_log_ratio),
            num(eps + tolerance)
        ));
    }
    let eps = exp.game.grid().claimed();
    let zero = max_log_ratio(&exp.mechanism, eps, space, 0.0)?;
    let pass = zero <= DISTRIBUTION_TOLERANCE;
    all &= pass;
    lines.push(format!(
        "{} zero-shift epsilon={} max_log_ratio={}",
        if pass { "PASS" } else { "FAIL" },
        num(eps),
        num(zero)
    ));
    Ok((
        CommandOutput {
            files: Vec::new(),
            lines,
        },
        all,
    ))
}
