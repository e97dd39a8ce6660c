//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Randomized criteria use fixed ChaCha seeds.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use herd_audit::auditor::{
    auditor_objective, bayes_decision_rule, comparative_statics, confidence_at_ratio,
    solve_audit_confidence, solve_information_strategy, AuditConfidence, AuditorParams,
    SolutionKind, Utility,
};
use herd_audit::developer::{irresponsible_best_response, DeveloperStrategy};
use herd_audit::equilibrium::{
    max_abs_step, solve_stackelberg, sweep_lambda, sweep_qratio, GameInstance,
};
use herd_audit::oracle::{
    confidence_objective_at, exhaustive_developer, finite_difference,
    grid_max_information_strategy, simplex_max_confidence, GridSpec,
};
use herd_audit::signal::{
    check_dp_inequality, distinguishability, mix_hypotheses, output_distribution, AccuracyModel,
    HypothesisPair, MechanismModel, OutputMatrix, PrivacyBudgetGrid, SignalSpace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = GridSpec::new(1001, 1e-3).map_err(err)?;
    let mut worst_r = 0.0_f64;
    let mut worst_value = f64::NEG_INFINITY;
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let params = AuditorParams::dp_game(
            rng.gen_range(0.1..0.9),
            rng.gen_range(-3.0..-0.2),
            rng.gen_range(-3.0..-0.2),
            rng.gen_range(0.05..5.0),
        )
        .map_err(err)?;
        let hyp = HypothesisPair::new(
            random_distribution(&mut rng, n),
            random_distribution(&mut rng, n),
        )
        .map_err(err)?;
        let r = solve_audit_confidence(&params, &hyp).map_err(err)?;
        let oracle = simplex_max_confidence(&params, &hyp, &spec).map_err(err)?;
        for s in 0..n {
            let gap = (r.good()[s] - oracle.r_good[s]).abs();
            worst_r = worst_r.max(gap);
            ensure(gap <= spec.step() + 1e-6, || {
                format!("signal {s}: |r - grid argmax| = {gap:e}")
            })?;
            // Every grid point of this signal's sweep is weakly dominated.
            let closed =
                confidence_objective_at(&params, hyp.q_good()[s], hyp.q_bad()[s], r.good()[s]);
            for k in 0..spec.resolution() {
                let x = k as f64 * spec.step();
                let value =
                    confidence_objective_at(&params, hyp.q_good()[s], hyp.q_bad()[s], x.min(1.0));
                worst_value = worst_value.max(value - closed);
                ensure(value <= closed + 1e-12, || {
                    format!("grid point {x} beats closed form by {:e}", value - closed)
                })?;
            }
        }
        let total = auditor_objective(&params, &hyp, &r).map_err(err)?;
        ensure(total >= oracle.total() - 1e-12, || {
            "objective below grid maximum".into()
        })?;
    }
    Ok(format!(
        "20 instances, max |r - argmax| = {worst_r:.2e} (step {:.0e}), max grid excess = {worst_value:.1e}",
        spec.step()
    ))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = GridSpec::default();
    let mut worst = f64::NEG_INFINITY;
    let mut consistent = 0;
    for _ in 0..10 {
        let gt = rng.gen_range(-1.0..2.0);
        let bf = rng.gen_range(-1.0..2.0);
        let u = Utility {
            good_compliant: gt,
            good_noncompliant: gt - rng.gen_range(0.2..3.0),
            bad_compliant: bf - rng.gen_range(0.2..3.0),
            bad_noncompliant: bf,
        };
        let params = AuditorParams::new(rng.gen_range(0.1..0.9), u, rng.gen_range(0.05..5.0))
            .map_err(err)?;
        let sol = solve_information_strategy(&params, 2).map_err(err)?;
        let grid = grid_max_information_strategy(&params, &spec);
        let gap = grid.value - sol.value;
        worst = worst.max(gap);
        ensure(gap <= 1e-3, || {
            format!("grid beats solver by {gap:e} ({params:?})")
        })?;
        ensure(
            bayes_decision_rule(&params, &sol.strategy) == sol.rule,
            || "returned partition is not reproduced by the threshold rule".into(),
        )?;
        if matches!(sol.kind, SolutionKind::Consistent { .. }) {
            consistent += 1;
        }
    }
    Ok(format!(
        "10 instances ({consistent} informative), max grid - solver = {worst:.2e}"
    ))
}

fn lambda_grid() -> Vec<f64> {
    (1..=100).map(|k| 0.05 * k as f64).collect()
}

fn criterion_3() -> Check {
    // Signal 0 has Q_b/v = 0.25, signal 1 has Q_b/v = 0.85.
    let grid = PrivacyBudgetGrid::new(vec![0.5, 2.0], 0).map_err(err)?;
    let p = OutputMatrix::new(
        &grid,
        vec![vec![21.0 / 24.0, 3.0 / 24.0], vec![7.0 / 24.0, 17.0 / 24.0]],
    )
    .map_err(err)?;
    let auditor = AuditorParams::dp_game(0.5, -1.0, -1.0, 1.0).map_err(err)?;
    let game = GameInstance::new(grid, p, AccuracyModel::ExponentialSaturation, auditor, 1.0)
        .map_err(err)?;
    let rows = sweep_lambda(&game, &lambda_grid()).map_err(err)?;
    let hyp = &rows[0].equilibrium.outcome.hypotheses;
    ensure((hyp.bad_ratio(0).unwrap() - 0.25).abs() < 1e-12, || {
        "ratio 0.25 not set".into()
    })?;
    ensure((hyp.bad_ratio(1).unwrap() - 0.85).abs() < 1e-12, || {
        "ratio 0.85 not set".into()
    })?;
    let r_g: Vec<f64> = rows
        .iter()
        .map(|r| r.equilibrium.confidence().good()[0])
        .collect();
    let r_b: Vec<f64> = rows
        .iter()
        .map(|r| r.equilibrium.confidence().bad()[1])
        .collect();
    for (name, series) in [("r(g|s) at 0.25", &r_g), ("r(b|s) at 0.85", &r_b)] {
        ensure(series.windows(2).all(|w| w[1] < w[0]), || {
            format!("{name} not strictly decreasing")
        })?;
        ensure(series[0] > 0.99, || {
            format!("{name} at lambda 0.05 = {}", series[0])
        })?;
        let tail = (series[series.len() - 1] - 0.5).abs();
        ensure(tail < 0.06, || {
            format!("{name} at lambda 5 is {tail} from 0.5")
        })?;
    }
    for row in &rows {
        let r = row.equilibrium.confidence();
        for s in 0..2 {
            ensure((r.good()[s] + r.bad()[s] - 1.0).abs() <= 1e-12, || {
                "r_g + r_b != 1".into()
            })?;
        }
    }
    Ok(format!(
        "r(g|s): {:.6} -> {:.6}; r(b|s): {:.6} -> {:.6}",
        r_g[0],
        r_g[r_g.len() - 1],
        r_b[0],
        r_b[r_b.len() - 1]
    ))
}

fn criterion_4() -> Check {
    let ratios: Vec<f64> = (1..=19).map(|k| 0.05 * k as f64).collect();
    let one = AuditorParams::dp_game(0.5, -1.0, -1.0, 1.0).map_err(err)?;
    let two = one.with_lambda(2.0).map_err(err)?;
    let rows_one = sweep_qratio(&one, &ratios).map_err(err)?;
    let rows_two = sweep_qratio(&two, &ratios).map_err(err)?;
    ensure(
        rows_one.windows(2).all(|w| w[1].r_good < w[0].r_good),
        || "r(g|s) not strictly decreasing at lambda 1".into(),
    )?;
    let at = rows_one
        .iter()
        .find(|r| (r.ratio - 0.25).abs() < 1e-12)
        .ok_or("ratio 0.25 missing")?;
    let expect = 1.0 / (1.0 + (-0.5f64).exp());
    ensure((at.r_good - expect).abs() <= 1e-9, || {
        format!("r(g|s) = {} vs {expect}", at.r_good)
    })?;
    let (s1, s2) = (max_abs_step(&rows_one), max_abs_step(&rows_two));
    ensure(s2 < s1, || {
        format!("max step {s2} at lambda 2 not below {s1}")
    })?;
    Ok(format!(
        "r(g|s) at 0.25 = {:.12}, max |step| {s1:.6} (lambda 1) > {s2:.6} (lambda 2)",
        at.r_good
    ))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    let mut worst = 0.0_f64;
    let mut accepted = 0;
    let mut drawn = 0;
    while accepted < 20 {
        drawn += 1;
        let params = AuditorParams::dp_game(
            rng.gen_range(0.1..0.9),
            rng.gen_range(-3.0..-0.2),
            rng.gen_range(-3.0..-0.2),
            rng.gen_range(0.05..5.0),
        )
        .map_err(err)?;
        let hyp = HypothesisPair::new(
            random_distribution(&mut rng, 2),
            random_distribution(&mut rng, 2),
        )
        .map_err(err)?;
        let s = 0;
        let ratio = hyp.bad_ratio(s).unwrap();
        let cs = comparative_statics(&params, &hyp).map_err(err)?;
        let r = solve_audit_confidence(&params, &hyp).map_err(err)?;
        // Skip saturated points and points where χ vanishes; there the
        // derivative is below the resolution of a central difference.
        if r.good()[s] * r.bad()[s] < 1e-3 || cs.chi[s].abs() < 0.05 || ratio < 0.01 || ratio > 0.99
        {
            continue;
        }
        accepted += 1;
        let fd_lambda = finite_difference(
            |l| Ok(solve_audit_confidence(&params.with_lambda(l)?, &hyp)?.good()[s]),
            params.lambda(),
            h,
        )
        .map_err(err)?;
        let fd_ratio =
            finite_difference(|x| Ok(confidence_at_ratio(&params, x)?.0), ratio, h).map_err(err)?;
        for (name, analytic, numeric) in [
            ("dr/dlambda", cs.dr_dlambda[s], fd_lambda),
            ("dr/dratio", cs.dr_dratio[s], fd_ratio),
        ] {
            let rel = (analytic - numeric).abs() / analytic.abs();
            worst = worst.max(rel);
            ensure(rel <= 1e-6, || {
                format!("{name}: analytic {analytic:e} numeric {numeric:e} rel {rel:e}")
            })?;
        }
        ensure(cs.dr_dlambda[s].signum() == cs.chi[s].signum(), || {
            "sign mismatch with chi".into()
        })?;
    }
    Ok(format!(
        "20 points ({drawn} drawn), max relative error {worst:.2e}"
    ))
}

fn laplace_game(lambda: f64, beta: f64) -> Result<GameInstance, String> {
    let grid = PrivacyBudgetGrid::new(vec![0.5, 1.0, 2.0], 0).map_err(err)?;
    let mech = MechanismModel::laplace(0.0, 1.0).map_err(err)?;
    let space = SignalSpace::default_for(0.0, 1.0, &grid).map_err(err)?;
    let p = output_distribution(&mech, &grid, &space).map_err(err)?;
    let auditor = AuditorParams::dp_game(0.5, -1.0, -1.0, lambda).map_err(err)?;
    GameInstance::new(grid, p, AccuracyModel::ExponentialSaturation, auditor, beta).map_err(err)
}

fn random_table(
    rng: &mut ChaCha8Rng,
    k: usize,
    n: usize,
) -> Result<(PrivacyBudgetGrid, OutputMatrix, AccuracyModel), String> {
    let mut eps = 0.0;
    let budgets: Vec<f64> = (0..k)
        .map(|_| {
            eps += rng.gen_range(0.1..1.0);
            eps
        })
        .collect();
    let grid = PrivacyBudgetGrid::new(budgets, 0).map_err(err)?;
    let rows = (0..k).map(|_| random_distribution(rng, n)).collect();
    let p = OutputMatrix::new(&grid, rows).map_err(err)?;
    let mut a = 0.0;
    let acc: Vec<f64> = (0..k)
        .map(|_| {
            a += rng.gen_range(0.01..0.5);
            a
        })
        .collect();
    let acc = AccuracyModel::table(&grid, acc).map_err(err)?;
    Ok((grid, p, acc))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // Responsible point mass reproduces the claimed row exactly.
    for _ in 0..20 {
        let k = rng.gen_range(2..6);
        let n = rng.gen_range(2..6);
        let (grid, p, _) = random_table(&mut rng, k, n)?;
        let good = DeveloperStrategy::responsible(&grid);
        let bad = DeveloperStrategy::uniform_deviation(&grid).map_err(err)?;
        let hyp = mix_hypotheses(&p, &good, &bad).map_err(err)?;
        ensure(hyp.q_good() == p.row(grid.claimed_index()), || {
            "Q_g differs from p(.|eps')".into()
        })?;
    }

    // Best response against the exhaustive argmax.
    let mut compared = 0;
    for _ in 0..200 {
        let k = rng.gen_range(2..7);
        let n = rng.gen_range(2..5);
        let (grid, p, acc) = random_table(&mut rng, k, n)?;
        let r = AuditConfidence::from_good((0..n).map(|_| rng.gen_range(0.0..=1.0)).collect())
            .map_err(err)?;
        let beta = rng.gen_range(0.0..5.0);
        let br = irresponsible_best_response(&p, &acc, &r, beta, &grid).map_err(err)?;
        let ex = exhaustive_developer(&p, &acc, &r, beta, &grid).map_err(err)?;
        ensure(br.pure_index() == Some(ex), || {
            format!("best response {:?} vs exhaustive {ex}", br.pure_index())
        })?;
        compared += 1;
    }

    // Constant confidence sends the developer to the largest budget.
    for n in 2..=4 {
        for _ in 0..10 {
            let k = rng.gen_range(3..6);
            let (grid, p, acc) = random_table(&mut rng, k, n)?;
            let r = AuditConfidence::from_good(vec![rng.gen_range(0.0..=1.0); n]).map_err(err)?;
            let br = irresponsible_best_response(&p, &acc, &r, rng.gen_range(0.0..5.0), &grid)
                .map_err(err)?;
            ensure(br.pure_index() == Some(k - 1), || {
                format!("|S| = {n}: not the largest budget")
            })?;
        }
    }

    // An auditor that cannot afford information is evaded maximally.
    let eq = solve_stackelberg(&laplace_game(1e6, 1.0)?).map_err(err)?;
    ensure(eq.chosen_index() == Some(2), || {
        "lambda 1e6 equilibrium is not the largest budget".into()
    })?;
    for _ in 0..10 {
        let (grid, p, acc) = random_table(&mut rng, 4, 3)?;
        let auditor = AuditorParams::dp_game(0.5, -1.0, -2.0, 1e6).map_err(err)?;
        let g = GameInstance::new(grid, p, acc, auditor, rng.gen_range(0.1..3.0)).map_err(err)?;
        let eq = solve_stackelberg(&g).map_err(err)?;
        ensure(eq.chosen_index() == Some(3), || {
            "random lambda 1e6 instance not at largest budget".into()
        })?;
    }
    Ok(format!("point mass exact on 20 grids, {compared} best responses, 30 constant-r cases, 11 lambda = 1e6 games"))
}

fn criterion_7() -> Check {
    let grid = PrivacyBudgetGrid::new(vec![0.5, 1.0, 2.0], 0).map_err(err)?;
    let mech = MechanismModel::laplace(0.0, 1.0).map_err(err)?;
    let default_space = SignalSpace::default_for(0.0, 1.0, &grid).map_err(err)?;
    let fine = SignalSpace::uniform(-10.0, 10.0, 16).map_err(err)?;
    let mut worst = 0.0_f64;
    for space in [&default_space, &fine] {
        for &eps in grid.budgets() {
            let check = check_dp_inequality(&mech, eps, space).map_err(err)?;
            worst = worst.max(check.slack);
            ensure(check.slack <= 1e-9 && check.passes(1e-9), || {
                format!("eps {eps}: {check:?}")
            })?;
        }
    }
    let p = output_distribution(&mech, &grid, &default_space).map_err(err)?;
    let kl = distinguishability(&p, grid.claimed_index());
    ensure(kl.windows(2).all(|w| w[1] >= w[0]), || {
        format!("KL not monotone: {kl:?}")
    })?;
    Ok(format!("max slack {worst:.1e}, KL = {kl:.6?}"))
}

fn criterion_8() -> Check {
    let bin = env!("CARGO_BIN_EXE_herd-audit");
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    let dirs = [
        tempfile::tempdir().map_err(err)?,
        tempfile::tempdir().map_err(err)?,
    ];
    for dir in &dirs {
        for cmd in ["sweep", "equilibrium"] {
            let out = Command::new(bin)
                .arg(cmd)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(dir.path())
                .output()
                .map_err(err)?;
            ensure(out.status.success(), || {
                String::from_utf8_lossy(&out.stderr).into_owned()
            })?;
        }
    }
    let mut bytes = 0;
    for file in ["sweep.csv", "equilibrium.csv"] {
        let a = std::fs::read(dirs[0].path().join(file)).map_err(err)?;
        let b = std::fs::read(dirs[1].path().join(file)).map_err(err)?;
        ensure(!a.is_empty() && a == b, || {
            format!("{file} differs between runs")
        })?;
        bytes += a.len();
    }
    Ok(format!(
        "sweep.csv and equilibrium.csv identical ({bytes} bytes)"
    ))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 8] = [
        (
            "1 closed-form confidence vs simplex oracle",
            Duration::from_secs(10),
            criterion_1,
        ),
        (
            "2 information strategy vs grid oracle",
            Duration::from_secs(30),
            criterion_2,
        ),
        (
            "3 confidence trend in lambda",
            Duration::from_secs(1),
            criterion_3,
        ),
        (
            "4 confidence trend in Q_b/v",
            Duration::from_secs(1),
            criterion_4,
        ),
        (
            "5 analytic derivatives vs central differences",
            Duration::from_secs(1),
            criterion_5,
        ),
        (
            "6 developer propositions",
            Duration::from_secs(5),
            criterion_6,
        ),
        (
            "7 DP self-check and distinguishability",
            Duration::from_secs(1),
            criterion_7,
        ),
        (
            "8 determinism of CLI output",
            Duration::from_secs(60),
            criterion_8,
        ),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let over = elapsed > budget;
        match result {
            Ok(detail) if !over => println!("PASS [{name}] {detail} ({elapsed:.2?})"),
            Ok(detail) => {
                failed += 1;
                println!("FAIL [{name}] over time budget {budget:?}: {detail} ({elapsed:.2?})");
            }
            Err(reason) => {
                failed += 1;
                println!("FAIL [{name}] {reason} ({elapsed:.2?})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
