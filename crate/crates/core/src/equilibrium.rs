//! Stackelberg equilibrium of the herd-audit game and parameter sweeps.
//!
//! The irresponsible developer leads and the auditor answers with the
//! closed-form confidence for the hypotheses the developer induces. Leader
//! enumeration evaluates every pure deviation against its own follower
//! response; best-response iteration alternates the two sides with the
//! developer treating `r` as fixed.

use crate::auditor::{
    auditor_objective, comparative_statics, confidence_at_ratio, dr_dratio_at_ratio,
    solve_audit_confidence, AuditConfidence, AuditorParams,
};
use crate::developer::{developer_payoff, irresponsible_best_response, DeveloperStrategy};
use crate::error::{AuditError, Result};
use crate::signal::{
    mix_hypotheses, AccuracyModel, HypothesisPair, OutputMatrix, PrivacyBudgetGrid,
};

/// Largest budget grid the leader enumeration accepts.
pub const MAX_BUDGETS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    grid: PrivacyBudgetGrid,
    outputs: OutputMatrix,
    accuracy: AccuracyModel,
    auditor: AuditorParams,
    beta: f64,
}

impl GameInstance {
    pub fn new(
        grid: PrivacyBudgetGrid,
        outputs: OutputMatrix,
        accuracy: AccuracyModel,
        auditor: AuditorParams,
        beta: f64,
    ) -> Result<Self> {
        if grid.len() > MAX_BUDGETS {
            return Err(AuditError::param(
                "budgets",
                format!("at most {MAX_BUDGETS} budgets are supported"),
            ));
        }
        if outputs.budgets() != grid.budgets() {
            return Err(AuditError::invalid(
                "mechanism and grid disagree on budgets",
            ));
        }
        accuracy.values_on(grid.budgets())?;
        if !auditor.is_dp_game() {
            return Err(AuditError::invalid(
                "the game needs the privacy-game auditor utilities",
            ));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(AuditError::param(
                "beta",
                format!("must be non-negative, got {beta}"),
            ));
        }
        Ok(GameInstance {
            grid,
            outputs,
            accuracy,
            auditor,
            beta,
        })
    }

    pub fn grid(&self) -> &PrivacyBudgetGrid {
        &self.grid
    }

    pub fn outputs(&self) -> &OutputMatrix {
        &self.outputs
    }

    pub fn accuracy(&self) -> &AccuracyModel {
        &self.accuracy
    }

    pub fn auditor(&self) -> &AuditorParams {
        &self.auditor
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(GameInstance {
            auditor: self.auditor.with_lambda(lambda)?,
            ..self.clone()
        })
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        GameInstance::new(
            self.grid.clone(),
            self.outputs.clone(),
            self.accuracy.clone(),
            self.auditor,
            beta,
        )
    }

    /// Hypotheses induced by the responsible developer and `bad`.
    pub fn hypotheses(&self, bad: &DeveloperStrategy) -> Result<HypothesisPair> {
        mix_hypotheses(
            &self.outputs,
            &DeveloperStrategy::responsible(&self.grid),
            bad,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    LeaderEnumeration,
    BestResponseIteration,
}

impl SolveMode {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMode::LeaderEnumeration => "leader-enumeration",
            SolveMode::BestResponseIteration => "iteration",
        }
    }
}

/// A developer strategy evaluated against the follower response it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub developer: DeveloperStrategy,
    pub hypotheses: HypothesisPair,
    pub confidence: AuditConfidence,
    pub expected_accuracy: f64,
    pub evasion_rate: f64,
    pub developer_total: f64,
    pub auditor_value: f64,
}

/// Evaluates `bad` with the auditor answering optimally to it.
pub fn evaluate_leader(g: &GameInstance, bad: DeveloperStrategy) -> Result<Outcome> {
    let hypotheses = g.hypotheses(&bad)?;
    let confidence = solve_audit_confidence(&g.auditor, &hypotheses)?;
    evaluate_against(g, bad, hypotheses, confidence)
}

fn evaluate_against(
    g: &GameInstance,
    bad: DeveloperStrategy,
    hypotheses: HypothesisPair,
    confidence: AuditConfidence,
) -> Result<Outcome> {
    let payoff = developer_payoff(&bad, &g.outputs, &g.accuracy, &confidence, g.beta)?;
    let auditor_value = auditor_objective(&g.auditor, &hypotheses, &confidence)?;
    Ok(Outcome {
        developer: bad,
        hypotheses,
        confidence,
        expected_accuracy: payoff.expected_accuracy,
        evasion_rate: payoff.evasion_rate,
        developer_total: payoff.total,
        auditor_value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    /// The equilibrium outcome; its confidence is the follower's answer to
    /// its developer strategy.
    pub outcome: Outcome,
    pub mode: SolveMode,
    /// Meaningful for iteration mode; always true for leader enumeration.
    pub converged: bool,
    /// Every pure deviation evaluated against its own follower response.
    pub candidates: Vec<Outcome>,
    /// Best two-point mixture found when mixtures were probed.
    pub best_mixture: Option<Outcome>,
    /// Pure budget index chosen in each round of best-response iteration.
    pub history: Vec<usize>,
}

impl EquilibriumResult {
    pub fn developer(&self) -> &DeveloperStrategy {
        &self.outcome.developer
    }

    pub fn confidence(&self) -> &AuditConfidence {
        &self.outcome.confidence
    }

    pub fn developer_total(&self) -> f64 {
        self.outcome.developer_total
    }

    pub fn evasion_rate(&self) -> f64 {
        self.outcome.evasion_rate
    }

    pub fn auditor_value(&self) -> f64 {
        self.outcome.auditor_value
    }

    /// Budget index of a pure equilibrium strategy.
    pub fn chosen_index(&self) -> Option<usize> {
        self.outcome.developer.pure_index()
    }
}

/// Options for leader enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LeaderOptions {
    /// Probability step for probing two-point mixtures; `None` skips them.
    pub mixture_step: Option<f64>,
}

pub fn solve_stackelberg(g: &GameInstance) -> Result<EquilibriumResult> {
    solve_stackelberg_with(g, &LeaderOptions::default())
}

/// Enumerates the leader's pure deviations, each against its induced
/// follower response, and returns the best (larger budget on ties). With a
/// mixture step, two-point mixtures of deviations are probed as well and win
/// only when strictly better.
pub fn solve_stackelberg_with(g: &GameInstance, opts: &LeaderOptions) -> Result<EquilibriumResult> {
    let mut candidates: Vec<Outcome> = Vec::new();
    let mut best: Option<usize> = None;
    for i in g.grid.deviations() {
        let outcome = evaluate_leader(g, DeveloperStrategy::pure_irresponsible(&g.grid, i)?)?;
        if best.map_or(true, |b| {
            outcome.developer_total >= candidates[b].developer_total
        }) {
            best = Some(candidates.len());
        }
        candidates.push(outcome);
    }
    let best = best.ok_or(AuditError::NoFeasibleDeviation)?;
    let mut outcome = candidates[best].clone();

    let best_mixture = match opts.mixture_step {
        Some(step) => probe_mixtures(g, step)?,
        None => None,
    };
    if let Some(mix) = &best_mixture {
        if mix.developer_total > outcome.developer_total {
            outcome = mix.clone();
        }
    }
    Ok(EquilibriumResult {
        outcome,
        mode: SolveMode::LeaderEnumeration,
        converged: true,
        candidates,
        best_mixture,
        history: Vec::new(),
    })
}

fn probe_mixtures(g: &GameInstance, step: f64) -> Result<Option<Outcome>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(AuditError::param(
            "mixture_step",
            format!("must lie in (0, 0.5], got {step}"),
        ));
    }
    let steps = (1.0 / step).round() as usize;
    let deviations: Vec<usize> = g.grid.deviations().collect();
    let mut best: Option<Outcome> = None;
    for (a, &i) in deviations.iter().enumerate() {
        for &j in &deviations[a + 1..] {
            for k in 1..steps {
                let w = k as f64 / steps as f64;
                let mut weights = vec![0.0; g.grid.len()];
                weights[i] = w;
                weights[j] = 1.0 - w;
                let outcome =
                    evaluate_leader(g, DeveloperStrategy::irresponsible(&g.grid, weights)?)?;
                if best
                    .as_ref()
                    .map_or(true, |b| outcome.developer_total > b.developer_total)
                {
                    best = Some(outcome);
                }
            }
        }
    }
    Ok(best)
}

/// Alternates the developer's best response at fixed `r` with the auditor's
/// closed-form answer, starting from a uniform mix over the deviations.
/// Converges when the same pure budget is chosen in two consecutive rounds.
pub fn best_response_iteration(g: &GameInstance, max_rounds: usize) -> Result<EquilibriumResult> {
    if max_rounds == 0 {
        return Err(AuditError::param("max_rounds", "need at least one round"));
    }
    let start = DeveloperStrategy::uniform_deviation(&g.grid)?;
    let mut confidence = solve_audit_confidence(&g.auditor, &g.hypotheses(&start)?)?;
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_rounds {
        let response =
            irresponsible_best_response(&g.outputs, &g.accuracy, &confidence, g.beta, &g.grid)?;
        let index = response.pure_index().expect("best response is pure");
        let repeated = history.last() == Some(&index);
        history.push(index);
        if repeated {
            converged = true;
            break;
        }
        confidence = solve_audit_confidence(&g.auditor, &g.hypotheses(&response)?)?;
    }
    let last = *history.last().expect("at least one round");
    let developer = DeveloperStrategy::pure_irresponsible(&g.grid, last)?;
    let outcome = evaluate_leader(g, developer)?;
    let candidates = g
        .grid
        .deviations()
        .map(|i| evaluate_leader(g, DeveloperStrategy::pure_irresponsible(&g.grid, i)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumResult {
        outcome,
        mode: SolveMode::BestResponseIteration,
        converged,
        candidates,
        best_mixture: None,
        history,
    })
}

pub fn solve(
    g: &GameInstance,
    mode: SolveMode,
    opts: &LeaderOptions,
    max_rounds: usize,
) -> Result<EquilibriumResult> {
    match mode {
        SolveMode::LeaderEnumeration => solve_stackelberg_with(g, opts),
        SolveMode::BestResponseIteration => best_response_iteration(g, max_rounds),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSweepRow {
    pub lambda: f64,
    pub equilibrium: EquilibriumResult,
    /// `χ(s)` at the equilibrium hypotheses.
    pub chi: Vec<f64>,
}

fn sorted_positive(name: &'static str, values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(AuditError::param(name, "sweep grid is empty"));
    }
    if values.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(AuditError::param(
            name,
            "sweep values must be strictly positive",
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

pub fn sweep_lambda(g: &GameInstance, lambdas: &[f64]) -> Result<Vec<LambdaSweepRow>> {
    sweep_lambda_with(
        g,
        lambdas,
        SolveMode::LeaderEnumeration,
        &LeaderOptions::default(),
        100,
    )
}

/// Equilibrium and per-signal confidence for each `λ`, in increasing `λ`.
pub fn sweep_lambda_with(
    g: &GameInstance,
    lambdas: &[f64],
    mode: SolveMode,
    opts: &LeaderOptions,
    max_rounds: usize,
) -> Result<Vec<LambdaSweepRow>> {
    sorted_positive("lambda_grid", lambdas)?
        .into_iter()
        .map(|lambda| {
            let instance = g.with_lambda(lambda)?;
            let equilibrium = solve(&instance, mode, opts, max_rounds)?;
            let chi = comparative_statics(instance.auditor(), &equilibrium.outcome.hypotheses)?.chi;
            Ok(LambdaSweepRow {
                lambda,
                equilibrium,
                chi,
            })
        })
        .collect()
}

/// Pairs of consecutive `λ` where the evasion rate fell as `λ` grew, i.e.
/// where a better-informed auditor was evaded more often.
pub fn deterrence_violations(rows: &[LambdaSweepRow]) -> Vec<(f64, f64)> {
    rows.windows(2)
        .filter(|w| w[0].equilibrium.evasion_rate() > w[1].equilibrium.evasion_rate())
        .map(|w| (w[0].lambda, w[1].lambda))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSweepRow {
    /// `Q_b(s)/v(s)`.
    pub ratio: f64,
    pub r_good: f64,
    pub r_bad: f64,
    /// `∂r(g|s)/∂(Q_b/v)`.
    pub dr_dratio: f64,
}

/// Closed-form confidence as a function of `Q_b(s)/v(s)` at fixed `λ`,
/// in increasing ratio.
pub fn sweep_qratio(params: &AuditorParams, ratios: &[f64]) -> Result<Vec<RatioSweepRow>> {
    if ratios.is_empty() {
        return Err(AuditError::param("ratio_grid", "sweep grid is empty"));
    }
    if ratios.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
        return Err(AuditError::param("ratio_grid", "ratios must lie in (0, 1)"));
    }
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .into_iter()
        .map(|ratio| {
            let (r_good, r_bad) = confidence_at_ratio(params, ratio)?;
            Ok(RatioSweepRow {
                ratio,
                r_good,
                r_bad,
                dr_dratio: dr_dratio_at_ratio(params, ratio)?,
            })
        })
        .collect()
}

/// Largest `|Δr(g|s)|` between consecutive rows.
pub fn max_abs_step(rows: &[RatioSweepRow]) -> f64 {
    rows.windows(2)
        .map(|w| (w[1].r_good - w[0].r_good).abs())
        .fold(0.0, f64::max)
}
