//! Rationally inattentive auditor.
//!
//! Two formulations live here. The general one chooses an information
//! strategy `d(s|ω)` and a decision rule to maximize `E[u] − λ·I(ω;s)`.
//! The privacy-game one takes the hypotheses `Q_g`, `Q_b` as given and picks
//! the audit confidence `r(ω|s)`, which has a closed form.

use std::fmt;

use crate::error::{AuditError, Result};
use crate::signal::{check_distribution_within, HypothesisPair};

/// Largest signal space the partition enumeration accepts.
pub const MAX_ENUMERATED_SIGNALS: usize = 20;

/// Cells whose total mass falls below this are treated as unused.
pub const CELL_MASS_FLOOR: f64 = 1e-9;

const STRATEGY_TOLERANCE: f64 = 1e-10;

/// Developer type, the state the auditor is uncertain about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    Good,
    Bad,
}

/// Audit report: `Compliant` is T, `NonCompliant` is F.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Compliant,
    NonCompliant,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Compliant => "T",
            Action::NonCompliant => "F",
        })
    }
}

/// Utility matrix `u(ω, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utility {
    pub good_compliant: f64,
    pub good_noncompliant: f64,
    pub bad_compliant: f64,
    pub bad_noncompliant: f64,
}

impl Utility {
    /// Zero utility for correct reports, negative penalties for errors.
    pub fn penalties(false_alarm: f64, miss: f64) -> Self {
        Utility {
            good_compliant: 0.0,
            good_noncompliant: false_alarm,
            bad_compliant: miss,
            bad_noncompliant: 0.0,
        }
    }

    pub fn get(&self, state: State, action: Action) -> f64 {
        match (state, action) {
            (State::Good, Action::Compliant) => self.good_compliant,
            (State::Good, Action::NonCompliant) => self.good_noncompliant,
            (State::Bad, Action::Compliant) => self.bad_compliant,
            (State::Bad, Action::NonCompliant) => self.bad_noncompliant,
        }
    }

    /// `u(g,F)`, the penalty for flagging a responsible developer.
    pub fn false_alarm(&self) -> f64 {
        self.good_noncompliant
    }

    /// `u(b,T)`, the penalty for passing an irresponsible developer.
    pub fn miss(&self) -> f64 {
        self.bad_compliant
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditorParams {
    prior_good: f64,
    utility: Utility,
    lambda: f64,
}

impl AuditorParams {
    pub fn new(prior_good: f64, utility: Utility, lambda: f64) -> Result<Self> {
        if !(prior_good > 0.0 && prior_good < 1.0) {
            return Err(AuditError::param(
                "prior_good",
                format!("must lie in (0, 1), got {prior_good}"),
            ));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(AuditError::param(
                "lambda",
                format!("must be strictly positive, got {lambda}"),
            ));
        }
        let u = utility;
        if [
            u.good_compliant,
            u.good_noncompliant,
            u.bad_compliant,
            u.bad_noncompliant,
        ]
        .iter()
        .any(|x| !x.is_finite())
        {
            return Err(AuditError::param("utility", "entries must be finite"));
        }
        if !(u.good_compliant > u.good_noncompliant) {
            return Err(AuditError::param("utility", "need u(g,T) > u(g,F)"));
        }
        if !(u.bad_noncompliant > u.bad_compliant) {
            return Err(AuditError::param("utility", "need u(b,F) > u(b,T)"));
        }
        Ok(AuditorParams {
            prior_good,
            utility,
            lambda,
        })
    }

    /// Privacy-game auditor: correct reports pay zero, `u(g,F) = false_alarm`
    /// and `u(b,T) = miss`, both strictly negative.
    pub fn dp_game(prior_good: f64, false_alarm: f64, miss: f64, lambda: f64) -> Result<Self> {
        if !(false_alarm < 0.0) {
            return Err(AuditError::param(
                "false_alarm",
                format!("penalty u(g,F) must be negative, got {false_alarm}"),
            ));
        }
        if !(miss < 0.0) {
            return Err(AuditError::param(
                "miss",
                format!("penalty u(b,T) must be negative, got {miss}"),
            ));
        }
        AuditorParams::new(prior_good, Utility::penalties(false_alarm, miss), lambda)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        AuditorParams::new(self.prior_good, self.utility, lambda)
    }

    pub fn prior(&self, state: State) -> f64 {
        match state {
            State::Good => self.prior_good,
            State::Bad => 1.0 - self.prior_good,
        }
    }

    pub fn prior_good(&self) -> f64 {
        self.prior_good
    }

    pub fn prior_bad(&self) -> f64 {
        1.0 - self.prior_good
    }

    pub fn utility(&self) -> &Utility {
        &self.utility
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// True when correct reports pay zero and both errors are penalized.
    pub fn is_dp_game(&self) -> bool {
        let u = &self.utility;
        u.good_compliant == 0.0
            && u.bad_noncompliant == 0.0
            && u.bad_compliant < 0.0
            && u.good_noncompliant < 0.0
    }

    fn require_dp_game(&self) -> Result<()> {
        if self.is_dp_game() {
            Ok(())
        } else {
            Err(AuditError::invalid(
                "privacy-game auditor needs u(g,T) = u(b,F) = 0 and negative penalties",
            ))
        }
    }

    /// Right-hand side of the likelihood-ratio test,
    /// `[u(g,T) − u(g,F)] / [u(b,F) − u(b,T)]`.
    pub fn threshold(&self) -> f64 {
        let u = &self.utility;
        (u.good_compliant - u.good_noncompliant) / (u.bad_noncompliant - u.bad_compliant)
    }

    /// `max_a Σ_ω μ(ω) u(ω,a)`, the value of auditing without information.
    pub fn uninformed_value(&self) -> f64 {
        let pass = self.expected_utility_of(Action::Compliant);
        let flag = self.expected_utility_of(Action::NonCompliant);
        pass.max(flag)
    }

    fn expected_utility_of(&self, action: Action) -> f64 {
        self.prior_good() * self.utility.get(State::Good, action)
            + self.prior_bad() * self.utility.get(State::Bad, action)
    }
}

/// Action taken on each signal; partitions the signals into the T and F cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionRule {
    actions: Vec<Action>,
}

impl DecisionRule {
    pub fn new(actions: Vec<Action>) -> Self {
        DecisionRule { actions }
    }

    /// Bit `s` of `mask` set means signal `s` is reported compliant.
    pub fn from_mask(n_signals: usize, mask: u32) -> Self {
        DecisionRule {
            actions: (0..n_signals)
                .map(|s| {
                    if mask & (1 << s) != 0 {
                        Action::Compliant
                    } else {
                        Action::NonCompliant
                    }
                })
                .collect(),
        }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, signal: usize) -> Action {
        self.actions[signal]
    }

    pub fn cell(&self, action: Action) -> Vec<usize> {
        (0..self.actions.len())
            .filter(|&s| self.actions[s] == action)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Information strategy `d(s|ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationStrategy {
    good: Vec<f64>,
    bad: Vec<f64>,
    log_normalizer: Option<[f64; 2]>,
}

impl InformationStrategy {
    pub fn new(good: Vec<f64>, bad: Vec<f64>) -> Result<Self> {
        if good.len() != bad.len() {
            return Err(AuditError::invalid("d(.|g) and d(.|b) differ in length"));
        }
        check_distribution_within("d(.|g)", &good, STRATEGY_TOLERANCE)?;
        check_distribution_within("d(.|b)", &bad, STRATEGY_TOLERANCE)?;
        Ok(InformationStrategy {
            good,
            bad,
            log_normalizer: None,
        })
    }

    pub fn uniform(n_signals: usize) -> Self {
        let row = vec![1.0 / n_signals as f64; n_signals];
        InformationStrategy {
            good: row.clone(),
            bad: row,
            log_normalizer: None,
        }
    }

    pub fn row(&self, state: State) -> &[f64] {
        match state {
            State::Good => &self.good,
            State::Bad => &self.bad,
        }
    }

    pub fn good(&self) -> &[f64] {
        &self.good
    }

    pub fn bad(&self) -> &[f64] {
        &self.bad
    }

    pub fn len(&self) -> usize {
        self.good.len()
    }

    pub fn is_empty(&self) -> bool {
        self.good.is_empty()
    }

    /// `ln y′(ω)` for strategies produced by the solver.
    pub fn log_normalizer(&self, state: State) -> Option<f64> {
        self.log_normalizer.map(|[g, b]| match state {
            State::Good => g,
            State::Bad => b,
        })
    }

    /// Unconditional signal distribution `v(s) = Σ_ω μ(ω) d(s|ω)`.
    pub fn marginal(&self, params: &AuditorParams) -> Vec<f64> {
        self.good
            .iter()
            .zip(&self.bad)
            .map(|(g, b)| params.prior_good() * g + params.prior_bad() * b)
            .collect()
    }
}

/// Likelihood-ratio decision rule. A signal is reported compliant iff
/// `μ(b)d(s|b) / (μ(g)d(s|g))` is at most the threshold; ties and signals
/// with zero probability under both states go to T.
pub fn bayes_decision_rule(params: &AuditorParams, d: &InformationStrategy) -> DecisionRule {
    let u = params.utility();
    let gain_good = u.good_compliant - u.good_noncompliant;
    let gain_bad = u.bad_noncompliant - u.bad_compliant;
    let actions = d
        .good()
        .iter()
        .zip(d.bad())
        .map(|(&dg, &db)| {
            let against = params.prior_bad() * db * gain_bad;
            let towards = params.prior_good() * dg * gain_good;
            if against <= towards {
                Action::Compliant
            } else {
                Action::NonCompliant
            }
        })
        .collect();
    DecisionRule { actions }
}

/// `I(ω; s)` in nats under the prior.
pub fn mutual_information(params: &AuditorParams, d: &InformationStrategy) -> f64 {
    let v = d.marginal(params);
    let mut info = 0.0;
    for state in [State::Good, State::Bad] {
        let mu = params.prior(state);
        for (s, &x) in d.row(state).iter().enumerate() {
            if x > 0.0 {
                info += mu * x * (x / v[s]).ln();
            }
        }
    }
    info
}

/// `E[u(ω, δ(s))]` for a strategy and a rule.
pub fn expected_utility(
    params: &AuditorParams,
    d: &InformationStrategy,
    rule: &DecisionRule,
) -> f64 {
    let mut total = 0.0;
    for state in [State::Good, State::Bad] {
        let mu = params.prior(state);
        for (s, &x) in d.row(state).iter().enumerate() {
            total += mu * params.utility().get(state, rule.action(s)) * x;
        }
    }
    total
}

/// `E[u] − λ I(ω; s)`.
pub fn information_objective(
    params: &AuditorParams,
    d: &InformationStrategy,
    rule: &DecisionRule,
) -> f64 {
    expected_utility(params, d, rule) - params.lambda() * mutual_information(params, d)
}

/// Damped fixed-point iteration settings for the `d ↔ v` coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            damping: 0.5,
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    /// A self-consistent partition was found; `consistent` counts how many.
    Consistent { consistent: usize },
    /// No partition survives; the auditor acquires no information.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InformationSolution {
    pub strategy: InformationStrategy,
    pub rule: DecisionRule,
    pub value: f64,
    pub expected_utility: f64,
    pub mutual_information: f64,
    pub kind: SolutionKind,
}

/// Result of one fixed-point solve for a fixed partition.
struct Candidate {
    strategy: InformationStrategy,
    cell_mass: [f64; 2],
}

/// Solves `d(s|ω) ∝ v(s)·exp(u(ω,a(s))/λ)` jointly with `v = Σ_ω μ(ω) d(·|ω)`
/// for the partition in `rule`, starting from a uniform `v`.
fn solve_partition(
    params: &AuditorParams,
    rule: &DecisionRule,
    opts: &FixedPointOptions,
) -> Result<Candidate> {
    let n = rule.len();
    let lambda = params.lambda();
    let u = params.utility();
    // exp(u/λ) shifted per state by its largest utility; the shift cancels
    // in the normalization.
    let weight = |state: State, action: Action| {
        let top = u
            .get(state, Action::Compliant)
            .max(u.get(state, Action::NonCompliant));
        ((u.get(state, action) - top) / lambda).exp()
    };
    let shift = |state: State| {
        u.get(state, Action::Compliant)
            .max(u.get(state, Action::NonCompliant))
            / lambda
    };
    let weights: Vec<[f64; 2]> = rule
        .actions()
        .iter()
        .map(|&a| [weight(State::Good, a), weight(State::Bad, a)])
        .collect();
    let mu = [params.prior_good(), params.prior_bad()];

    let build = |v: &[f64]| -> ([Vec<f64>; 2], [f64; 2]) {
        let mut norm = [0.0; 2];
        for (vs, w) in v.iter().zip(&weights) {
            norm[0] += vs * w[0];
            norm[1] += vs * w[1];
        }
        let rows = [0, 1].map(|k| {
            v.iter()
                .zip(&weights)
                .map(|(vs, w)| vs * w[k] / norm[k])
                .collect::<Vec<f64>>()
        });
        (rows, norm)
    };

    let mut v = cell_mass_start(
        rule,
        mu,
        [
            weight(State::Good, Action::Compliant),
            weight(State::Bad, Action::Compliant),
        ],
        [
            weight(State::Good, Action::NonCompliant),
            weight(State::Bad, Action::NonCompliant),
        ],
    );
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let (rows, _) = build(&v);
        let next: Vec<f64> = (0..n)
            .map(|s| mu[0] * rows[0][s] + mu[1] * rows[1][s])
            .collect();
        residual = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        for (vs, ns) in v.iter_mut().zip(&next) {
            *vs += opts.damping * (ns - *vs);
        }
        if residual < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(AuditError::Convergence {
            iterations: opts.max_iterations,
            residual,
        });
    }
    let (rows, norm) = build(&v);
    let [good, bad] = rows;
    let mut cell_mass = [0.0; 2];
    for (s, &a) in rule.actions().iter().enumerate() {
        let k = if a == Action::Compliant { 0 } else { 1 };
        cell_mass[k] += v[s];
    }
    Ok(Candidate {
        strategy: InformationStrategy {
            good,
            bad,
            log_normalizer: Some([
                norm[0].ln() + shift(State::Good),
                norm[1].ln() + shift(State::Bad),
            ]),
        },
        cell_mass,
    })
}

/// Starting point for the fixed point with the T-cell mass already at its
/// stationary value.
///
/// The update `v(s) ← v(s)·Σ_ω μ(ω) e_ω(a(s))/y_ω` keeps ratios within a
/// cell fixed, so the only free quantity is the T-cell mass `V`. Its
/// stationarity condition `Σ_ω μ(ω)(e_ω(T) − e_ω(F))/y_ω(V) = 0` is
/// decreasing in `V`, which bisection resolves to machine precision. Near
/// the simplex boundary the plain iteration converges sublinearly, so
/// seeding it here leaves the iteration as a residual check.
fn cell_mass_start(rule: &DecisionRule, mu: [f64; 2], e_t: [f64; 2], e_f: [f64; 2]) -> Vec<f64> {
    let n = rule.len();
    let n_t = rule
        .actions()
        .iter()
        .filter(|&&a| a == Action::Compliant)
        .count();
    let n_f = n - n_t;
    let slope = |m: f64| {
        (0..2)
            .map(|k| mu[k] * (e_t[k] - e_f[k]) / (m * e_t[k] + (1.0 - m) * e_f[k]))
            .sum::<f64>()
    };
    let mass = if n_t == 0 || n_f == 0 || slope(0.0) <= 0.0 || slope(1.0) >= 0.0 {
        n_t as f64 / n as f64
    } else {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    rule.actions()
        .iter()
        .map(|&a| match a {
            Action::Compliant => mass / n_t as f64,
            Action::NonCompliant => (1.0 - mass) / n_f as f64,
        })
        .collect()
}

/// Whether a two-cell strategy can use both actions at the optimum.
///
/// At a corner where only action `a` is used, the other action `a′` enters
/// the optimum iff `Σ_ω μ(ω) exp((u(ω,a′) − u(ω,a))/λ) > 1`. The problem is
/// concave in the cell masses, so both corners failing this test means the
/// fixed point is interior; otherwise the iteration would drain one cell.
fn both_actions_used(params: &AuditorParams) -> bool {
    let u = params.utility();
    let lambda = params.lambda();
    let gain = |from: Action, to: Action| {
        [State::Good, State::Bad]
            .iter()
            .map(|&w| params.prior(w) * ((u.get(w, to) - u.get(w, from)) / lambda).exp())
            .sum::<f64>()
    };
    gain(Action::Compliant, Action::NonCompliant) > 1.0
        && gain(Action::NonCompliant, Action::Compliant) > 1.0
}

pub fn solve_information_strategy(
    params: &AuditorParams,
    n_signals: usize,
) -> Result<InformationSolution> {
    solve_information_strategy_with(params, n_signals, &FixedPointOptions::default())
}

/// Maximizes `E[u] − λ I(ω;s)` over information strategies on `n_signals`
/// signals by enumerating every bipartition into T and F cells, solving
/// each candidate's fixed point, and keeping those whose likelihood-ratio
/// rule reproduces the assumed partition. The lowest partition index wins
/// ties. When nothing survives, the zero-information strategy is returned
/// with [`SolutionKind::Degenerate`].
pub fn solve_information_strategy_with(
    params: &AuditorParams,
    n_signals: usize,
    opts: &FixedPointOptions,
) -> Result<InformationSolution> {
    if n_signals < 2 || n_signals > MAX_ENUMERATED_SIGNALS {
        return Err(AuditError::param(
            "n_signals",
            format!("must lie in [2, {MAX_ENUMERATED_SIGNALS}], got {n_signals}"),
        ));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(AuditError::param("damping", "must lie in (0, 1]"));
    }

    let mut best: Option<InformationSolution> = None;
    let mut consistent = 0;
    if both_actions_used(params) {
        let full = (1u32 << n_signals) - 1;
        for mask in 1..full {
            let rule = DecisionRule::from_mask(n_signals, mask);
            let candidate = solve_partition(params, &rule, opts)?;
            if candidate.cell_mass.iter().any(|&m| m < CELL_MASS_FLOOR) {
                continue;
            }
            if bayes_decision_rule(params, &candidate.strategy) != rule {
                continue;
            }
            consistent += 1;
            let eu = expected_utility(params, &candidate.strategy, &rule);
            let info = mutual_information(params, &candidate.strategy);
            let value = eu - params.lambda() * info;
            if best.as_ref().map_or(true, |b| value > b.value) {
                best = Some(InformationSolution {
                    strategy: candidate.strategy,
                    rule,
                    value,
                    expected_utility: eu,
                    mutual_information: info,
                    kind: SolutionKind::Consistent { consistent: 0 },
                });
            }
        }
    }

    Ok(match best {
        Some(mut sol) => {
            sol.kind = SolutionKind::Consistent { consistent };
            sol
        }
        None => {
            let strategy = InformationStrategy::uniform(n_signals);
            let rule = bayes_decision_rule(params, &strategy);
            let eu = expected_utility(params, &strategy, &rule);
            InformationSolution {
                strategy,
                rule,
                value: eu,
                expected_utility: eu,
                mutual_information: 0.0,
                kind: SolutionKind::Degenerate,
            }
        }
    })
}

/// Posteriors pooled over the two cells of a decision rule; `None` marks a
/// cell with zero probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPosteriors {
    pub good_given_compliant: Option<f64>,
    pub good_given_noncompliant: Option<f64>,
    pub bad_given_compliant: Option<f64>,
    pub bad_given_noncompliant: Option<f64>,
}

pub fn posterior_confidence(
    params: &AuditorParams,
    d: &InformationStrategy,
    rule: &DecisionRule,
) -> Result<CellPosteriors> {
    if d.len() != rule.len() {
        return Err(AuditError::invalid(
            "strategy and rule differ in signal count",
        ));
    }
    let cell = |action: Action| {
        let mut good = 0.0;
        let mut bad = 0.0;
        for s in rule.cell(action) {
            good += params.prior_good() * d.good()[s];
            bad += params.prior_bad() * d.bad()[s];
        }
        let total = good + bad;
        if total > 0.0 {
            (Some(good / total), Some(bad / total))
        } else {
            (None, None)
        }
    };
    let (gt, bt) = cell(Action::Compliant);
    let (gf, bf) = cell(Action::NonCompliant);
    Ok(CellPosteriors {
        good_given_compliant: gt,
        good_given_noncompliant: gf,
        bad_given_compliant: bt,
        bad_given_noncompliant: bf,
    })
}

/// Per-signal posterior `μ(g|s)`; `None` where `v(s) = 0`.
pub fn signal_posteriors(params: &AuditorParams, d: &InformationStrategy) -> Vec<Option<f64>> {
    d.marginal(params)
        .iter()
        .zip(d.good())
        .map(|(&v, &g)| (v > 0.0).then(|| params.prior_good() * g / v))
        .collect()
}

/// Audit confidence `r(ω|s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfidence {
    good: Vec<f64>,
    bad: Vec<f64>,
    normalizer: Option<Vec<f64>>,
    zero_mass: Vec<bool>,
}

impl AuditConfidence {
    /// Confidence given directly by `r(g|s)`, with `r(b|s) = 1 − r(g|s)`.
    pub fn from_good(good: Vec<f64>) -> Result<Self> {
        if good.is_empty() {
            return Err(AuditError::invalid("audit confidence is empty"));
        }
        if good.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(AuditError::invalid("r(g|s) must lie in [0, 1]"));
        }
        let bad = good.iter().map(|r| 1.0 - r).collect();
        let n = good.len();
        Ok(AuditConfidence {
            good,
            bad,
            normalizer: None,
            zero_mass: vec![false; n],
        })
    }

    /// `r(g|s)` per signal.
    pub fn good(&self) -> &[f64] {
        &self.good
    }

    /// `r(b|s)` per signal.
    pub fn bad(&self) -> &[f64] {
        &self.bad
    }

    /// `y′(s)` when produced by [`solve_audit_confidence`].
    pub fn normalizer(&self) -> Option<&[f64]> {
        self.normalizer.as_deref()
    }

    /// Signals with `v(s) = 0`, whose confidence was set to the prior.
    pub fn zero_mass(&self) -> &[bool] {
        &self.zero_mass
    }

    pub fn len(&self) -> usize {
        self.good.len()
    }

    pub fn is_empty(&self) -> bool {
        self.good.is_empty()
    }
}

/// Closed form at one signal with shares `Q_g(s)/v(s)` and `Q_b(s)/v(s)`:
/// returns `(r(g|s), r(b|s), y′(s))`.
fn confidence_terms(params: &AuditorParams, good_share: f64, bad_share: f64) -> (f64, f64, f64) {
    let u = params.utility();
    let lambda = params.lambda();
    let log_good = params.prior_good().ln() + u.miss() * bad_share / lambda;
    let log_bad = params.prior_bad().ln() + u.false_alarm() * good_share / lambda;
    let top = log_good.max(log_bad);
    let eg = (log_good - top).exp();
    let eb = (log_bad - top).exp();
    let sum = eg + eb;
    (eg / sum, eb / sum, (top + sum.ln()).exp())
}

/// `(r(g|s), r(b|s))` at `Q_b(s)/v(s) = ratio`, `Q_g(s)/v(s) = 1 − ratio`.
pub fn confidence_at_ratio(params: &AuditorParams, ratio: f64) -> Result<(f64, f64)> {
    params.require_dp_game()?;
    check_ratio(ratio)?;
    let (rg, rb, _) = confidence_terms(params, 1.0 - ratio, ratio);
    Ok((rg, rb))
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(AuditError::param(
            "ratio",
            format!("Q_b/v must lie in [0, 1], got {ratio}"),
        ));
    }
    Ok(())
}

/// Optimal audit confidence against fixed hypotheses:
/// `r(g|s) = μ(g) exp(u(b,T)Q_b(s)/(λv(s))) / y′(s)` and
/// `r(b|s) = μ(b) exp(u(g,F)Q_g(s)/(λv(s))) / y′(s)`.
pub fn solve_audit_confidence(
    params: &AuditorParams,
    hyp: &HypothesisPair,
) -> Result<AuditConfidence> {
    params.require_dp_game()?;
    let n = hyp.len();
    let mut good = Vec::with_capacity(n);
    let mut bad = Vec::with_capacity(n);
    let mut normalizer = Vec::with_capacity(n);
    let mut zero_mass = Vec::with_capacity(n);
    for s in 0..n {
        let v = hyp.totals()[s];
        if v > 0.0 {
            let (rg, rb, y) = confidence_terms(params, hyp.q_good()[s] / v, hyp.q_bad()[s] / v);
            good.push(rg);
            bad.push(rb);
            normalizer.push(y);
            zero_mass.push(false);
        } else {
            good.push(params.prior_good());
            bad.push(params.prior_bad());
            normalizer.push(1.0);
            zero_mass.push(true);
        }
    }
    Ok(AuditConfidence {
        good,
        bad,
        normalizer: Some(normalizer),
        zero_mass,
    })
}

fn check_confidence_dims(hyp: &HypothesisPair, r: &AuditConfidence) -> Result<()> {
    if hyp.len() != r.len() {
        return Err(AuditError::invalid(format!(
            "confidence covers {} signals, hypotheses {}",
            r.len(),
            hyp.len()
        )));
    }
    Ok(())
}

/// Per-signal contributions to the privacy-game objective:
/// `u(g,F)Q_g(s)r(b|s) + u(b,T)Q_b(s)r(g|s) − λ v(s) Σ_ω r(ω|s) ln(r(ω|s)/μ(ω))`.
pub fn objective_terms(
    params: &AuditorParams,
    hyp: &HypothesisPair,
    r: &AuditConfidence,
) -> Result<Vec<f64>> {
    params.require_dp_game()?;
    check_confidence_dims(hyp, r)?;
    let u = params.utility();
    let kl = |x: f64, prior: f64| if x > 0.0 { x * (x / prior).ln() } else { 0.0 };
    Ok((0..hyp.len())
        .map(|s| {
            let (rg, rb) = (r.good()[s], r.bad()[s]);
            u.false_alarm() * hyp.q_good()[s] * rb + u.miss() * hyp.q_bad()[s] * rg
                - params.lambda()
                    * hyp.totals()[s]
                    * (kl(rg, params.prior_good()) + kl(rb, params.prior_bad()))
        })
        .collect())
}

pub fn auditor_objective(
    params: &AuditorParams,
    hyp: &HypothesisPair,
    r: &AuditConfidence,
) -> Result<f64> {
    Ok(objective_terms(params, hyp, r)?.iter().sum())
}

/// Per-signal sensitivities of the audit confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparativeStatics {
    /// `χ(s) = [u(g,F)Q_g(s) − u(b,T)Q_b(s)] / v(s)`.
    pub chi: Vec<f64>,
    /// `φ(s) = [u(g,F)Q_g(s) + u(b,T)Q_b(s)] / (λ v(s))`.
    pub phi: Vec<f64>,
    /// `∂r(g|s)/∂λ`.
    pub dr_dlambda: Vec<f64>,
    /// `∂r(g|s)/∂(Q_b(s)/v(s))`.
    pub dr_dratio: Vec<f64>,
}

/// `(χ, φ, ∂r(g|s)/∂λ, ∂r(g|s)/∂x)` at `x = Q_b/v`.
///
/// The common factor `μ(g)μ(b)exp(φ)/y′²` equals `r(g|s)·r(b|s)`, which is
/// evaluated instead so small `λ` does not produce `0/0`.
fn statics_at(params: &AuditorParams, good_share: f64, bad_share: f64) -> (f64, f64, f64, f64) {
    let u = params.utility();
    let lambda = params.lambda();
    let chi = u.false_alarm() * good_share - u.miss() * bad_share;
    let phi = (u.false_alarm() * good_share + u.miss() * bad_share) / lambda;
    let (rg, rb, _) = confidence_terms(params, good_share, bad_share);
    let factor = rg * rb;
    let dr_dlambda = factor * chi / (lambda * lambda);
    let dr_dratio = factor * (u.false_alarm() + u.miss()) / lambda;
    (chi, phi, dr_dlambda, dr_dratio)
}

/// `∂r(g|s)/∂λ` at `Q_b/v = ratio`.
pub fn dr_dlambda_at_ratio(params: &AuditorParams, ratio: f64) -> Result<f64> {
    params.require_dp_game()?;
    check_ratio(ratio)?;
    Ok(statics_at(params, 1.0 - ratio, ratio).2)
}

/// `∂r(g|s)/∂(Q_b/v)` at `Q_b/v = ratio`.
pub fn dr_dratio_at_ratio(params: &AuditorParams, ratio: f64) -> Result<f64> {
    params.require_dp_game()?;
    check_ratio(ratio)?;
    Ok(statics_at(params, 1.0 - ratio, ratio).3)
}

/// `χ(s)` at `Q_b/v = ratio`.
pub fn chi_at_ratio(params: &AuditorParams, ratio: f64) -> Result<f64> {
    params.require_dp_game()?;
    check_ratio(ratio)?;
    Ok(statics_at(params, 1.0 - ratio, ratio).0)
}

pub fn comparative_statics(
    params: &AuditorParams,
    hyp: &HypothesisPair,
) -> Result<ComparativeStatics> {
    params.require_dp_game()?;
    let n = hyp.len();
    let mut out = ComparativeStatics {
        chi: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        dr_dlambda: Vec::with_capacity(n),
        dr_dratio: Vec::with_capacity(n),
    };
    for s in 0..n {
        let v = hyp.totals()[s];
        let (chi, phi, dl, dx) = if v > 0.0 {
            statics_at(params, hyp.q_good()[s] / v, hyp.q_bad()[s] / v)
        } else {
            (0.0, 0.0, 0.0, 0.0)
        };
        out.chi.push(chi);
        out.phi.push(phi);
        out.dr_dlambda.push(dl);
        out.dr_dratio.push(dx);
    }
    Ok(out)
}
