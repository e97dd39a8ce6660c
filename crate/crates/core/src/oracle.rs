//! Brute-force checkers for the closed-form solvers.
//!
//! Nothing here calls into the solver it checks: objectives, decision rules
//! and payoffs are re-derived from the model parameters so a mistake in a
//! closed form cannot hide behind a shared helper.

use crate::auditor::{Action, AuditConfidence, AuditorParams, State};
use crate::error::{AuditError, Result};
use crate::signal::{AccuracyModel, HypothesisPair, OutputMatrix, PrivacyBudgetGrid};

/// Resolution and acceptance slack of a grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    resolution: usize,
    tolerance: f64,
}

impl GridSpec {
    pub fn new(resolution: usize, tolerance: f64) -> Result<Self> {
        if resolution < 10 {
            return Err(AuditError::param(
                "resolution",
                format!("need at least 10 points per dimension, got {resolution}"),
            ));
        }
        if !(tolerance > 0.0) {
            return Err(AuditError::param("tolerance", "must be strictly positive"));
        }
        Ok(GridSpec {
            resolution,
            tolerance,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Spacing between neighbouring grid points on `[0, 1]`.
    pub fn step(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    fn point(&self, k: usize) -> f64 {
        if k + 1 == self.resolution {
            1.0
        } else {
            k as f64 * self.step()
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 50,
            tolerance: 1e-3,
        }
    }
}

/// Best grid point of the information-acquisition objective on two signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptimum {
    pub value: f64,
    /// `d(·|g)` at the best grid point.
    pub d_good: [f64; 2],
    /// `d(·|b)` at the best grid point.
    pub d_bad: [f64; 2],
}

fn plogp_ratio(x: f64, y: f64) -> f64 {
    if x > 0.0 {
        x * (x / y).ln()
    } else {
        0.0
    }
}

/// `E[u] − λ I(ω;s)` with each signal mapped to its best action at the posterior.
fn two_signal_objective(params: &AuditorParams, d_good: [f64; 2], d_bad: [f64; 2]) -> f64 {
    let mu_g = params.prior(State::Good);
    let mu_b = params.prior(State::Bad);
    let u = params.utility();
    let mut utility = 0.0;
    let mut info = 0.0;
    for s in 0..2 {
        let joint_g = mu_g * d_good[s];
        let joint_b = mu_b * d_bad[s];
        let pass = joint_g * u.get(State::Good, Action::Compliant)
            + joint_b * u.get(State::Bad, Action::Compliant);
        let flag = joint_g * u.get(State::Good, Action::NonCompliant)
            + joint_b * u.get(State::Bad, Action::NonCompliant);
        utility += pass.max(flag);
        let marginal = joint_g + joint_b;
        info += mu_g * plogp_ratio(d_good[s], marginal) + mu_b * plogp_ratio(d_bad[s], marginal);
    }
    utility - params.lambda() * info
}

/// Exhaustive search over `d(s_1|g), d(s_1|b) ∈ {0, 1/(n−1), …, 1}`.
pub fn grid_max_information_strategy(params: &AuditorParams, spec: &GridSpec) -> GridOptimum {
    let mut best = GridOptimum {
        value: f64::NEG_INFINITY,
        d_good: [0.0, 1.0],
        d_bad: [0.0, 1.0],
    };
    for i in 0..spec.resolution() {
        let g = spec.point(i);
        for j in 0..spec.resolution() {
            let b = spec.point(j);
            let d_good = [g, 1.0 - g];
            let d_bad = [b, 1.0 - b];
            let value = two_signal_objective(params, d_good, d_bad);
            if value > best.value {
                best = GridOptimum {
                    value,
                    d_good,
                    d_bad,
                };
            }
        }
    }
    best
}

/// Per-signal maximizers of the audit-confidence objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptimum {
    /// Best grid value of `r(g|s)` per signal.
    pub r_good: Vec<f64>,
    /// Objective contribution of each signal at its best grid point.
    pub values: Vec<f64>,
}

impl SimplexOptimum {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Value of `r(g|s) = x` at one signal:
/// `u(g,F)Q_g(1−x) + u(b,T)Q_b x − λ v KL((x, 1−x) ‖ μ)`.
pub fn confidence_objective_at(params: &AuditorParams, q_good: f64, q_bad: f64, x: f64) -> f64 {
    let u = params.utility();
    let mu_g = params.prior(State::Good);
    let mu_b = params.prior(State::Bad);
    let kl = plogp_ratio(x, mu_g) + plogp_ratio(1.0 - x, mu_b);
    u.get(State::Good, Action::NonCompliant) * q_good * (1.0 - x)
        + u.get(State::Bad, Action::Compliant) * q_bad * x
        - params.lambda() * (q_good + q_bad) * kl
}

/// Sweeps `r(g|s)` over the grid on `[0, 1]` independently for each signal.
pub fn simplex_max_confidence(
    params: &AuditorParams,
    hyp: &HypothesisPair,
    spec: &GridSpec,
) -> Result<SimplexOptimum> {
    if !params.is_dp_game() {
        return Err(AuditError::invalid(
            "confidence oracle needs the privacy-game utilities",
        ));
    }
    let mut r_good = Vec::with_capacity(hyp.len());
    let mut values = Vec::with_capacity(hyp.len());
    for s in 0..hyp.len() {
        let (qg, qb) = (hyp.q_good()[s], hyp.q_bad()[s]);
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..spec.resolution() {
            let x = spec.point(k);
            let value = confidence_objective_at(params, qg, qb, x);
            if value > best.1 {
                best = (x, value);
            }
        }
        r_good.push(best.0);
        values.push(best.1);
    }
    Ok(SimplexOptimum { r_good, values })
}

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
pub fn finite_difference<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(AuditError::param(
            "h",
            format!("step must be positive, got {h}"),
        ));
    }
    let eval = |at: f64| -> Result<f64> {
        match f(at) {
            Ok(y) if y.is_finite() => Ok(y),
            Ok(y) => Err(AuditError::Evaluation {
                x: at,
                reason: format!("non-finite value {y}"),
            }),
            Err(e) => Err(AuditError::Evaluation {
                x: at,
                reason: e.to_string(),
            }),
        }
    };
    let hi = eval(x + h)?;
    let lo = eval(x - h)?;
    Ok((hi - lo) / (2.0 * h))
}

/// Index of the budget maximizing `A(ε) + β Σ_s r(g|s) p(s|ε)` over all
/// budgets except the claimed one, preferring the larger budget on ties.
pub fn exhaustive_developer(
    p: &OutputMatrix,
    acc: &AccuracyModel,
    r: &AuditConfidence,
    beta: f64,
    grid: &PrivacyBudgetGrid,
) -> Result<usize> {
    if r.len() != p.n_signals() {
        return Err(AuditError::invalid(
            "confidence and mechanism differ in signal count",
        ));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, &eps) in grid.budgets().iter().enumerate() {
        if i == grid.claimed_index() {
            continue;
        }
        let mut caught_free = 0.0;
        for s in 0..p.n_signals() {
            caught_free += p.row(i)[s] * r.good()[s];
        }
        let total = acc.accuracy(eps)? + beta * caught_free;
        if best.map_or(true, |(_, b)| total >= b) {
            best = Some((i, total));
        }
    }
    best.map(|(i, _)| i).ok_or(AuditError::NoFeasibleDeviation)
}
