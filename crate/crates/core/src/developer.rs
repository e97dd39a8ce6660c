//! The two developer types.
//!
//! A responsible developer runs the claimed budget. An irresponsible one
//! trades accuracy `A(ε)` against the chance `Σ_s Q_b(s) r(g|s)` of being
//! reported compliant, weighted by `β`. At a fixed audit confidence the
//! payoff is linear in the strategy, so a pure best response always exists.

use crate::auditor::AuditConfidence;
use crate::error::{AuditError, Result};
use crate::signal::{
    check_distribution, mix_distribution, AccuracyModel, OutputMatrix, PrivacyBudgetGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeveloperKind {
    Responsible,
    Irresponsible,
}

/// Mixed strategy `q(ε|ω)` over the budget grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeveloperStrategy {
    kind: DeveloperKind,
    weights: Vec<f64>,
    claimed_index: usize,
}

impl DeveloperStrategy {
    /// Point mass on the claimed budget.
    pub fn responsible(grid: &PrivacyBudgetGrid) -> Self {
        let mut weights = vec![0.0; grid.len()];
        weights[grid.claimed_index()] = 1.0;
        DeveloperStrategy {
            kind: DeveloperKind::Responsible,
            weights,
            claimed_index: grid.claimed_index(),
        }
    }

    pub fn irresponsible(grid: &PrivacyBudgetGrid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(AuditError::invalid(format!(
                "strategy has {} weights, grid has {} budgets",
                weights.len(),
                grid.len()
            )));
        }
        check_distribution("q(.|b)", &weights)?;
        if weights[grid.claimed_index()] > 0.0 {
            return Err(AuditError::invalid(
                "irresponsible strategy puts mass on the claimed budget",
            ));
        }
        Ok(DeveloperStrategy {
            kind: DeveloperKind::Irresponsible,
            weights,
            claimed_index: grid.claimed_index(),
        })
    }

    pub fn pure_irresponsible(grid: &PrivacyBudgetGrid, budget_index: usize) -> Result<Self> {
        if budget_index >= grid.len() {
            return Err(AuditError::invalid(format!(
                "budget index {budget_index} out of range"
            )));
        }
        let mut weights = vec![0.0; grid.len()];
        weights[budget_index] = 1.0;
        DeveloperStrategy::irresponsible(grid, weights)
    }

    /// Uniform over every budget except the claimed one.
    pub fn uniform_deviation(grid: &PrivacyBudgetGrid) -> Result<Self> {
        let n = grid.deviations().count();
        if n == 0 {
            return Err(AuditError::NoFeasibleDeviation);
        }
        let mut weights = vec![0.0; grid.len()];
        for i in grid.deviations() {
            weights[i] = 1.0 / n as f64;
        }
        DeveloperStrategy::irresponsible(grid, weights)
    }

    pub fn kind(&self) -> DeveloperKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn claimed_index(&self) -> usize {
        self.claimed_index
    }

    /// The budget index carrying all the mass, if the strategy is pure.
    pub fn pure_index(&self) -> Option<usize> {
        self.weights.iter().position(|&w| w == 1.0)
    }
}

pub fn responsible_strategy(grid: &PrivacyBudgetGrid) -> DeveloperStrategy {
    DeveloperStrategy::responsible(grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeveloperPayoff {
    pub expected_accuracy: f64,
    /// False-negative rate `Σ_s Q_b(s) r(g|s)`.
    pub evasion_rate: f64,
    pub beta: f64,
    pub total: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(AuditError::param(
            "beta",
            format!("must be non-negative, got {beta}"),
        ));
    }
    Ok(())
}

fn check_dims(p: &OutputMatrix, r: &AuditConfidence) -> Result<()> {
    if r.len() != p.n_signals() {
        return Err(AuditError::invalid(format!(
            "audit confidence covers {} signals, mechanism has {}",
            r.len(),
            p.n_signals()
        )));
    }
    Ok(())
}

/// Irresponsible developer's objective at a fixed audit confidence.
pub fn developer_payoff(
    strategy: &DeveloperStrategy,
    p: &OutputMatrix,
    acc: &AccuracyModel,
    r: &AuditConfidence,
    beta: f64,
) -> Result<DeveloperPayoff> {
    if strategy.kind() != DeveloperKind::Irresponsible {
        return Err(AuditError::invalid(
            "payoff is defined for the irresponsible developer",
        ));
    }
    check_beta(beta)?;
    check_dims(p, r)?;
    let accuracy = acc.values_on(p.budgets())?;
    let expected_accuracy = strategy
        .weights()
        .iter()
        .zip(&accuracy)
        .map(|(q, a)| q * a)
        .sum::<f64>();
    let q_bad = mix_distribution(p, strategy.weights())?;
    let evasion_rate = q_bad
        .iter()
        .zip(r.good())
        .map(|(q, rg)| q * rg)
        .sum::<f64>();
    Ok(DeveloperPayoff {
        expected_accuracy,
        evasion_rate,
        beta,
        total: expected_accuracy + beta * evasion_rate,
    })
}

/// `A(ε) + β Σ_s r(g|s) p(s|ε)` for each budget index in the grid.
fn pure_totals(
    p: &OutputMatrix,
    acc: &AccuracyModel,
    r: &AuditConfidence,
    beta: f64,
) -> Result<Vec<f64>> {
    check_beta(beta)?;
    check_dims(p, r)?;
    let accuracy = acc.values_on(p.budgets())?;
    Ok(p.rows()
        .iter()
        .zip(accuracy)
        .map(|(row, a)| a + beta * row.iter().zip(r.good()).map(|(x, rg)| x * rg).sum::<f64>())
        .collect())
}

/// Pure best response against a fixed `r`; ties go to the larger budget.
pub fn irresponsible_best_response(
    p: &OutputMatrix,
    acc: &AccuracyModel,
    r: &AuditConfidence,
    beta: f64,
    grid: &PrivacyBudgetGrid,
) -> Result<DeveloperStrategy> {
    if p.budgets() != grid.budgets() {
        return Err(AuditError::invalid(
            "mechanism and grid disagree on budgets",
        ));
    }
    let totals = pure_totals(p, acc, r, beta)?;
    let mut best: Option<usize> = None;
    for i in grid.deviations() {
        match best {
            Some(b) if totals[i] < totals[b] => {}
            _ => best = Some(i),
        }
    }
    let best = best.ok_or(AuditError::NoFeasibleDeviation)?;
    DeveloperStrategy::pure_irresponsible(grid, best)
}

/// For `E = {ε_l, ε_m, ε_h}` with `ε′ = ε_l`, returns
/// `ΔA + β Σ_s r(g|s)[p(s|ε_m) − p(s|ε_h)]` with `ΔA = A(ε_m) − A(ε_h)`.
/// A strictly positive value means the developer plays `ε_m`, otherwise `ε_h`.
pub fn switch_condition(
    p: &OutputMatrix,
    acc: &AccuracyModel,
    r: &AuditConfidence,
    beta: f64,
    grid: &PrivacyBudgetGrid,
) -> Result<f64> {
    if grid.len() != 3 || grid.claimed_index() != 0 {
        return Err(AuditError::invalid(
            "switch condition needs three budgets with the smallest claimed",
        ));
    }
    if p.budgets() != grid.budgets() {
        return Err(AuditError::invalid(
            "mechanism and grid disagree on budgets",
        ));
    }
    check_beta(beta)?;
    check_dims(p, r)?;
    let delta_a = acc.accuracy(grid.budgets()[1])? - acc.accuracy(grid.budgets()[2])?;
    let audit = p
        .row(1)
        .iter()
        .zip(p.row(2))
        .zip(r.good())
        .map(|((m, h), rg)| rg * (m - h))
        .sum::<f64>();
    Ok(delta_a + beta * audit)
}
