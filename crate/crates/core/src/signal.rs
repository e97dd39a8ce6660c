//! Output model of the private mechanism.
//!
//! A privacy budget `ε` induces a finite distribution `p(s|ε)` over the
//! signal space the auditor observes. The default mechanism is a Laplace
//! mechanism on a scalar query, discretized into bins whose two outer bins
//! absorb the unbounded tails. Developer strategies are mixed through these
//! rows into the two hypotheses `Q_g` (responsible) and `Q_b` (irresponsible).

use crate::developer::DeveloperStrategy;
use crate::error::{AuditError, Result};

/// Tolerance on the total mass of every distribution built or accepted here.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-12;

/// Number of bins in the default signal space.
pub const DEFAULT_BINS: usize = 8;

/// Half-width of the default signal range, in units of the widest Laplace scale.
pub const DEFAULT_RANGE_SCALES: f64 = 8.0;

/// Checks that `values` is a probability distribution.
pub(crate) fn check_distribution(what: &str, values: &[f64]) -> Result<()> {
    check_distribution_within(what, values, DISTRIBUTION_TOLERANCE)
}

pub(crate) fn check_distribution_within(what: &str, values: &[f64], tolerance: f64) -> Result<()> {
    if values.is_empty() {
        return Err(AuditError::invalid(format!("{what} is empty")));
    }
    if let Some(x) = values.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(AuditError::invalid(format!(
            "{what} has a negative or non-finite entry ({x})"
        )));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > tolerance {
        return Err(AuditError::invalid(format!(
            "{what} sums to {total}, expected 1"
        )));
    }
    Ok(())
}

/// The finite set of privacy budgets together with the claimed budget `ε′`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyBudgetGrid {
    budgets: Vec<f64>,
    claimed_index: usize,
}

impl PrivacyBudgetGrid {
    pub fn new(budgets: Vec<f64>, claimed_index: usize) -> Result<Self> {
        if budgets.is_empty() {
            return Err(AuditError::param("budgets", "grid is empty"));
        }
        if budgets.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(AuditError::param(
                "budgets",
                "every budget must be finite and strictly positive",
            ));
        }
        if budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AuditError::param(
                "budgets",
                "grid must be strictly increasing",
            ));
        }
        if claimed_index >= budgets.len() {
            return Err(AuditError::param(
                "claimed_index",
                format!(
                    "index {claimed_index} out of range for {} budgets",
                    budgets.len()
                ),
            ));
        }
        Ok(PrivacyBudgetGrid {
            budgets,
            claimed_index,
        })
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn len(&self) -> usize {
        self.budgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.budgets.is_empty()
    }

    pub fn claimed_index(&self) -> usize {
        self.claimed_index
    }

    /// The claimed budget `ε′`.
    pub fn claimed(&self) -> f64 {
        self.budgets[self.claimed_index]
    }

    pub fn smallest(&self) -> f64 {
        self.budgets[0]
    }

    pub fn largest(&self) -> f64 {
        self.budgets[self.budgets.len() - 1]
    }

    /// Indices an irresponsible developer may play, in increasing budget order.
    pub fn deviations(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.budgets.len()).filter(move |&i| i != self.claimed_index)
    }

    pub fn index_of(&self, epsilon: f64) -> Option<usize> {
        index_of(&self.budgets, epsilon)
    }
}

fn index_of(budgets: &[f64], epsilon: f64) -> Option<usize> {
    budgets
        .iter()
        .position(|b| (b - epsilon).abs() <= 1e-12 * b.abs().max(1.0))
}

/// Bins over the mechanism's output range. Bin `i` covers
/// `(edges[i], edges[i+1]]`; the first and last bins extend to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpace {
    edges: Vec<f64>,
}

impl SignalSpace {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 3 {
            return Err(AuditError::invalid(
                "signal space needs at least two bins (three edges)",
            ));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(AuditError::invalid("bin edges must be finite"));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AuditError::invalid("bin edges must be strictly increasing"));
        }
        Ok(SignalSpace { edges })
    }

    /// `bins` equal-width bins covering `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(AuditError::param("bins", "need at least two bins"));
        }
        if !(lo < hi) {
            return Err(AuditError::param(
                "range",
                format!("empty range [{lo}, {hi}]"),
            ));
        }
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        edges.push(hi);
        SignalSpace::new(edges)
    }

    /// Index-labelled space of `size` signals, used with explicit tables.
    pub fn indexed(size: usize) -> Result<Self> {
        SignalSpace::new((0..=size).map(|i| i as f64).collect())
    }

    /// Eight bins spanning `true_value ± 8·(sensitivity/ε_min)`.
    pub fn default_for(
        true_value: f64,
        sensitivity: f64,
        grid: &PrivacyBudgetGrid,
    ) -> Result<Self> {
        let half = DEFAULT_RANGE_SCALES * sensitivity / grid.smallest();
        SignalSpace::uniform(true_value - half, true_value + half, DEFAULT_BINS)
    }

    pub fn size(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Bin bounds with the tails folded in.
    pub fn bounds(&self, bin: usize) -> (f64, f64) {
        let lo = if bin == 0 {
            f64::NEG_INFINITY
        } else {
            self.edges[bin]
        };
        let hi = if bin + 1 == self.size() {
            f64::INFINITY
        } else {
            self.edges[bin + 1]
        };
        (lo, hi)
    }
}

/// Output distributions `p(s|ε)`: one row per budget, one column per signal.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputMatrix {
    budgets: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl OutputMatrix {
    pub fn new(grid: &PrivacyBudgetGrid, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != grid.len() {
            return Err(AuditError::invalid(format!(
                "table has {} rows but the grid has {} budgets",
                rows.len(),
                grid.len()
            )));
        }
        let width = rows[0].len();
        if width < 2 {
            return Err(AuditError::invalid("table needs at least two signals"));
        }
        for (row, eps) in rows.iter().zip(grid.budgets()) {
            if row.len() != width {
                return Err(AuditError::invalid("table rows have different lengths"));
            }
            check_distribution(&format!("p(.|{eps})"), row)?;
        }
        Ok(OutputMatrix {
            budgets: grid.budgets().to_vec(),
            rows,
        })
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, budget_index: usize) -> &[f64] {
        &self.rows[budget_index]
    }

    pub fn n_budgets(&self) -> usize {
        self.rows.len()
    }

    pub fn n_signals(&self) -> usize {
        self.rows[0].len()
    }

    pub fn index_of(&self, epsilon: f64) -> Option<usize> {
        index_of(&self.budgets, epsilon)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MechanismModel {
    /// Laplace noise with scale `sensitivity/ε` added to `true_value`.
    DiscretizedLaplace {
        true_value: f64,
        sensitivity: f64,
    },
    ExplicitTable(OutputMatrix),
}

impl MechanismModel {
    pub fn laplace(true_value: f64, sensitivity: f64) -> Result<Self> {
        if !true_value.is_finite() {
            return Err(AuditError::param("true_value", "must be finite"));
        }
        if !(sensitivity.is_finite() && sensitivity > 0.0) {
            return Err(AuditError::param(
                "sensitivity",
                format!("must be strictly positive, got {sensitivity}"),
            ));
        }
        Ok(MechanismModel::DiscretizedLaplace {
            true_value,
            sensitivity,
        })
    }
}

/// Natural log of the Laplace(center, scale) mass on `(lo, hi]`.
///
/// Tail bins are evaluated through the survival function so that far bins
/// keep full relative precision.
pub fn laplace_log_mass(lo: f64, hi: f64, center: f64, scale: f64) -> f64 {
    let zl = (lo - center) / scale;
    let zh = (hi - center) / scale;
    let width = zh - zl;
    if zl >= 0.0 {
        (0.5f64).ln() - zl + (-(-width).exp_m1()).ln()
    } else if zh <= 0.0 {
        (0.5f64).ln() + zh + (-(-width).exp_m1()).ln()
    } else {
        (-0.5 * (zl.exp() + (-zh).exp())).ln_1p()
    }
}

fn laplace_log_row(center: f64, scale: f64, space: &SignalSpace) -> Vec<f64> {
    (0..space.size())
        .map(|bin| {
            let (lo, hi) = space.bounds(bin);
            laplace_log_mass(lo, hi, center, scale)
        })
        .collect()
}

fn check_budget(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(AuditError::param(
            "epsilon",
            format!("privacy budget must be strictly positive, got {epsilon}"),
        ));
    }
    Ok(())
}

/// Builds `p(s|ε)` for every budget in the grid.
pub fn output_distribution(
    mech: &MechanismModel,
    grid: &PrivacyBudgetGrid,
    space: &SignalSpace,
) -> Result<OutputMatrix> {
    match mech {
        MechanismModel::DiscretizedLaplace {
            true_value,
            sensitivity,
        } => {
            if !(*sensitivity > 0.0) {
                return Err(AuditError::param(
                    "sensitivity",
                    "must be strictly positive",
                ));
            }
            let rows = grid
                .budgets()
                .iter()
                .map(|&eps| {
                    check_budget(eps)?;
                    let scale = sensitivity / eps;
                    Ok(laplace_log_row(*true_value, scale, space)
                        .into_iter()
                        .map(f64::exp)
                        .collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            OutputMatrix::new(grid, rows)
        }
        MechanismModel::ExplicitTable(table) => {
            if table.budgets() != grid.budgets() {
                return Err(AuditError::invalid(
                    "explicit table was built for a different budget grid",
                ));
            }
            if table.n_signals() != space.size() {
                return Err(AuditError::invalid(format!(
                    "explicit table has {} signals, signal space has {}",
                    table.n_signals(),
                    space.size()
                )));
            }
            for (row, eps) in table.rows().iter().zip(table.budgets()) {
                check_distribution(&format!("p(.|{eps})"), row)?;
            }
            Ok(table.clone())
        }
    }
}

/// Outcome of the discretized ε-DP inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpCheck {
    pub epsilon: f64,
    /// `max_B |ln p(B|D1) − ln p(B|D2)|` over the bins.
    pub max_log_ratio: f64,
    /// Amount by which the ratio exceeds `ε` (zero when it does not).
    pub slack: f64,
}

impl DpCheck {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_log_ratio <= self.epsilon + tolerance
    }
}

/// Maximum absolute log-ratio between the binned outputs on two datasets
/// whose query answers differ by `shift`.
pub fn max_log_ratio(
    mech: &MechanismModel,
    epsilon: f64,
    space: &SignalSpace,
    shift: f64,
) -> Result<f64> {
    let (true_value, sensitivity) = match mech {
        MechanismModel::DiscretizedLaplace {
            true_value,
            sensitivity,
        } => (*true_value, *sensitivity),
        MechanismModel::ExplicitTable(_) => {
            return Err(AuditError::Unsupported(
                "the DP inequality check needs the Laplace mechanism".into(),
            ))
        }
    };
    check_budget(epsilon)?;
    if space.size() == 0 {
        return Err(AuditError::invalid("empty signal space"));
    }
    let scale = sensitivity / epsilon;
    let first = laplace_log_row(true_value, scale, space);
    let second = laplace_log_row(true_value + shift, scale, space);
    Ok(first
        .iter()
        .zip(&second)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Checks `Pr[M(D1) ∈ B] ≤ e^ε Pr[M(D2) ∈ B]` (both directions) over every
/// bin, with neighbouring datasets modelled as a shift of the query answer
/// by the sensitivity.
pub fn check_dp_inequality(
    mech: &MechanismModel,
    epsilon: f64,
    space: &SignalSpace,
) -> Result<DpCheck> {
    let sensitivity = match mech {
        MechanismModel::DiscretizedLaplace { sensitivity, .. } => *sensitivity,
        MechanismModel::ExplicitTable(_) => {
            return Err(AuditError::Unsupported(
                "the DP inequality check needs the Laplace mechanism".into(),
            ))
        }
    };
    let ratio = max_log_ratio(mech, epsilon, space, sensitivity)?;
    Ok(DpCheck {
        epsilon,
        max_log_ratio: ratio,
        slack: (ratio - epsilon).max(0.0),
    })
}

/// `KL(p ‖ q)` in nats with `0·ln 0 = 0`; infinite when `q` misses support of `p`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            if pi == 0.0 {
                0.0
            } else if qi == 0.0 {
                f64::INFINITY
            } else {
                pi * (pi / qi).ln()
            }
        })
        .sum()
}

/// `KL(p(·|ε′) ‖ p(·|ε))` for every budget in the matrix.
pub fn distinguishability(p: &OutputMatrix, claimed_index: usize) -> Vec<f64> {
    let reference = p.row(claimed_index);
    p.rows()
        .iter()
        .map(|row| kl_divergence(reference, row))
        .collect()
}

/// Accuracy curve `A(ε)`.
#[derive(Debug, Clone, PartialEq)]
pub enum AccuracyModel {
    /// `A(ε) = 1 − exp(−ε)`.
    ExponentialSaturation,
    Table {
        budgets: Vec<f64>,
        values: Vec<f64>,
    },
}

impl AccuracyModel {
    pub fn table(grid: &PrivacyBudgetGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(AuditError::invalid(format!(
                "accuracy table has {} values for {} budgets",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AuditError::invalid("accuracy values must be finite"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AuditError::invalid(
                "accuracy must be strictly increasing over the grid",
            ));
        }
        Ok(AccuracyModel::Table {
            budgets: grid.budgets().to_vec(),
            values,
        })
    }

    pub fn accuracy(&self, epsilon: f64) -> Result<f64> {
        match self {
            AccuracyModel::ExponentialSaturation => {
                check_budget(epsilon)?;
                Ok(-(-epsilon).exp_m1())
            }
            AccuracyModel::Table { budgets, values } => index_of(budgets, epsilon)
                .map(|i| values[i])
                .ok_or(AuditError::Lookup(epsilon)),
        }
    }

    /// Accuracies for every budget in `budgets`, checked strictly increasing.
    pub fn values_on(&self, budgets: &[f64]) -> Result<Vec<f64>> {
        let values = budgets
            .iter()
            .map(|&e| self.accuracy(e))
            .collect::<Result<Vec<_>>>()?;
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AuditError::invalid(
                "accuracy must be strictly increasing over the grid",
            ));
        }
        Ok(values)
    }
}

/// Signal distributions under the two hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    q_good: Vec<f64>,
    q_bad: Vec<f64>,
    totals: Vec<f64>,
}

impl HypothesisPair {
    pub fn new(q_good: Vec<f64>, q_bad: Vec<f64>) -> Result<Self> {
        if q_good.len() != q_bad.len() {
            return Err(AuditError::invalid(
                "hypotheses are defined over different signal spaces",
            ));
        }
        check_distribution("Q_g", &q_good)?;
        check_distribution("Q_b", &q_bad)?;
        let totals = q_good.iter().zip(&q_bad).map(|(g, b)| g + b).collect();
        Ok(HypothesisPair {
            q_good,
            q_bad,
            totals,
        })
    }

    pub fn q_good(&self) -> &[f64] {
        &self.q_good
    }

    pub fn q_bad(&self) -> &[f64] {
        &self.q_bad
    }

    /// `v(s) = Q_g(s) + Q_b(s)`.
    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn len(&self) -> usize {
        self.q_good.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_good.is_empty()
    }

    /// `Q_b(s)/v(s)`, or `None` for a signal neither hypothesis produces.
    pub fn bad_ratio(&self, signal: usize) -> Option<f64> {
        let v = self.totals[signal];
        (v > 0.0).then(|| self.q_bad[signal] / v)
    }
}

/// `Σ_ε p(s|ε) q(ε)`.
pub fn mix_distribution(p: &OutputMatrix, weights: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != p.n_budgets() {
        return Err(AuditError::invalid(format!(
            "strategy has {} weights, grid has {} budgets",
            weights.len(),
            p.n_budgets()
        )));
    }
    let mut out = vec![0.0; p.n_signals()];
    for (row, &w) in p.rows().iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += w * x;
        }
    }
    Ok(out)
}

/// Mixes the two developer strategies through `p` into `(Q_g, Q_b)`.
pub fn mix_hypotheses(
    p: &OutputMatrix,
    good: &DeveloperStrategy,
    bad: &DeveloperStrategy,
) -> Result<HypothesisPair> {
    if bad.weights()[bad.claimed_index()] > 0.0 {
        return Err(AuditError::invalid(
            "irresponsible strategy puts mass on the claimed budget",
        ));
    }
    let q_good = mix_distribution(p, good.weights())?;
    let q_bad = mix_distribution(p, bad.weights())?;
    HypothesisPair::new(q_good, q_bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> PrivacyBudgetGrid {
        PrivacyBudgetGrid::new(vec![0.5, 1.0, 2.0], 0).unwrap()
    }

    #[test]
    fn grid_rejects_bad_budgets() {
        assert!(PrivacyBudgetGrid::new(vec![], 0).is_err());
        assert!(PrivacyBudgetGrid::new(vec![1.0, 0.5], 0).is_err());
        assert!(PrivacyBudgetGrid::new(vec![0.0, 0.5], 0).is_err());
        assert!(PrivacyBudgetGrid::new(vec![0.5, 1.0], 2).is_err());
        let g = grid3();
        assert_eq!(g.claimed(), 0.5);
        assert_eq!(g.deviations().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn centered_two_bin_split_is_even() {
        let grid = PrivacyBudgetGrid::new(vec![1.0], 0).unwrap();
        let space = SignalSpace::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let mech = MechanismModel::laplace(0.0, 1.0).unwrap();
        let p = output_distribution(&mech, &grid, &space).unwrap();
        assert!((p.row(0)[0] - 0.5).abs() < 1e-15);
        assert!((p.row(0)[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn laplace_rows_are_distributions() {
        let grid = PrivacyBudgetGrid::new(vec![0.1, 0.5, 1.0, 2.0, 8.0], 1).unwrap();
        let space = SignalSpace::uniform(-10.0, 10.0, 16).unwrap();
        let mech = MechanismModel::laplace(0.3, 1.0).unwrap();
        let p = output_distribution(&mech, &grid, &space).unwrap();
        for row in p.rows() {
            assert!(row.iter().all(|x| *x >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn laplace_rejects_bad_parameters() {
        assert!(MechanismModel::laplace(0.0, 0.0).is_err());
        assert!(MechanismModel::laplace(0.0, -1.0).is_err());
        let grid = grid3();
        let space = SignalSpace::uniform(-4.0, 4.0, 4).unwrap();
        let raw = MechanismModel::DiscretizedLaplace {
            true_value: 0.0,
            sensitivity: -1.0,
        };
        assert!(matches!(
            output_distribution(&raw, &grid, &space),
            Err(AuditError::Parameter { .. })
        ));
    }

    #[test]
    fn explicit_table_passes_through() {
        let grid = grid3();
        let rows = vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.9, 0.1]];
        let table = OutputMatrix::new(&grid, rows.clone()).unwrap();
        let mech = MechanismModel::ExplicitTable(table);
        let p = output_distribution(&mech, &grid, &SignalSpace::indexed(2).unwrap()).unwrap();
        assert_eq!(p.rows(), rows.as_slice());
    }

    #[test]
    fn explicit_table_rejects_unnormalized_rows() {
        let grid = grid3();
        let rows = vec![vec![0.2, 0.8], vec![0.5, 0.6], vec![0.9, 0.1]];
        assert!(matches!(
            OutputMatrix::new(&grid, rows),
            Err(AuditError::Validation(_))
        ));
    }

    #[test]
    fn dp_ratio_is_zero_without_shift() {
        let mech = MechanismModel::laplace(0.0, 1.0).unwrap();
        let space = SignalSpace::uniform(-10.0, 10.0, 16).unwrap();
        assert_eq!(max_log_ratio(&mech, 0.5, &space, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn dp_check_holds_on_sixteen_bins() {
        let mech = MechanismModel::laplace(0.0, 1.0).unwrap();
        let space = SignalSpace::uniform(-10.0, 10.0, 16).unwrap();
        for eps in [0.5, 2.0] {
            let check = check_dp_inequality(&mech, eps, &space).unwrap();
            assert!(check.max_log_ratio <= eps + 1e-9, "{check:?}");
            assert!(check.passes(1e-9));
            assert!(check.slack <= 1e-9);
            // The outer bins see the full shift, so the bound is attained.
            assert!((check.max_log_ratio - eps).abs() < 1e-9);
        }
    }

    #[test]
    fn dp_check_rejects_tables() {
        let grid = grid3();
        let table =
            OutputMatrix::new(&grid, vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let space = SignalSpace::indexed(2).unwrap();
        assert!(matches!(
            check_dp_inequality(&MechanismModel::ExplicitTable(table), 1.0, &space),
            Err(AuditError::Unsupported(_))
        ));
    }

    #[test]
    fn kl_conventions() {
        assert_eq!(kl_divergence(&[0.0, 1.0], &[0.5, 0.5]), (2.0f64).ln());
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.0, 1.0]), f64::INFINITY);
        assert_eq!(kl_divergence(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
    }

    #[test]
    fn accuracy_models() {
        let grid = grid3();
        let exp = AccuracyModel::ExponentialSaturation;
        let a = exp.values_on(grid.budgets()).unwrap();
        assert!(a[0] < a[1] && a[1] < a[2]);
        assert!((exp.accuracy(50.0).unwrap() - 1.0).abs() < 1e-15);
        let table = AccuracyModel::table(&grid, vec![0.3, 0.6, 0.9]).unwrap();
        assert_eq!(table.accuracy(1.0).unwrap(), 0.6);
        assert_eq!(table.accuracy(1.5), Err(AuditError::Lookup(1.5)));
        assert!(AccuracyModel::table(&grid, vec![0.3, 0.3, 0.9]).is_err());
    }

    #[test]
    fn hypotheses_validate() {
        assert!(HypothesisPair::new(vec![0.5, 0.5], vec![0.2, 0.8]).is_ok());
        assert!(HypothesisPair::new(vec![0.5, 0.5], vec![0.2, 0.7]).is_err());
        assert!(HypothesisPair::new(vec![0.5, 0.5], vec![1.0]).is_err());
        let h = HypothesisPair::new(vec![0.5, 0.5, 0.0], vec![0.2, 0.8, 0.0]).unwrap();
        assert_eq!(h.totals(), &[0.7, 1.3, 0.0]);
        assert_eq!(h.bad_ratio(2), None);
    }

    #[test]
    fn mixing_rejects_dimension_mismatch() {
        let grid = grid3();
        let p =
            OutputMatrix::new(&grid, vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.9, 0.1]]).unwrap();
        assert!(mix_distribution(&p, &[0.5, 0.5]).is_err());
        let q = mix_distribution(&p, &[0.0, 0.5, 0.5]).unwrap();
        assert!((q[0] - 0.7).abs() < 1e-15 && (q[1] - 0.3).abs() < 1e-15);
    }
}
