//! TOML run configuration and its validation into model types.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::auditor::{AuditorParams, Utility};
use crate::developer::DeveloperStrategy;
use crate::equilibrium::{GameInstance, LeaderOptions, SolveMode};
use crate::error::AuditError;
use crate::oracle::GridSpec;
use crate::signal::{
    output_distribution, AccuracyModel, MechanismModel, OutputMatrix, PrivacyBudgetGrid,
    SignalSpace, DEFAULT_BINS, DEFAULT_RANGE_SCALES,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mechanism: MechanismSection,
    pub budgets: BudgetsSection,
    #[serde(default)]
    pub accuracy: AccuracySection,
    pub auditor: AuditorSection,
    #[serde(default)]
    pub developer: DeveloperSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    Laplace,
    Table,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismSection {
    pub kind: MechanismKind,
    pub true_value: Option<f64>,
    pub sensitivity: Option<f64>,
    pub bins: Option<usize>,
    pub range: Option<[f64; 2]>,
    /// Inline `p(s|ε)`, one row per budget.
    pub rows: Option<Vec<Vec<f64>>>,
    /// CSV with a header of signal labels and one row per budget.
    pub table_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetsSection {
    pub grid: Vec<f64>,
    #[serde(default)]
    pub claimed_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccuracyKind {
    #[default]
    Exponential,
    Table,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccuracySection {
    #[serde(default)]
    pub kind: AccuracyKind,
    pub table: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditorSection {
    #[serde(default = "half")]
    pub prior_good: f64,
    /// `u(g,F)`.
    pub false_alarm: f64,
    /// `u(b,T)`.
    pub miss: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    pub lambda_grid: Option<Vec<f64>>,
    /// General utilities for the information-strategy solver.
    pub utility: Option<UtilitySection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySection {
    pub good_compliant: f64,
    pub good_noncompliant: f64,
    pub bad_compliant: f64,
    pub bad_noncompliant: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeveloperSection {
    #[serde(default = "one")]
    pub beta: f64,
    /// Irresponsible strategy used by `solve-auditor` and `oracle-check`;
    /// defaults to a point mass on the largest budget.
    pub weights: Option<Vec<f64>>,
}

impl Default for DeveloperSection {
    fn default() -> Self {
        DeveloperSection {
            beta: 1.0,
            weights: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Lambda,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    LeaderEnumeration,
    Iteration,
}

impl From<ModeName> for SolveMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::LeaderEnumeration => SolveMode::LeaderEnumeration,
            ModeName::Iteration => SolveMode::BestResponseIteration,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub out: Option<PathBuf>,
    pub mode: Option<ModeName>,
    #[serde(default = "default_rounds")]
    pub max_rounds: usize,
    pub mixture_step: Option<f64>,
    pub sweep: Option<SweepKind>,
    pub ratio_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub information_strategy: bool,
    #[serde(default = "default_resolution")]
    pub oracle_resolution: usize,
    #[serde(default = "default_tolerance")]
    pub oracle_tolerance: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            out: None,
            mode: None,
            max_rounds: default_rounds(),
            mixture_step: None,
            sweep: None,
            ratio_grid: None,
            information_strategy: false,
            oracle_resolution: default_resolution(),
            oracle_tolerance: default_tolerance(),
        }
    }
}

fn half() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn default_rounds() -> usize {
    100
}

fn default_resolution() -> usize {
    50
}

fn default_tolerance() -> f64 {
    1e-3
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub game: GameInstance,
    pub mechanism: MechanismModel,
    /// Bins of the Laplace mechanism; `None` for explicit tables.
    pub space: Option<SignalSpace>,
    pub bad_strategy: DeveloperStrategy,
    /// General-utility auditor for the information-strategy solver.
    pub general_auditor: AuditorParams,
    pub lambda_grid: Option<Vec<f64>>,
    pub ratio_grid: Option<Vec<f64>>,
    pub sweep: Option<SweepKind>,
    pub mode: SolveMode,
    pub leader: LeaderOptions,
    pub max_rounds: usize,
    pub information_strategy: bool,
    pub oracle_grid: GridSpec,
    pub out: Option<PathBuf>,
}

fn at(field: &str) -> impl Fn(AuditError) -> CliError + '_ {
    move |e| CliError::config(field, e.to_string())
}

fn nonempty(field: &str, grid: &Option<Vec<f64>>) -> Result<(), CliError> {
    match grid {
        Some(g) if g.is_empty() => Err(CliError::config(field, "sweep grid is empty")),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Reads and validates a configuration file. Relative table paths are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Experiment, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        RunConfig::from_toml_str(&text)?.validate(base)
    }

    pub fn validate(&self, base_dir: &Path) -> Result<Experiment, CliError> {
        let grid = PrivacyBudgetGrid::new(self.budgets.grid.clone(), self.budgets.claimed_index)
            .map_err(at("budgets"))?;
        let (mechanism, space, outputs) = self.mechanism(&grid, base_dir)?;

        let accuracy = match self.accuracy.kind {
            AccuracyKind::Exponential => {
                if self.accuracy.table.is_some() {
                    return Err(CliError::config(
                        "accuracy.table",
                        "only allowed with kind = \"table\"",
                    ));
                }
                AccuracyModel::ExponentialSaturation
            }
            AccuracyKind::Table => {
                let values = self
                    .accuracy
                    .table
                    .clone()
                    .ok_or_else(|| CliError::config("accuracy.table", "missing"))?;
                AccuracyModel::table(&grid, values).map_err(at("accuracy.table"))?
            }
        };

        let a = &self.auditor;
        if !(a.false_alarm < 0.0) {
            return Err(CliError::config(
                "auditor.false_alarm",
                format!("penalty must be negative, got {}", a.false_alarm),
            ));
        }
        if !(a.miss < 0.0) {
            return Err(CliError::config(
                "auditor.miss",
                format!("penalty must be negative, got {}", a.miss),
            ));
        }
        if !(a.prior_good > 0.0 && a.prior_good < 1.0) {
            return Err(CliError::config("auditor.prior_good", "must lie in (0, 1)"));
        }
        let auditor = AuditorParams::dp_game(a.prior_good, a.false_alarm, a.miss, a.lambda)
            .map_err(at("auditor.lambda"))?;
        let general_auditor = match a.utility {
            Some(u) => AuditorParams::new(
                a.prior_good,
                Utility {
                    good_compliant: u.good_compliant,
                    good_noncompliant: u.good_noncompliant,
                    bad_compliant: u.bad_compliant,
                    bad_noncompliant: u.bad_noncompliant,
                },
                a.lambda,
            )
            .map_err(at("auditor.utility"))?,
            None => auditor,
        };
        nonempty("auditor.lambda_grid", &a.lambda_grid)?;
        if let Some(g) = &a.lambda_grid {
            if g.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(CliError::config(
                    "auditor.lambda_grid",
                    "values must be positive",
                ));
            }
        }

        let game = GameInstance::new(
            grid.clone(),
            outputs,
            accuracy,
            auditor,
            self.developer.beta,
        )
        .map_err(at("developer.beta"))?;
        let bad_strategy = match &self.developer.weights {
            Some(w) => DeveloperStrategy::irresponsible(&grid, w.clone())
                .map_err(at("developer.weights"))?,
            None => {
                let largest = (0..grid.len())
                    .filter(|&i| i != grid.claimed_index())
                    .last()
                    .ok_or_else(|| {
                        CliError::config("budgets.grid", "no budget besides the claimed one")
                    })?;
                DeveloperStrategy::pure_irresponsible(&grid, largest).map_err(at("developer"))?
            }
        };

        let r = &self.run;
        nonempty("run.ratio_grid", &r.ratio_grid)?;
        if let Some(g) = &r.ratio_grid {
            if g.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
                return Err(CliError::config(
                    "run.ratio_grid",
                    "ratios must lie in (0, 1)",
                ));
            }
        }
        if let Some(step) = r.mixture_step {
            if !(step > 0.0 && step <= 0.5) {
                return Err(CliError::config("run.mixture_step", "must lie in (0, 0.5]"));
            }
        }
        if r.max_rounds == 0 {
            return Err(CliError::config(
                "run.max_rounds",
                "need at least one round",
            ));
        }
        let oracle_grid = GridSpec::new(r.oracle_resolution, r.oracle_tolerance)
            .map_err(at("run.oracle_resolution"))?;

        Ok(Experiment {
            game,
            mechanism,
            space,
            bad_strategy,
            general_auditor,
            lambda_grid: a.lambda_grid.clone(),
            ratio_grid: r.ratio_grid.clone(),
            sweep: r.sweep,
            mode: r
                .mode
                .map(SolveMode::from)
                .unwrap_or(SolveMode::LeaderEnumeration),
            leader: LeaderOptions {
                mixture_step: r.mixture_step,
            },
            max_rounds: r.max_rounds,
            information_strategy: r.information_strategy,
            oracle_grid,
            out: r.out.clone(),
        })
    }

    fn mechanism(
        &self,
        grid: &PrivacyBudgetGrid,
        base_dir: &Path,
    ) -> Result<(MechanismModel, Option<SignalSpace>, OutputMatrix), CliError> {
        let m = &self.mechanism;
        match m.kind {
            MechanismKind::Laplace => {
                if m.rows.is_some() {
                    return Err(CliError::config(
                        "mechanism.rows",
                        "only allowed with kind = \"table\"",
                    ));
                }
                if m.table_file.is_some() {
                    return Err(CliError::config(
                        "mechanism.table_file",
                        "only allowed with kind = \"table\"",
                    ));
                }
                let true_value = m.true_value.unwrap_or(0.0);
                let sensitivity = m.sensitivity.unwrap_or(1.0);
                let mech = MechanismModel::laplace(true_value, sensitivity)
                    .map_err(at("mechanism.sensitivity"))?;
                let bins = m.bins.unwrap_or(DEFAULT_BINS);
                let [lo, hi] = m.range.unwrap_or_else(|| {
                    let half = DEFAULT_RANGE_SCALES * sensitivity / grid.smallest();
                    [true_value - half, true_value + half]
                });
                let space = SignalSpace::uniform(lo, hi, bins).map_err(at("mechanism.range"))?;
                let outputs = output_distribution(&mech, grid, &space).map_err(at("mechanism"))?;
                Ok((mech, Some(space), outputs))
            }
            MechanismKind::Table => {
                for (field, set) in [
                    ("mechanism.true_value", m.true_value.is_some()),
                    ("mechanism.sensitivity", m.sensitivity.is_some()),
                    ("mechanism.bins", m.bins.is_some()),
                    ("mechanism.range", m.range.is_some()),
                ] {
                    if set {
                        return Err(CliError::config(
                            field,
                            "only allowed with kind = \"laplace\"",
                        ));
                    }
                }
                let rows = match (&m.rows, &m.table_file) {
                    (Some(rows), None) => rows.clone(),
                    (None, Some(file)) => read_table(&base_dir.join(file))?,
                    (Some(_), Some(_)) => {
                        return Err(CliError::config(
                            "mechanism.rows",
                            "give either rows or table_file, not both",
                        ))
                    }
                    (None, None) => {
                        return Err(CliError::config("mechanism.rows", "missing output table"))
                    }
                };
                let table = OutputMatrix::new(grid, rows).map_err(at("mechanism.rows"))?;
                let space =
                    SignalSpace::indexed(table.n_signals()).map_err(at("mechanism.rows"))?;
                let mech = MechanismModel::ExplicitTable(table);
                let outputs =
                    output_distribution(&mech, grid, &space).map_err(at("mechanism.rows"))?;
                Ok((mech, None, outputs))
            }
        }
    }
}

/// Reads `p(s|ε)` from CSV: a header of signal labels, then one row per budget.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(CliError::Csv)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(CliError::Csv)?;
        let row = record
            .iter()
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|e| {
                    CliError::config(
                        "mechanism.table_file",
                        format!("row {}: cannot parse `{cell}`: {e}", i + 1),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}
