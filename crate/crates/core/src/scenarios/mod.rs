//! Configurable desk-scale runs of the thought experiments.
//!
//! Every scenario is a pure function of its configuration and a master
//! seed. Configurations are flat serde structs (unknown keys rejected,
//! every key defaulted) and every pass/fail check names the configuration
//! key holding its tolerance.

mod born;
mod box_escape;
mod cat;
mod double_slit;
mod drift;
mod epr;
mod newton;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{param_err, Result};
use crate::measure::{TrialStats, WalkOutcome};

pub use born::{born_run, BornConfig};
pub use box_escape::{box_escape_run, BoxEscapeConfig};
pub use cat::{product_persistence_run, CatConfig};
pub use double_slit::{double_slit_run, DoubleSlitConfig};
pub use drift::{drift_invariance_run, DriftConfig};
pub use epr::{epr_run, EprConfig};
pub use newton::{newtonian_equivalence_run, NewtonConfig, Potential};

/// A named table of numbers, written as one CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, header: &str) -> Option<Vec<f64>> {
        let i = self.headers.iter().position(|h| h == header)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// How a check compares its value against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value < tolerance`
    Below,
    /// `value <= tolerance`
    AtMost,
    /// `value > tolerance`
    Above,
    /// `value >= tolerance`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    /// Configuration key that declares `tolerance`.
    pub tolerance_key: String,
}

impl Check {
    pub fn new(name: &str, value: f64, comparison: Comparison, tolerance: f64, key: &str) -> Self {
        let passed = match comparison {
            Comparison::Below => value < tolerance,
            Comparison::AtMost => value <= tolerance,
            Comparison::Above => value > tolerance,
            Comparison::AtLeast => value >= tolerance,
        };
        Self {
            name: name.to_string(),
            passed,
            value,
            comparison,
            tolerance,
            tolerance_key: key.to_string(),
        }
    }
}

/// Walk outcomes behind a report, for `trials.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub stats: TrialStats,
    #[serde(skip)]
    pub outcomes: Vec<WalkOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    /// Effective configuration, as deserialized.
    pub config: Value,
    pub stats: Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub trials: Option<TrialRecord>,
}

impl ScenarioReport {
    fn new<C: Serialize>(scenario: &str, seed: u64, config: &C) -> Self {
        Self {
            scenario: scenario.to_string(),
            seed,
            config: serde_json::to_value(config).expect("configs serialize"),
            stats: Map::new(),
            checks: Vec::new(),
            tables: Vec::new(),
            trials: None,
        }
    }

    fn stat(&mut self, key: &str, value: impl Serialize) {
        self.stats
            .insert(key.to_string(), serde_json::to_value(value).expect("stats serialize"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// A validated scenario configuration of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    Born(BornConfig),
    DoubleSlit(DoubleSlitConfig),
    BoxEscape(BoxEscapeConfig),
    Epr(EprConfig),
    Cat(CatConfig),
    Newton(NewtonConfig),
    Drift(DriftConfig),
}

pub const SCENARIO_NAMES: [&str; 7] = ["born", "double-slit", "box-escape", "epr", "cat", "newton", "drift"];

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Born(_) => "born",
            Self::DoubleSlit(_) => "double-slit",
            Self::BoxEscape(_) => "box-escape",
            Self::Epr(_) => "epr",
            Self::Cat(_) => "cat",
            Self::Newton(_) => "newton",
            Self::Drift(_) => "drift",
        }
    }

    /// The default configuration of scenario `name`.
    pub fn default_for(name: &str) -> Result<Self> {
        Ok(match name {
            "born" => Self::Born(BornConfig::default()),
            "double-slit" => Self::DoubleSlit(DoubleSlitConfig::default()),
            "box-escape" => Self::BoxEscape(BoxEscapeConfig::default()),
            "epr" => Self::Epr(EprConfig::default()),
            "cat" => Self::Cat(CatConfig::default()),
            "newton" => Self::Newton(NewtonConfig::default()),
            "drift" => Self::Drift(DriftConfig::default()),
            other => return Err(param_err("scenario", format!("unknown scenario `{other}`"))),
        })
    }

    pub fn to_value(&self) -> Value {
        match self {
            Self::Born(c) => serde_json::to_value(c),
            Self::DoubleSlit(c) => serde_json::to_value(c),
            Self::BoxEscape(c) => serde_json::to_value(c),
            Self::Epr(c) => serde_json::to_value(c),
            Self::Cat(c) => serde_json::to_value(c),
            Self::Newton(c) => serde_json::to_value(c),
            Self::Drift(c) => serde_json::to_value(c),
        }
        .expect("configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Born(c) => c.validate(),
            Self::DoubleSlit(c) => c.validate(),
            Self::BoxEscape(c) => c.validate(),
            Self::Epr(c) => c.validate(),
            Self::Cat(c) => c.validate(),
            Self::Newton(c) => c.validate(),
            Self::Drift(c) => c.validate(),
        }
    }

    pub fn run(&self, seed: u64) -> Result<ScenarioReport> {
        match self {
            Self::Born(c) => born_run(c, seed),
            Self::DoubleSlit(c) => double_slit_run(c, seed),
            Self::BoxEscape(c) => box_escape_run(c),
            Self::Epr(c) => epr_run(c, seed),
            Self::Cat(c) => product_persistence_run(c),
            Self::Newton(c) => newtonian_equivalence_run(c),
            Self::Drift(c) => drift_invariance_run(c, seed),
        }
    }
}

// Shared validators; each error names the offending key.

pub(crate) fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(param_err(name, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

pub(crate) fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(param_err(name, format!("must be non-negative and finite, got {v}")));
    }
    Ok(())
}

pub(crate) fn finite(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(param_err(name, format!("must be finite, got {v}")));
    }
    Ok(())
}

pub(crate) fn at_least(name: &'static str, v: u64, min: u64) -> Result<()> {
    if v < min {
        return Err(param_err(name, format!("must be at least {min}, got {v}")));
    }
    Ok(())
}

pub(crate) fn probability(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
        return Err(param_err(name, format!("must lie in [0, 1], got {v}")));
    }
    Ok(())
}

pub(crate) fn epsilon_range(v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0 && v < 0.3) {
        return Err(param_err("epsilon", format!("must lie in (0, 0.3), got {v}")));
    }
    Ok(())
}

pub(crate) fn grid_keys(points: usize, min: f64, max: f64) -> Result<()> {
    if points < 16 {
        return Err(param_err("points", format!("need at least 16 nodes, got {points}")));
    }
    finite("axis_min", min)?;
    finite("axis_max", max)?;
    if max <= min {
        return Err(param_err("axis_max", format!("must exceed axis_min ({min}), got {max}")));
    }
    Ok(())
}

pub(crate) fn within_margin(name: &'static str, x: f64, min: f64, max: f64, sigma: f64) -> Result<()> {
    use crate::packets::SUPPORT_MARGIN;
    if x < min + SUPPORT_MARGIN * sigma || x > max - SUPPORT_MARGIN * sigma {
        return Err(param_err(
            name,
            format!("{x} is closer than {SUPPORT_MARGIN}σ to the grid edge [{min}, {max})"),
        ));
    }
    Ok(())
}

/// Time step giving the nominal step angle `angle` in dimension `n` at unit
/// GUE scale.
pub fn dt_for_angle(angle: f64, n: usize) -> f64 {
    angle / (n as f64).sqrt()
}
