use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{at_least, epsilon_range, non_negative, positive, Check, Comparison, ScenarioReport, Table, TrialRecord};
use crate::dynamics::StepConfig;
use crate::error::{param_err, Result};
use crate::hilbert::{Ray, StateVector};
use crate::measure::{born_weights, run_trial_outcomes, DetectorSet, TrialStats};
use crate::stats::binomial_z;

/// Full-basis measurement of `Σ_j √w_j e^{iφ_j} e_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BornConfig {
    /// Target Born weights; the dimension is their count.
    pub weights: Vec<f64>,
    /// Optional phases (empty: all zero).
    pub phases: Vec<f64>,
    pub epsilon: f64,
    pub dt: f64,
    pub gue_scale: f64,
    pub max_steps: u64,
    pub trials: u64,
    pub tol_sigma: f64,
    pub tol_censored: f64,
}

impl Default for BornConfig {
    fn default() -> Self {
        Self {
            weights: vec![0.3, 0.7],
            phases: vec![],
            epsilon: 0.15,
            dt: 0.2,
            gue_scale: 1.0,
            max_steps: 1_000_000,
            trials: 10_000,
            tol_sigma: 3.0,
            tol_censored: 0.01,
        }
    }
}

impl BornConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() < 2 {
            return Err(param_err("weights", "need at least two weights"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(param_err("weights", "weights must be non-negative"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(param_err("weights", format!("weights must sum to 1, got {total}")));
        }
        if !self.phases.is_empty() && self.phases.len() != self.weights.len() {
            return Err(param_err("phases", "need one phase per weight (or none)"));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            return Err(param_err("phases", "phases must be finite"));
        }
        epsilon_range(self.epsilon)?;
        positive("dt", self.dt)?;
        positive("gue_scale", self.gue_scale)?;
        at_least("max_steps", self.max_steps, 1)?;
        at_least("trials", self.trials, 1)?;
        positive("tol_sigma", self.tol_sigma)?;
        non_negative("tol_censored", self.tol_censored)?;
        Ok(())
    }

    pub fn initial_state(&self) -> Result<Ray> {
        let amps = self
            .weights
            .iter()
            .enumerate()
            .map(|(j, w)| Complex64::from_polar(w.sqrt(), self.phases.get(j).copied().unwrap_or(0.0)))
            .collect();
        Ray::new(&StateVector::new(amps)?)
    }

    pub(crate) fn step_config(&self) -> Result<StepConfig> {
        StepConfig::new(self.dt, self.gue_scale)
    }
}

pub fn born_run(cfg: &BornConfig, seed: u64) -> Result<ScenarioReport> {
    cfg.validate()?;
    let n = cfg.weights.len();
    let psi0 = cfg.initial_state()?;
    let detectors = DetectorSet::full_basis(n, cfg.epsilon)?;
    let step = cfg.step_config()?;
    let born = born_weights(&psi0, &detectors)?;
    let outcomes = run_trial_outcomes(cfg.trials, &psi0, &detectors, &step, cfg.max_steps, seed)?;
    let stats = TrialStats::from_outcomes(&outcomes, n, seed);

    let mut report = ScenarioReport::new("born", seed, cfg);
    let mut table = Table::new(
        "frequencies",
        &["target", "born_weight", "count", "frequency", "wilson_lo", "wilson_hi", "z", "conditioned_frequency"],
    );
    let mut worst_z: f64 = 0.0;
    for j in 0..n {
        let z = binomial_z(stats.counts[j], stats.total, born.weights[j]);
        worst_z = worst_z.max(z);
        table.push(vec![
            j as f64,
            born.weights[j],
            stats.counts[j] as f64,
            stats.frequencies[j],
            stats.intervals[j].0,
            stats.intervals[j].1,
            z,
            stats.conditioned_frequencies[j],
        ]);
    }
    report.stat("born_weights", &born.weights);
    report.stat("born_renormalized", born.renormalized);
    report.stat("frequencies", &stats.frequencies);
    report.stat("conditioned_frequencies", &stats.conditioned_frequencies);
    report.stat("counts", &stats.counts);
    report.stat("censored", stats.censored);
    report.stat("mean_steps_to_hit", stats.mean_steps_to_hit);
    report.stat("rms_step_angle", step.rms_step_angle(n));
    report.stat("effective_step_angle", step.effective_angle(n));
    report.checks.push(Check::new("born_max_z", worst_z, Comparison::AtMost, cfg.tol_sigma, "tol_sigma"));
    report.checks.push(Check::new(
        "censored_fraction",
        stats.censored_fraction(),
        Comparison::Below,
        cfg.tol_censored,
        "tol_censored",
    ));
    report.tables.push(table);
    report.trials = Some(TrialRecord { stats, outcomes });
    Ok(report)
}
