use std::f64::consts::FRAC_PI_3;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    at_least, epsilon_range, grid_keys, non_negative, positive, probability, within_margin, Check, Comparison,
    ScenarioReport, Table, TrialRecord,
};
use crate::dynamics::{GeneratorDrift, StepConfig};
use crate::error::{param_err, Result};
use crate::hilbert::{inner, Ray, StateVector};
use crate::measure::{born_weights, chi_square_uniformity, run_trial_outcomes, DetectorSet, TrialStats};
use crate::packets::{make_position_packet, position_tangents, sigma_tangent, Grid};
use crate::rng::derive_seed;
use crate::subspace::Subspace;

/// Two detector sites on the position manifold; the walk starts tilted off
/// the manifold along the width-variation direction and may be pushed back
/// toward it by a drift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftConfig {
    pub points: usize,
    pub axis_min: f64,
    pub axis_max: f64,
    pub sigma: f64,
    pub sites: Vec<f64>,
    /// Born weight carried by each site.
    pub weights: Vec<f64>,
    /// Initial tilt away from the manifold, radians.
    pub tilt: f64,
    /// Drift speed (FS radians per unit time).
    pub drift_magnitude: f64,
    pub epsilon: f64,
    pub dt: f64,
    pub gue_scale: f64,
    pub max_steps: u64,
    pub trials: u64,
    /// Also run a second independent no-drift batch as a calibration of the
    /// homogeneity test.
    pub control: bool,
    pub tol_p: f64,
    /// Required drop in mean steps-to-hit under drift.
    pub tol_steps_decrease: f64,
    pub tol_orthogonality: f64,
    pub tol_censored: f64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            points: 128,
            axis_min: -16.0,
            axis_max: 16.0,
            sigma: 1.0,
            sites: vec![-4.0, 4.0],
            weights: vec![0.7, 0.3],
            tilt: FRAC_PI_3,
            drift_magnitude: 1.0,
            epsilon: 0.2,
            dt: 0.15,
            gue_scale: 1.0,
            max_steps: 1_000_000,
            trials: 10_000,
            control: false,
            tol_p: 0.01,
            tol_steps_decrease: 0.0,
            tol_orthogonality: 1e-8,
            tol_censored: 0.01,
        }
    }
}

impl DriftConfig {
    pub fn validate(&self) -> Result<()> {
        grid_keys(self.points, self.axis_min, self.axis_max)?;
        positive("sigma", self.sigma)?;
        if self.sites.len() < 2 {
            return Err(param_err("sites", "need at least two sites"));
        }
        for &s in &self.sites {
            within_margin("sites", s, self.axis_min, self.axis_max, self.sigma)?;
        }
        for (i, a) in self.sites.iter().enumerate() {
            if self.sites[i + 1..].iter().any(|b| (a - b).abs() < 6.0 * self.sigma) {
                return Err(param_err("sites", "sites must be at least 6σ apart"));
            }
        }
        if self.weights.len() != self.sites.len() {
            return Err(param_err("weights", "need one weight per site"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(param_err("weights", "weights must be positive"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(param_err("weights", format!("weights must sum to 1, got {total}")));
        }
        if !(self.tilt.is_finite() && self.tilt >= 0.0 && self.tilt < std::f64::consts::FRAC_PI_2) {
            return Err(param_err("tilt", format!("must lie in [0, π/2), got {}", self.tilt)));
        }
        non_negative("drift_magnitude", self.drift_magnitude)?;
        epsilon_range(self.epsilon)?;
        positive("dt", self.dt)?;
        positive("gue_scale", self.gue_scale)?;
        at_least("max_steps", self.max_steps, 1)?;
        at_least("trials", self.trials, 1)?;
        probability("tol_p", self.tol_p)?;
        non_negative("tol_steps_decrease", self.tol_steps_decrease)?;
        positive("tol_orthogonality", self.tol_orthogonality)?;
        probability("tol_censored", self.tol_censored)?;
        Ok(())
    }
}

/// Skew-Hermitian generator rotating each width direction `w_j` into its
/// site `n_j`, in subspace coordinates.
fn generator(n: &[StateVector], w: &[StateVector]) -> DMatrix<Complex64> {
    let d = n[0].len();
    let mut g = DMatrix::zeros(d, d);
    for (nj, wj) in n.iter().zip(w) {
        for r in 0..d {
            for c in 0..d {
                g[(r, c)] += nj.as_slice()[r] * wj.as_slice()[c].conj() - wj.as_slice()[r] * nj.as_slice()[c].conj();
            }
        }
    }
    g
}

pub fn drift_invariance_run(cfg: &DriftConfig, seed: u64) -> Result<ScenarioReport> {
    cfg.validate()?;
    let grid = Grid::line(cfg.points, cfg.axis_min, cfg.axis_max)?;
    let sites = cfg
        .sites
        .iter()
        .map(|&s| make_position_packet(&grid, &[s], cfg.sigma))
        .collect::<Result<Vec<_>>>()?;
    let widths = cfg
        .sites
        .iter()
        .map(|&s| Ok(sigma_tangent(&grid, &[s], cfg.sigma)?.with_length(1.0).direction))
        .collect::<Result<Vec<_>>>()?;

    // The width direction must be orthogonal to the manifold at each site.
    let mut orthogonality: f64 = 0.0;
    for ((&s, n), w) in cfg.sites.iter().zip(&sites).zip(&widths) {
        orthogonality = orthogonality.max(inner(n, w)?.norm());
        for t in position_tangents(&grid, &[s], cfg.sigma)? {
            orthogonality = orthogonality.max(inner(&t, w)?.norm() / t.norm());
        }
    }

    let spanning: Vec<StateVector> = sites.iter().zip(&widths).flat_map(|(n, w)| [n.clone(), w.clone()]).collect();
    let sub = Subspace::span(&spanning)?;
    let n_c = sites.iter().map(|v| sub.coords(v)).collect::<Result<Vec<_>>>()?;
    let w_c = widths.iter().map(|v| sub.coords(v)).collect::<Result<Vec<_>>>()?;
    let (c, s) = (cfg.tilt.cos(), cfg.tilt.sin());
    let mut amps = vec![Complex64::new(0.0, 0.0); sub.dim()];
    for ((nj, wj), &pj) in n_c.iter().zip(&w_c).zip(&cfg.weights) {
        for (k, a) in amps.iter_mut().enumerate() {
            *a += pj.sqrt() * (c * nj.as_slice()[k] + s * wj.as_slice()[k]);
        }
    }
    let psi0 = Ray::new(&StateVector::new(amps)?)?;
    let targets = n_c.iter().map(Ray::new).collect::<Result<Vec<_>>>()?;
    let detectors = DetectorSet::new(targets, cfg.epsilon)?;
    let born = born_weights(&psi0, &detectors)?;

    let plain = StepConfig::new(cfg.dt, cfg.gue_scale)?;
    let drift = GeneratorDrift::new(generator(&n_c, &w_c), cfg.drift_magnitude)?;
    let drifting = plain.clone().with_drift(Arc::new(drift));
    let k = detectors.len();
    let off_seed = derive_seed(seed, 0);
    let on_seed = derive_seed(seed, 1);
    let off_outcomes = run_trial_outcomes(cfg.trials, &psi0, &detectors, &plain, cfg.max_steps, off_seed)?;
    let off = TrialStats::from_outcomes(&off_outcomes, k, off_seed);
    let on_outcomes = run_trial_outcomes(cfg.trials, &psi0, &detectors, &drifting, cfg.max_steps, on_seed)?;
    let on = TrialStats::from_outcomes(&on_outcomes, k, on_seed);
    let chi = chi_square_uniformity(&off, &on)?;

    let mut report = ScenarioReport::new("drift", seed, cfg);
    report.stat("walk_dimension", sub.dim());
    report.stat("born_weights", &born.weights);
    report.stat("frequencies_drift_off", &off.frequencies);
    report.stat("frequencies_drift_on", &on.frequencies);
    report.stat("conditioned_frequencies_drift_off", &off.conditioned_frequencies);
    report.stat("conditioned_frequencies_drift_on", &on.conditioned_frequencies);
    report.stat("mean_steps_drift_off", off.mean_steps_to_hit);
    report.stat("mean_steps_drift_on", on.mean_steps_to_hit);
    report.stat("censored_drift_off", off.censored);
    report.stat("censored_drift_on", on.censored);
    report.stat("chi_square", chi.statistic);
    report.stat("chi_square_dof", chi.dof);
    report.stat("chi_square_p", chi.p_value);
    report.stat("drift_step", cfg.drift_magnitude * cfg.dt);
    report.stat("rms_random_step", plain.rms_step_angle(sub.dim()));
    report.stat("orthogonality_defect", orthogonality);

    let mut table = Table::new(
        "hits",
        &["site", "born_weight", "count_drift_off", "frequency_drift_off", "count_drift_on", "frequency_drift_on"],
    );
    for j in 0..k {
        table.push(vec![
            cfg.sites[j],
            born.weights[j],
            off.counts[j] as f64,
            off.frequencies[j],
            on.counts[j] as f64,
            on.frequencies[j],
        ]);
    }

    report.checks.push(Check::new("homogeneity_p", chi.p_value, Comparison::Above, cfg.tol_p, "tol_p"));
    report.checks.push(Check::new(
        "drift_speeds_absorption",
        off.mean_steps_to_hit - on.mean_steps_to_hit,
        Comparison::Above,
        cfg.tol_steps_decrease,
        "tol_steps_decrease",
    ));
    report.checks.push(Check::new(
        "width_direction_orthogonal",
        orthogonality,
        Comparison::Below,
        cfg.tol_orthogonality,
        "tol_orthogonality",
    ));
    report.checks.push(Check::new(
        "censored_fraction",
        off.censored_fraction().max(on.censored_fraction()),
        Comparison::Below,
        cfg.tol_censored,
        "tol_censored",
    ));
    if cfg.control {
        let ctl_seed = derive_seed(seed, 2);
        let ctl_outcomes = run_trial_outcomes(cfg.trials, &psi0, &detectors, &plain, cfg.max_steps, ctl_seed)?;
        let ctl = TrialStats::from_outcomes(&ctl_outcomes, k, ctl_seed);
        let ctl_chi = chi_square_uniformity(&off, &ctl)?;
        report.stat("frequencies_control", &ctl.frequencies);
        report.stat("control_chi_square_p", ctl_chi.p_value);
        report.checks.push(Check::new("control_homogeneity_p", ctl_chi.p_value, Comparison::Above, cfg.tol_p, "tol_p"));
    }
    report.tables.push(table);
    report.trials = Some(TrialRecord {
        stats: on,
        outcomes: on_outcomes,
    });
    Ok(report)
}
