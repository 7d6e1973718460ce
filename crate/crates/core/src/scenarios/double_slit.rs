use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    at_least, epsilon_range, grid_keys, non_negative, positive, within_margin, Check, Comparison, ScenarioReport,
    Table, TrialRecord,
};
use crate::dynamics::{evolve_grid, GridHamiltonian, StepConfig};
use crate::error::{param_err, Result};
use crate::hilbert::{normalize, Ray, StateVector};
use crate::measure::{born_weights, run_trial_outcomes, DetectorSet, TrialStats};
use crate::packets::{make_position_packet, project_to_manifold, Grid, ManifoldKind, ManifoldSpec};
use crate::rng::derive_seed;
use crate::stats::binomial_z;
use crate::subspace::Subspace;

/// Two (or one) packets released from slits, freely evolved to a plate and
/// detected by walks among plate sites; plus which-slit detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleSlitConfig {
    pub points: usize,
    pub axis_min: f64,
    pub axis_max: f64,
    pub sigma: f64,
    pub slit_separation: f64,
    /// Control run: only the first slit is open.
    pub single_slit: bool,
    pub mass: f64,
    pub flight_time: f64,
    pub time_steps: u64,
    pub plate_center: f64,
    /// Number of adjacent grid sites carrying detectors.
    pub plate_sites: usize,
    pub epsilon: f64,
    pub dt: f64,
    pub gue_scale: f64,
    pub max_steps: u64,
    pub trials: u64,
    pub which_slit_trials: u64,
    pub tol_sigma: f64,
    pub tol_censored: f64,
    /// Required growth of the distance to the position manifold when the
    /// slits split the packet.
    pub tol_move_away: f64,
}

impl Default for DoubleSlitConfig {
    fn default() -> Self {
        Self {
            points: 256,
            axis_min: -40.0,
            axis_max: 40.0,
            sigma: 1.0,
            slit_separation: 8.0,
            single_slit: false,
            mass: 1.0,
            flight_time: 6.0,
            time_steps: 600,
            plate_center: 1.5,
            plate_sites: 3,
            epsilon: 0.15,
            dt: 0.17,
            gue_scale: 1.0,
            max_steps: 1_000_000,
            trials: 2000,
            which_slit_trials: 2000,
            tol_sigma: 3.0,
            tol_censored: 0.01,
            tol_move_away: 0.1,
        }
    }
}

impl DoubleSlitConfig {
    pub fn validate(&self) -> Result<()> {
        grid_keys(self.points, self.axis_min, self.axis_max)?;
        positive("sigma", self.sigma)?;
        positive("slit_separation", self.slit_separation)?;
        if self.slit_separation < 6.0 * self.sigma {
            return Err(param_err("slit_separation", "slits must be at least 6σ apart"));
        }
        for x in self.slits() {
            within_margin("slit_separation", x, self.axis_min, self.axis_max, self.sigma)?;
        }
        positive("mass", self.mass)?;
        positive("flight_time", self.flight_time)?;
        at_least("time_steps", self.time_steps, 1)?;
        if !(self.plate_center.is_finite() && self.plate_center >= self.axis_min && self.plate_center < self.axis_max) {
            return Err(param_err("plate_center", "must lie on the grid"));
        }
        if self.plate_sites < 2 || self.plate_sites > self.points {
            return Err(param_err("plate_sites", "need between 2 and `points` sites"));
        }
        epsilon_range(self.epsilon)?;
        positive("dt", self.dt)?;
        positive("gue_scale", self.gue_scale)?;
        at_least("max_steps", self.max_steps, 1)?;
        at_least("trials", self.trials, 1)?;
        at_least("which_slit_trials", self.which_slit_trials, 1)?;
        positive("tol_sigma", self.tol_sigma)?;
        non_negative("tol_censored", self.tol_censored)?;
        non_negative("tol_move_away", self.tol_move_away)?;
        Ok(())
    }

    fn slits(&self) -> [f64; 2] {
        [-self.slit_separation / 2.0, self.slit_separation / 2.0]
    }
}

fn unimodal(density: &[f64]) -> bool {
    let peak = density
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |b, (i, &d)| if d > b.1 { (i, d) } else { b })
        .0;
    let tol = 1e-12 * density[peak];
    density[..=peak].windows(2).all(|w| w[1] >= w[0] - tol) && density[peak..].windows(2).all(|w| w[1] <= w[0] + tol)
}

pub fn double_slit_run(cfg: &DoubleSlitConfig, seed: u64) -> Result<ScenarioReport> {
    cfg.validate()?;
    let grid = Grid::line(cfg.points, cfg.axis_min, cfg.axis_max)?;
    let spec = ManifoldSpec::new(ManifoldKind::Position, grid, cfg.sigma, 1)?;
    let [s1, s2] = cfg.slits();
    let w1 = make_position_packet(&grid, &[s1], cfg.sigma)?;
    let w2 = make_position_packet(&grid, &[s2], cfg.sigma)?;
    let source = make_position_packet(&grid, &[0.0], cfg.sigma)?;
    let after = if cfg.single_slit {
        w1.clone()
    } else {
        normalize(&w1.add_scaled(Complex64::new(1.0, 0.0), &w2)?)?
    };
    let d_before = project_to_manifold(&source, &spec, None)?.distance;
    let d_after = project_to_manifold(&after, &spec, None)?.distance;

    // Free flight to the plate.
    let h = GridHamiltonian::free(grid, cfg.mass)?;
    let plate = evolve_grid(&after, &h, cfg.flight_time / cfg.time_steps as f64, cfg.time_steps as usize)?;
    let density: Vec<f64> = plate.as_slice().iter().map(|z| z.norm_sqr()).collect();
    let mut density_table = Table::new("plate_density", &["x", "density"]);
    for (k, d) in density.iter().enumerate() {
        density_table.push(vec![grid.node(k), d / grid.spacing()]);
    }

    // Plate detectors: one per site in a window around plate_center.
    let center = (((cfg.plate_center - cfg.axis_min) / grid.spacing()).round() as usize).min(cfg.points - 1);
    let first = center.saturating_sub(cfg.plate_sites / 2).min(cfg.points - cfg.plate_sites);
    let sites: Vec<usize> = (first..first + cfg.plate_sites).collect();
    let window: Vec<Complex64> = sites.iter().map(|&k| plate.as_slice()[k]).collect();
    let window_weight: f64 = window.iter().map(|z| z.norm_sqr()).sum();
    let psi_plate = Ray::new(&StateVector::new(window)?)?;
    let plate_detectors = DetectorSet::full_basis(cfg.plate_sites, cfg.epsilon)?;
    let plate_born = born_weights(&psi_plate, &plate_detectors)?;
    let step = StepConfig::new(cfg.dt, cfg.gue_scale)?;
    let plate_seed = derive_seed(seed, 0);
    let outcomes = run_trial_outcomes(cfg.trials, &psi_plate, &plate_detectors, &step, cfg.max_steps, plate_seed)?;
    let plate_stats = TrialStats::from_outcomes(&outcomes, cfg.plate_sites, plate_seed);
    let mut plate_table = Table::new("plate_sites", &["x", "born_weight", "count", "frequency", "wilson_lo", "wilson_hi", "z"]);
    let mut plate_z: f64 = 0.0;
    for (j, &k) in sites.iter().enumerate() {
        let z = binomial_z(plate_stats.counts[j], plate_stats.total, plate_born.weights[j]);
        plate_z = plate_z.max(z);
        plate_table.push(vec![
            grid.node(k),
            plate_born.weights[j],
            plate_stats.counts[j] as f64,
            plate_stats.frequencies[j],
            plate_stats.intervals[j].0,
            plate_stats.intervals[j].1,
            z,
        ]);
    }

    // Which-slit detection inside span{ω(s1), ω(s2)}.
    let sub = Subspace::span(&[w1.clone(), w2.clone()])?;
    let slit_targets = vec![Ray::new(&sub.coords(&w1)?)?, Ray::new(&sub.coords(&w2)?)?];
    let slit_detectors = DetectorSet::new(slit_targets, cfg.epsilon)?;
    let psi_slit = Ray::new(&sub.coords(&after)?)?;
    let slit_born = born_weights(&psi_slit, &slit_detectors)?;
    let slit_seed = derive_seed(seed, 1);
    let slit_outcomes = run_trial_outcomes(cfg.which_slit_trials, &psi_slit, &slit_detectors, &step, cfg.max_steps, slit_seed)?;
    let slit_stats = TrialStats::from_outcomes(&slit_outcomes, 2, slit_seed);
    let slit_z = (0..2)
        .map(|j| binomial_z(slit_stats.counts[j], slit_stats.total, slit_born.weights[j]))
        .fold(0.0, f64::max);

    let mut report = ScenarioReport::new("double-slit", seed, cfg);
    report.stat("distance_before_slits", d_before);
    report.stat("distance_after_slits", d_after);
    report.stat("plate_sites_x", sites.iter().map(|&k| grid.node(k)).collect::<Vec<_>>());
    report.stat("plate_window_weight", window_weight);
    report.stat("plate_born_weights", &plate_born.weights);
    report.stat("plate_born_renormalized", plate_born.renormalized);
    report.stat("plate_frequencies", &plate_stats.frequencies);
    report.stat("plate_censored", plate_stats.censored);
    report.stat("density_unimodal", unimodal(&density));
    report.stat("which_slit_born_weights", &slit_born.weights);
    report.stat("which_slit_frequencies", &slit_stats.frequencies);
    report.stat("which_slit_censored", slit_stats.censored);
    if !cfg.single_slit {
        report.checks.push(Check::new(
            "state_moves_away",
            d_after - d_before,
            Comparison::Above,
            cfg.tol_move_away,
            "tol_move_away",
        ));
    }
    report.checks.push(Check::new("plate_max_z", plate_z, Comparison::AtMost, cfg.tol_sigma, "tol_sigma"));
    report.checks.push(Check::new("which_slit_max_z", slit_z, Comparison::AtMost, cfg.tol_sigma, "tol_sigma"));
    report.checks.push(Check::new(
        "censored_fraction",
        plate_stats.censored_fraction().max(slit_stats.censored_fraction()),
        Comparison::Below,
        cfg.tol_censored,
        "tol_censored",
    ));
    report.tables.push(density_table);
    report.tables.push(plate_table);
    let mut slit_table = Table::new("which_slit", &["slit_x", "born_weight", "count", "frequency", "wilson_lo", "wilson_hi"]);
    for (j, x) in [s1, s2].into_iter().enumerate() {
        slit_table.push(vec![
            x,
            slit_born.weights[j],
            slit_stats.counts[j] as f64,
            slit_stats.frequencies[j],
            slit_stats.intervals[j].0,
            slit_stats.intervals[j].1,
        ]);
    }
    report.tables.push(slit_table);
    report.trials = Some(TrialRecord {
        stats: plate_stats,
        outcomes,
    });
    Ok(report)
}
