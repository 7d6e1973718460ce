use serde::{Deserialize, Serialize};

use super::{
    at_least, epsilon_range, grid_keys, positive, probability, within_margin, Check, Comparison, ScenarioReport,
    Table, TrialRecord,
};
use crate::dynamics::StepConfig;
use crate::error::{param_err, Error, Result};
use crate::gue::GueSampler;
use crate::hilbert::{fs_distance, kron, Ray, StateVector};
use crate::measure::{parallel_trials, run_walk_with_state, DetectorSet, Outcome, TrialStats, WalkOutcome};
use crate::packets::{make_position_packet, momentum_member, project_to_manifold, Grid, ManifoldKind, ManifoldSpec};
use crate::rng::derive_seed;
use crate::subspace::Subspace;

/// A pair with definite positions `a` and `a + Δ`, compared against the
/// position- and momentum-product manifolds, then measured by a walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EprConfig {
    pub points: usize,
    pub axis_min: f64,
    pub axis_max: f64,
    pub sigma: f64,
    pub a: f64,
    pub separation: f64,
    /// Samples per factor of each manifold.
    pub samples: usize,
    pub joint_budget: usize,
    pub epsilon: f64,
    pub dt: f64,
    pub gue_scale: f64,
    pub max_steps: u64,
    pub trials: u64,
    /// Lower bound on the distance to the momentum-product manifold.
    pub tol_momentum_distance: f64,
    /// Upper bound on the projection distance of `φ` to the position
    /// manifold.
    pub tol_position_distance: f64,
    /// Required fraction of hit states within `epsilon` of the position
    /// manifold.
    pub tol_landing: f64,
    pub tol_censored: f64,
}

impl Default for EprConfig {
    fn default() -> Self {
        Self {
            points: 64,
            axis_min: -8.0,
            axis_max: 8.0,
            sigma: 0.5,
            a: -3.0,
            separation: 6.0,
            samples: 32,
            joint_budget: 4096,
            epsilon: 0.2,
            dt: 0.134,
            gue_scale: 1.0,
            max_steps: 1_000_000,
            trials: 1000,
            tol_momentum_distance: 1.4,
            tol_position_distance: 1e-6,
            tol_landing: 0.99,
            tol_censored: 0.01,
        }
    }
}

impl EprConfig {
    pub fn validate(&self) -> Result<()> {
        grid_keys(self.points, self.axis_min, self.axis_max)?;
        let joint = self.points * self.points;
        if joint > self.joint_budget {
            return Err(Error::Budget {
                requested: joint,
                budget: self.joint_budget,
            });
        }
        positive("sigma", self.sigma)?;
        within_margin("a", self.a, self.axis_min, self.axis_max, self.sigma)?;
        positive("separation", self.separation)?;
        within_margin("separation", self.a + self.separation, self.axis_min, self.axis_max, self.sigma)?;
        if self.separation < 6.0 * self.sigma {
            return Err(param_err("separation", "the two particles must be at least 6σ apart"));
        }
        at_least("samples", self.samples as u64, 2)?;
        epsilon_range(self.epsilon)?;
        positive("dt", self.dt)?;
        positive("gue_scale", self.gue_scale)?;
        at_least("max_steps", self.max_steps, 1)?;
        at_least("trials", self.trials, 1)?;
        positive("tol_momentum_distance", self.tol_momentum_distance)?;
        positive("tol_position_distance", self.tol_position_distance)?;
        probability("tol_landing", self.tol_landing)?;
        probability("tol_censored", self.tol_censored)?;
        let grid = Grid::line(self.points, self.axis_min, self.axis_max)?;
        let (b_lo, b_hi) = momentum_window(&grid, self.sigma);
        if b_hi <= b_lo {
            return Err(param_err("sigma", "momentum spectrum wider than the band limit"));
        }
        Ok(())
    }
}

/// Mean momenta whose spectrum keeps the support margin inside the
/// (asymmetric) centered momentum lattice.
fn momentum_window(grid: &Grid, sigma: f64) -> (f64, f64) {
    let b = grid.band_limit();
    (-b + 5.0 * sigma, b - grid.momentum_spacing() - 5.0 * sigma)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Minimum distance of `phi` to `family(u) ⊗ family(v)` over the sample
/// lattice; returns the distance and the best pair.
fn sampled_min(phi: &Ray, members: &[StateVector], params: &[f64]) -> Result<(f64, [f64; 2])> {
    let mut best = (f64::INFINITY, [0.0; 2]);
    for (i, u) in members.iter().enumerate() {
        for (j, v) in members.iter().enumerate() {
            let d = fs_distance(phi, &Ray::new(&kron(u, v))?)?;
            if d < best.0 {
                best = (d, [params[i], params[j]]);
            }
        }
    }
    Ok(best)
}

pub fn epr_run(cfg: &EprConfig, seed: u64) -> Result<ScenarioReport> {
    cfg.validate()?;
    let grid = Grid::line(cfg.points, cfg.axis_min, cfg.axis_max)?;
    let pos = ManifoldSpec::new(ManifoldKind::Position, grid, cfg.sigma, 2)?;
    let mom = ManifoldSpec::new(ManifoldKind::Momentum, grid, cfg.sigma, 2)?;
    let centers = [cfg.a, cfg.a + cfg.separation];
    let phi = pos.member(&centers)?;
    let phi_ray = Ray::new(&phi)?;

    // Position-product samples over the support window.
    let (lo, hi) = grid.support_window(cfg.sigma);
    let a_samples = linspace(lo, hi, cfg.samples);
    let pos_members = a_samples
        .iter()
        .map(|&a| make_position_packet(&grid, &[a], cfg.sigma))
        .collect::<Result<Vec<_>>>()?;
    let (pos_sampled, _) = sampled_min(&phi_ray, &pos_members, &a_samples)?;
    let pos_proj = project_to_manifold(&phi, &pos, None)?;

    // Momentum-product samples inside the usable band.
    let (b_lo, b_hi) = momentum_window(&grid, cfg.sigma);
    let b_samples = linspace(b_lo, b_hi, cfg.samples);
    let mom_members = b_samples
        .iter()
        .map(|&b| momentum_member(&grid, &[b], cfg.sigma))
        .collect::<Result<Vec<_>>>()?;
    let (mom_sampled, mom_best) = sampled_min(&phi_ray, &mom_members, &b_samples)?;
    let mom_proj = project_to_manifold(&phi, &mom, Some(&mom_best))?;
    let mom_distance = mom_sampled.min(mom_proj.distance);

    // Position measurement, starting from the nearest momentum-product
    // member, inside span{start, ω(s₁) ⊗ ω(s₂)}.
    let start = if mom_proj.distance <= mom_sampled {
        mom_proj.member.clone()
    } else {
        mom.member(&mom_best)?
    };
    let detector_params: Vec<[f64; 2]> = centers
        .iter()
        .flat_map(|&s1| centers.iter().map(move |&s2| [s1, s2]))
        .collect();
    let mut spanning = vec![start.clone()];
    for p in &detector_params {
        spanning.push(pos.member(p)?);
    }
    let sub = Subspace::span(&spanning)?;
    let targets = spanning[1..]
        .iter()
        .map(|v| Ray::new(&sub.coords(v)?))
        .collect::<Result<Vec<_>>>()?;
    let detectors = DetectorSet::new(targets, cfg.epsilon)?;
    let psi0 = Ray::new(&sub.coords(&start)?)?;
    let step = StepConfig::new(cfg.dt, cfg.gue_scale)?;
    step.validate()?;
    step.check_angle(sub.dim());
    let walk_seed = derive_seed(seed, 0);
    let results: Vec<(WalkOutcome, Option<f64>)> = parallel_trials(cfg.trials, walk_seed, |_, s| {
        let mut sampler = GueSampler::new(sub.dim(), cfg.gue_scale, s)?;
        let (out, state) = run_walk_with_state(&psi0, &detectors, &step, &mut sampler, cfg.max_steps)?;
        let landing = match out.result {
            Outcome::Hit(k) => {
                let lifted = sub.lift(&state)?;
                Some(project_to_manifold(&lifted, &pos, Some(&detector_params[k]))?.distance)
            }
            Outcome::Censored => None,
        };
        Ok((out, landing))
    })?;
    let outcomes: Vec<WalkOutcome> = results.iter().map(|r| r.0).collect();
    let stats = TrialStats::from_outcomes(&outcomes, detectors.len(), walk_seed);
    let landings: Vec<f64> = results.iter().filter_map(|r| r.1).collect();
    let landed = landings.iter().filter(|&&d| d <= cfg.epsilon).count();
    let landing_fraction = if landings.is_empty() {
        0.0
    } else {
        landed as f64 / landings.len() as f64
    };

    let mut table = Table::new("detectors", &["s1", "s2", "count", "frequency", "wilson_lo", "wilson_hi"]);
    for (k, p) in detector_params.iter().enumerate() {
        table.push(vec![
            p[0],
            p[1],
            stats.counts[k] as f64,
            stats.frequencies[k],
            stats.intervals[k].0,
            stats.intervals[k].1,
        ]);
    }

    let mut report = ScenarioReport::new("epr", seed, cfg);
    report.stat("position_min_sampled_distance", pos_sampled);
    report.stat("position_projection_distance", pos_proj.distance);
    report.stat("momentum_min_sampled_distance", mom_sampled);
    report.stat("momentum_refined_distance", mom_proj.distance);
    report.stat("momentum_refined_params", &mom_proj.params);
    report.stat("momentum_distance_upper_bound", mom_distance);
    report.stat("walk_dimension", sub.dim());
    report.stat("frequencies", &stats.frequencies);
    report.stat("censored", stats.censored);
    report.stat("mean_steps_to_hit", stats.mean_steps_to_hit);
    report.stat("hit_trials", landings.len());
    report.stat("landed_within_epsilon", landed);
    report.stat("max_landing_distance", landings.iter().copied().fold(0.0, f64::max));
    report.checks.push(Check::new(
        "position_product_distance",
        pos_proj.distance,
        Comparison::Below,
        cfg.tol_position_distance,
        "tol_position_distance",
    ));
    report.checks.push(Check::new(
        "momentum_product_distance",
        mom_distance,
        Comparison::Above,
        cfg.tol_momentum_distance,
        "tol_momentum_distance",
    ));
    report.checks.push(Check::new(
        "landing_fraction",
        landing_fraction,
        Comparison::AtLeast,
        cfg.tol_landing,
        "tol_landing",
    ));
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
