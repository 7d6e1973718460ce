use serde::{Deserialize, Serialize};

use super::{at_least, finite, grid_keys, positive, within_margin, Check, Comparison, ScenarioReport, Table};
use crate::dynamics::{GridHamiltonian, GridPropagator};
use crate::error::{param_err, Error, Result};
use crate::hilbert::{kron, normalize, schmidt_entropy, StateVector};
use crate::packets::{make_position_packet, project_last_factor, Grid, ManifoldKind, ManifoldSpec};

/// Particle in a two-packet superposition coupled to a device packet via
/// `λ x_particle x_device`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatConfig {
    pub points: usize,
    pub axis_min: f64,
    pub axis_max: f64,
    pub particle_sigma: f64,
    pub particle_separation: f64,
    pub device_sigma: f64,
    pub device_center: f64,
    pub particle_mass: f64,
    pub device_mass: f64,
    pub coupling: f64,
    pub duration: f64,
    pub steps: u64,
    pub record_every: u64,
    pub joint_budget: usize,
    pub tol_constrained: f64,
    pub tol_unconstrained: f64,
    pub tol_zero_coupling: f64,
}

impl Default for CatConfig {
    fn default() -> Self {
        Self {
            points: 64,
            axis_min: -16.0,
            axis_max: 16.0,
            particle_sigma: 1.0,
            particle_separation: 8.0,
            device_sigma: 1.0,
            device_center: 0.0,
            particle_mass: 1.0,
            device_mass: 1.0,
            coupling: 0.25,
            duration: 2.0,
            steps: 400,
            record_every: 10,
            joint_budget: 4096,
            tol_constrained: 0.01,
            tol_unconstrained: 0.1,
            tol_zero_coupling: 1e-10,
        }
    }
}

impl CatConfig {
    pub fn validate(&self) -> Result<()> {
        grid_keys(self.points, self.axis_min, self.axis_max)?;
        let joint = self.points * self.points;
        if joint > self.joint_budget {
            return Err(Error::Budget {
                requested: joint,
                budget: self.joint_budget,
            });
        }
        positive("particle_sigma", self.particle_sigma)?;
        positive("particle_separation", self.particle_separation)?;
        if self.particle_separation < 6.0 * self.particle_sigma {
            return Err(param_err("particle_separation", "packets must be at least 6σ apart"));
        }
        let half = self.particle_separation / 2.0;
        within_margin("particle_separation", half, self.axis_min, self.axis_max, self.particle_sigma)?;
        within_margin("particle_separation", -half, self.axis_min, self.axis_max, self.particle_sigma)?;
        positive("device_sigma", self.device_sigma)?;
        within_margin("device_center", self.device_center, self.axis_min, self.axis_max, self.device_sigma)?;
        positive("particle_mass", self.particle_mass)?;
        positive("device_mass", self.device_mass)?;
        finite("coupling", self.coupling)?;
        positive("duration", self.duration)?;
        at_least("steps", self.steps, 1)?;
        at_least("record_every", self.record_every, 1)?;
        positive("tol_constrained", self.tol_constrained)?;
        positive("tol_unconstrained", self.tol_unconstrained)?;
        positive("tol_zero_coupling", self.tol_zero_coupling)?;
        Ok(())
    }
}

struct Series {
    /// Entropy after every step (before projection in constrained mode).
    entropy: Vec<f64>,
    device_position: Vec<f64>,
}

fn run_mode(cfg: &CatConfig, grid: &Grid, coupling: f64, constrained: bool) -> Result<Series> {
    let n = cfg.points;
    let axis = grid.axis();
    let half = cfg.particle_separation / 2.0;
    let left = make_position_packet(&axis, &[-half], cfg.particle_sigma)?;
    let right = make_position_packet(&axis, &[half], cfg.particle_sigma)?;
    let particle = normalize(&left.add_scaled(num_complex::Complex64::new(1.0, 0.0), &right)?)?;
    let device = make_position_packet(&axis, &[cfg.device_center], cfg.device_sigma)?;
    let h = GridHamiltonian::from_fn(*grid, vec![cfg.particle_mass, cfg.device_mass], |x| coupling * x[0] * x[1])?;
    let dt = cfg.duration / cfg.steps as f64;
    let mut prop = GridPropagator::new(&h, dt)?;
    let dev_spec = ManifoldSpec::new(ManifoldKind::Position, axis, cfg.device_sigma, 1)?;

    let mut psi = kron(&particle, &device);
    let mut warm = vec![cfg.device_center];
    let mut series = Series {
        entropy: vec![schmidt_entropy(&psi, n, n)?],
        device_position: vec![cfg.device_center],
    };
    for _ in 0..cfg.steps {
        let mut amps = psi.into_vec();
        prop.step(&mut amps)?;
        psi = StateVector::new(amps)?;
        series.entropy.push(schmidt_entropy(&psi, n, n)?);
        if constrained {
            let proj = project_last_factor(&psi, &dev_spec, Some(&warm))?;
            warm = proj.params;
            psi = proj.product;
            series.device_position.push(warm[0]);
        } else {
            series.device_position.push(f64::NAN);
        }
    }
    Ok(series)
}

pub fn product_persistence_run(cfg: &CatConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let grid = Grid::new(cfg.points, cfg.axis_min, cfg.axis_max, 2)?;
    let free = run_mode(cfg, &grid, cfg.coupling, false)?;
    let constrained = run_mode(cfg, &grid, cfg.coupling, true)?;
    let free0 = run_mode(cfg, &grid, 0.0, false)?;
    let constrained0 = run_mode(cfg, &grid, 0.0, true)?;

    let dt = cfg.duration / cfg.steps as f64;
    let mut table = Table::new(
        "entropy",
        &[
            "t",
            "entropy_unconstrained",
            "entropy_constrained",
            "device_position",
            "entropy_unconstrained_zero_coupling",
            "entropy_constrained_zero_coupling",
        ],
    );
    for k in 0..=cfg.steps as usize {
        if k % cfg.record_every as usize == 0 || k == cfg.steps as usize {
            table.push(vec![
                k as f64 * dt,
                free.entropy[k],
                constrained.entropy[k],
                constrained.device_position[k],
                free0.entropy[k],
                constrained0.entropy[k],
            ]);
        }
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let zero_max = max(&free0.entropy).max(max(&constrained0.entropy));

    let mut report = ScenarioReport::new("cat", 0, cfg);
    report.stat("max_entropy_unconstrained", max(&free.entropy));
    report.stat("max_entropy_constrained", max(&constrained.entropy));
    report.stat("max_entropy_zero_coupling", zero_max);
    report.stat("final_device_position", *constrained.device_position.last().expect("steps"));
    report.checks.push(Check::new(
        "unconstrained_entangles",
        max(&free.entropy),
        Comparison::Above,
        cfg.tol_unconstrained,
        "tol_unconstrained",
    ));
    report.checks.push(Check::new(
        "constrained_stays_product",
        max(&constrained.entropy),
        Comparison::Below,
        cfg.tol_constrained,
        "tol_constrained",
    ));
    report.checks.push(Check::new(
        "zero_coupling_product",
        zero_max,
        Comparison::Below,
        cfg.tol_zero_coupling,
        "tol_zero_coupling",
    ));
    report.tables.push(table);
    Ok(report)
}
