use serde::{Deserialize, Serialize};

use super::{at_least, grid_keys, non_negative, positive, within_margin, Check, Comparison, ScenarioReport, Table};
use crate::dynamics::{GridHamiltonian, GridPropagator};
use crate::error::{param_err, Result};
use crate::hilbert::{fs_distance, Ray, StateVector};
use crate::packets::{make_position_packet, position_moments, Grid};

/// Free spreading of a packet released at `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxEscapeConfig {
    pub points: usize,
    pub axis_min: f64,
    pub axis_max: f64,
    pub sigma: f64,
    pub center: f64,
    /// Offset of the far reference packet `ω(b)`, in units of `sigma`.
    pub far_offset: f64,
    pub mass: f64,
    pub duration: f64,
    pub steps: u64,
    pub record_every: u64,
    pub tol_monotone: f64,
    pub tol_spreading: f64,
    /// Minimum required drop of the distance to the far packet.
    pub tol_far_decrease: f64,
}

impl Default for BoxEscapeConfig {
    fn default() -> Self {
        Self {
            points: 512,
            axis_min: -40.0,
            axis_max: 40.0,
            sigma: 1.0,
            center: 0.0,
            far_offset: 10.0,
            mass: 1.0,
            duration: 10.0,
            steps: 1000,
            record_every: 10,
            tol_monotone: 1e-6,
            tol_spreading: 1e-3,
            tol_far_decrease: 0.0,
        }
    }
}

impl BoxEscapeConfig {
    pub fn validate(&self) -> Result<()> {
        grid_keys(self.points, self.axis_min, self.axis_max)?;
        positive("sigma", self.sigma)?;
        within_margin("center", self.center, self.axis_min, self.axis_max, self.sigma)?;
        positive("far_offset", self.far_offset)?;
        within_margin("far_offset", self.far_position(), self.axis_min, self.axis_max, self.sigma)?;
        positive("mass", self.mass)?;
        positive("duration", self.duration)?;
        at_least("steps", self.steps, 1)?;
        at_least("record_every", self.record_every, 1)?;
        non_negative("tol_monotone", self.tol_monotone)?;
        positive("tol_spreading", self.tol_spreading)?;
        non_negative("tol_far_decrease", self.tol_far_decrease)?;
        Ok(())
    }

    fn far_position(&self) -> f64 {
        self.center + self.far_offset * self.sigma
    }
}

/// `σ²(1 + (t / 2mσ²)²)`.
pub fn free_variance(sigma: f64, mass: f64, t: f64) -> f64 {
    sigma * sigma * (1.0 + (t / (2.0 * mass * sigma * sigma)).powi(2))
}

pub fn box_escape_run(cfg: &BoxEscapeConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let grid = Grid::line(cfg.points, cfg.axis_min, cfg.axis_max)?;
    let omega_a = make_position_packet(&grid, &[cfg.center], cfg.sigma)?;
    let omega_b = make_position_packet(&grid, &[cfg.far_position()], cfg.sigma)?;
    let ray_a = Ray::new(&omega_a)?;
    let ray_b = Ray::new(&omega_b)?;
    let h = GridHamiltonian::free(grid, cfg.mass)?;
    let dt = cfg.duration / cfg.steps as f64;
    let mut prop = GridPropagator::new(&h, dt)?;

    let mut table = Table::new(
        "distances",
        &["t", "distance_to_start", "distance_to_far", "variance", "analytic_variance"],
    );
    let mut amps = omega_a.as_slice().to_vec();
    let record = |k: u64, amps: &[num_complex::Complex64], table: &mut Table| -> Result<()> {
        let psi = StateVector::new(amps.to_vec())?;
        let ray = Ray::new(&psi)?;
        let (_, var) = position_moments(&grid, &psi)?;
        let t = k as f64 * dt;
        table.push(vec![
            t,
            fs_distance(&ray, &ray_a)?,
            fs_distance(&ray, &ray_b)?,
            var[0],
            free_variance(cfg.sigma, cfg.mass, t),
        ]);
        Ok(())
    };
    record(0, &amps, &mut table)?;
    for k in 1..=cfg.steps {
        prop.step(&mut amps)?;
        if k % cfg.record_every == 0 || k == cfg.steps {
            record(k, &amps, &mut table)?;
        }
    }
    let final_norm = StateVector::new(amps)?.norm();
    if table.rows.len() < 2 {
        return Err(param_err("record_every", "need at least two recorded times"));
    }

    let d_a = table.column("distance_to_start").expect("column");
    let d_b = table.column("distance_to_far").expect("column");
    let var = table.column("variance").expect("column");
    let var_exact = table.column("analytic_variance").expect("column");
    let worst_drop = d_a.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    let spreading_err = var
        .iter()
        .zip(&var_exact)
        .map(|(v, e)| (v / e - 1.0).abs())
        .fold(0.0, f64::max);

    let mut report = ScenarioReport::new("box-escape", 0, cfg);
    report.stat("initial_distance_to_start", d_a[0]);
    report.stat("final_distance_to_start", *d_a.last().expect("rows"));
    report.stat("initial_distance_to_far", d_b[0]);
    report.stat("final_distance_to_far", *d_b.last().expect("rows"));
    report.stat("max_relative_variance_error", spreading_err);
    report.stat("norm_drift", (final_norm - 1.0).abs());
    report.checks.push(Check::new("start_distance_zero", d_a[0], Comparison::AtMost, cfg.tol_monotone, "tol_monotone"));
    report.checks.push(Check::new(
        "distance_to_start_nondecreasing",
        worst_drop,
        Comparison::AtMost,
        cfg.tol_monotone,
        "tol_monotone",
    ));
    report.checks.push(Check::new(
        "distance_to_far_decreased",
        d_b[0] - *d_b.last().expect("rows"),
        Comparison::Above,
        cfg.tol_far_decrease,
        "tol_far_decrease",
    ));
    report.checks.push(Check::new(
        "spreading_law",
        spreading_err,
        Comparison::Below,
        cfg.tol_spreading,
        "tol_spreading",
    ));
    report.tables.push(table);
    Ok(report)
}
