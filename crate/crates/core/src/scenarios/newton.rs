use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{at_least, finite, grid_keys, positive, within_margin, Check, Comparison, ScenarioReport, Table};
use crate::dynamics::{GridHamiltonian, GridPropagator};
use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::packets::{project_to_manifold, Grid, ManifoldKind, ManifoldSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Free,
    /// `V(x) = −f x`.
    Uniform,
    /// `V(x) = m ω² x² / 2`.
    Harmonic,
}

/// Phase-space-constrained packet dynamics against Newton's equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    pub points: usize,
    pub axis_min: f64,
    pub axis_max: f64,
    pub sigma: f64,
    pub mass: f64,
    pub potential: Potential,
    pub omega: f64,
    pub force: f64,
    pub a0: f64,
    pub p0: f64,
    pub duration: f64,
    pub steps: u64,
    pub tol_trajectory: f64,
    pub tol_momentum: f64,
    pub tol_energy: f64,
    /// Allowed wandering of a packet at rest, in grid spacings.
    pub tol_rest: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            points: 256,
            axis_min: -20.0,
            axis_max: 20.0,
            sigma: 1.0,
            mass: 1.0,
            potential: Potential::Harmonic,
            omega: 1.0,
            force: 0.5,
            a0: 3.0,
            p0: 0.0,
            duration: TAU,
            steps: 1000,
            tol_trajectory: 0.01,
            tol_momentum: 0.01,
            tol_energy: 0.01,
            tol_rest: 1.0,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        grid_keys(self.points, self.axis_min, self.axis_max)?;
        positive("sigma", self.sigma)?;
        positive("mass", self.mass)?;
        positive("omega", self.omega)?;
        finite("force", self.force)?;
        within_margin("a0", self.a0, self.axis_min, self.axis_max, self.sigma)?;
        finite("p0", self.p0)?;
        positive("duration", self.duration)?;
        at_least("steps", self.steps, 1)?;
        positive("tol_trajectory", self.tol_trajectory)?;
        positive("tol_momentum", self.tol_momentum)?;
        positive("tol_energy", self.tol_energy)?;
        positive("tol_rest", self.tol_rest)?;
        Ok(())
    }

    fn potential_at(&self, x: f64) -> f64 {
        match self.potential {
            Potential::Free => 0.0,
            Potential::Uniform => -self.force * x,
            Potential::Harmonic => 0.5 * self.mass * self.omega * self.omega * x * x,
        }
    }

    fn force_at(&self, x: f64) -> f64 {
        match self.potential {
            Potential::Free => 0.0,
            Potential::Uniform => self.force,
            Potential::Harmonic => -self.mass * self.omega * self.omega * x,
        }
    }

    fn energy(&self, a: f64, p: f64) -> f64 {
        p * p / (2.0 * self.mass) + self.potential_at(a)
    }
}

/// Classical RK4 over one interval `h`, split into `sub` substeps.
fn rk4(cfg: &NewtonConfig, mut a: f64, mut p: f64, h: f64, sub: usize) -> (f64, f64) {
    let dt = h / sub as f64;
    let m = cfg.mass;
    for _ in 0..sub {
        let (k1a, k1p) = (p / m, cfg.force_at(a));
        let (k2a, k2p) = ((p + 0.5 * dt * k1p) / m, cfg.force_at(a + 0.5 * dt * k1a));
        let (k3a, k3p) = ((p + 0.5 * dt * k2p) / m, cfg.force_at(a + 0.5 * dt * k2a));
        let (k4a, k4p) = ((p + dt * k3p) / m, cfg.force_at(a + dt * k3a));
        a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    (a, p)
}

pub fn newtonian_equivalence_run(cfg: &NewtonConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let grid = Grid::line(cfg.points, cfg.axis_min, cfg.axis_max)?;
    let spec = ManifoldSpec::new(ManifoldKind::PhaseSpace, grid, cfg.sigma, 1)?;
    let h = GridHamiltonian::from_fn(grid, vec![cfg.mass], |x| cfg.potential_at(x[0]))?;
    let dt = cfg.duration / cfg.steps as f64;
    let mut prop = GridPropagator::new(&h, dt)?;

    let mut params = vec![cfg.a0, cfg.p0];
    let mut psi = spec.member(&params)?;
    let (mut a_cl, mut p_cl) = (cfg.a0, cfg.p0);
    let mut table = Table::new("trajectory", &["t", "a", "p", "a_newton", "p_newton", "energy"]);
    table.push(vec![0.0, cfg.a0, cfg.p0, a_cl, p_cl, cfg.energy(cfg.a0, cfg.p0)]);
    let mut max_iterations = 0;
    for k in 1..=cfg.steps {
        let mut amps = psi.into_vec();
        prop.step(&mut amps)?;
        let stepped = StateVector::new(amps)?;
        let proj = project_to_manifold(&stepped, &spec, Some(&params))?;
        max_iterations = max_iterations.max(proj.iterations);
        params = proj.params;
        psi = proj.member;
        if !grid.in_support(params[0], cfg.sigma) {
            return Err(Error::SupportMargin {
                position: vec![params[0]],
            });
        }
        (a_cl, p_cl) = rk4(cfg, a_cl, p_cl, dt, 10);
        table.push(vec![k as f64 * dt, params[0], params[1], a_cl, p_cl, cfg.energy(params[0], params[1])]);
    }

    let a = table.column("a").expect("column");
    let p = table.column("p").expect("column");
    let a_n = table.column("a_newton").expect("column");
    let p_n = table.column("p_newton").expect("column");
    let energy = table.column("energy").expect("column");
    let max_diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    let a_err = max_diff(&a, &a_n);
    let p_err = max_diff(&p, &p_n);
    let p_scale = p_n.iter().map(|v| v.abs()).fold(0.0, f64::max);

    let mut report = ScenarioReport::new("newton", 0, cfg);
    report.stat("max_position_error", a_err);
    report.stat("max_momentum_error", p_err);
    report.stat("max_projection_iterations", max_iterations);
    report.stat("final_quantum", [a[a.len() - 1], p[p.len() - 1]]);
    report.stat("final_newton", [a_cl, p_cl]);
    match cfg.potential {
        Potential::Harmonic => {
            let amplitude = (cfg.a0.powi(2) + (cfg.p0 / (cfg.mass * cfg.omega)).powi(2)).sqrt();
            let periods = cfg.duration * cfg.omega / TAU;
            let e0 = energy[0];
            let drift = energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs();
            report.stat("relative_trajectory_error", a_err / amplitude);
            report.stat("energy_drift_per_period", drift / periods.max(1.0));
            report.checks.push(Check::new(
                "harmonic_trajectory",
                a_err / amplitude,
                Comparison::Below,
                cfg.tol_trajectory,
                "tol_trajectory",
            ));
            report.checks.push(Check::new(
                "energy_drift_per_period",
                drift / periods.max(1.0),
                Comparison::Below,
                cfg.tol_energy,
                "tol_energy",
            ));
        }
        Potential::Uniform => {
            // p(t) = p0 + f t exactly.
            let exact_err = table
                .rows
                .iter()
                .map(|r| (r[2] - (cfg.p0 + cfg.force * r[0])).abs())
                .fold(0.0, f64::max);
            let rel = exact_err / p_scale.max(f64::MIN_POSITIVE);
            report.stat("relative_momentum_error", rel);
            report.checks.push(Check::new("uniform_force_momentum", rel, Comparison::Below, cfg.tol_momentum, "tol_momentum"));
            let disp = a_n.iter().map(|x| (x - cfg.a0).abs()).fold(0.0, f64::max);
            let rel_a = a_err / disp.max(grid.spacing());
            report.stat("relative_trajectory_error", rel_a);
            report.checks.push(Check::new("uniform_force_trajectory", rel_a, Comparison::Below, cfg.tol_trajectory, "tol_trajectory"));
        }
        Potential::Free => {
            if cfg.p0 == 0.0 {
                let wander = a.iter().map(|x| (x - cfg.a0).abs()).fold(0.0, f64::max) / grid.spacing();
                report.stat("rest_wander_in_spacings", wander);
                report.checks.push(Check::new("at_rest", wander, Comparison::AtMost, cfg.tol_rest, "tol_rest"));
            } else {
                let disp = (cfg.p0 / cfg.mass * cfg.duration).abs();
                let rel_a = a_err / disp;
                report.stat("relative_trajectory_error", rel_a);
                report.checks.push(Check::new("free_trajectory", rel_a, Comparison::Below, cfg.tol_trajectory, "tol_trajectory"));
            }
        }
    }
    report.tables.push(table);
    Ok(report)
}
