//! State propagation: exact GUE steps, split-step grid evolution, drift and
//! step-then-project constrained stepping.

use std::fmt;
use std::sync::Arc;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{param_err, Error, Result};
use crate::fourier::{signed_bin, AxisFft};
use crate::gue::GueSampler;
use crate::hilbert::{normalize, tangent_project, Ray, StateVector, TangentVector};
use crate::packets::{project_to_manifold, Grid, ManifoldSpec};

/// Step angles above this are flagged; the walk is meant to be diffusive.
pub const STEP_ANGLE_WARN: f64 = 0.3;

/// Spectral weight allowed within [`EDGE_BINS`] of the band edge.
pub const ALIASING_TOL: f64 = 1e-6;
pub const EDGE_BINS: i64 = 3;

/// A deterministic tangent field: the drift velocity at each ray.
pub trait Drift: Send + Sync {
    /// Tangent vector at `ray` (per unit time); must be orthogonal to the
    /// representative.
    fn velocity(&self, ray: &Ray) -> Result<TangentVector>;
}

/// Drift along the tangent projection of `G ψ` for a fixed matrix `G`,
/// rescaled to constant speed `magnitude`.
#[derive(Debug, Clone)]
pub struct GeneratorDrift {
    generator: DMatrix<Complex64>,
    magnitude: f64,
}

impl GeneratorDrift {
    pub fn new(generator: DMatrix<Complex64>, magnitude: f64) -> Result<Self> {
        if generator.nrows() != generator.ncols() {
            return Err(Error::DimensionMismatch {
                left: generator.nrows(),
                right: generator.ncols(),
            });
        }
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(param_err("drift_magnitude", format!("must be non-negative, got {magnitude}")));
        }
        Ok(Self { generator, magnitude })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }
}

impl Drift for GeneratorDrift {
    fn velocity(&self, ray: &Ray) -> Result<TangentVector> {
        let rep = ray.representative();
        if rep.len() != self.generator.nrows() {
            return Err(Error::DimensionMismatch {
                left: rep.len(),
                right: self.generator.nrows(),
            });
        }
        let v = &self.generator * DVector::from_column_slice(rep.as_slice());
        let raw = StateVector::new(v.as_slice().to_vec())?;
        Ok(tangent_project(ray, &raw)?.with_length(self.magnitude))
    }
}

/// Parameters of one random step.
#[derive(Clone)]
pub struct StepConfig {
    pub dt: f64,
    pub hbar: f64,
    /// Scale used when building samplers for this configuration; the
    /// sampler passed to [`random_step`] carries the authoritative value.
    pub gue_scale: f64,
    pub drift: Option<Arc<dyn Drift>>,
    /// `ψ − i dt H ψ / ħ` followed by renormalization instead of the exact
    /// exponential. For cross-checks only.
    pub first_order: bool,
}

impl fmt::Debug for StepConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StepConfig")
            .field("dt", &self.dt)
            .field("hbar", &self.hbar)
            .field("gue_scale", &self.gue_scale)
            .field("drift", &self.drift.is_some())
            .field("first_order", &self.first_order)
            .finish()
    }
}

impl StepConfig {
    pub fn new(dt: f64, gue_scale: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            hbar: 1.0,
            gue_scale,
            drift: None,
            first_order: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_drift(mut self, drift: Arc<dyn Drift>) -> Self {
        self.drift = Some(drift);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(param_err("dt", format!("must be non-negative, got {}", self.dt)));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(param_err("hbar", format!("must be positive, got {}", self.hbar)));
        }
        if !(self.gue_scale.is_finite() && self.gue_scale > 0.0) {
            return Err(param_err("gue_scale", format!("must be positive, got {}", self.gue_scale)));
        }
        Ok(())
    }

    /// The nominal step angle `s · dt · √N / ħ`.
    pub fn effective_angle(&self, dimension: usize) -> f64 {
        self.gue_scale * self.dt * (dimension as f64).sqrt() / self.hbar
    }

    /// Root-mean-square Fubini-Study step length for small steps,
    /// `s · dt · √(N−1) / ħ`: each of the `N − 1` complex tangent
    /// components carries variance `(s dt / ħ)²`.
    pub fn rms_step_angle(&self, dimension: usize) -> f64 {
        self.gue_scale * self.dt * ((dimension - 1) as f64).sqrt() / self.hbar
    }

    /// Logs a warning when the step is not small.
    pub fn check_angle(&self, dimension: usize) {
        let angle = self.effective_angle(dimension);
        if angle > STEP_ANGLE_WARN {
            warn!("effective step angle {angle:.3} exceeds {STEP_ANGLE_WARN}; the walk is far from diffusive");
        }
    }
}

/// Applies `exp(−i H dt / ħ)` for a fresh draw `H`, then the drift.
pub fn random_step(psi: &StateVector, sampler: &mut GueSampler, cfg: &StepConfig) -> Result<StateVector> {
    if psi.len() != sampler.dimension() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: sampler.dimension(),
        });
    }
    if cfg.dt == 0.0 {
        return Ok(psi.clone());
    }
    let h = sampler.sample();
    let v = DVector::from_column_slice(psi.as_slice());
    let tau = cfg.dt / cfg.hbar;
    let stepped = if cfg.first_order {
        &v - h.entries() * &v * Complex64::new(0.0, tau)
    } else {
        let (vals, vecs) = h.eigen()?;
        let mut coeffs = vecs.adjoint() * &v;
        for (c, lambda) in coeffs.iter_mut().zip(vals.iter()) {
            *c *= Complex64::from_polar(1.0, -lambda * tau);
        }
        vecs * coeffs
    };
    let mut out = normalize(&StateVector::new(stepped.as_slice().to_vec())?)?;
    if let Some(drift) = &cfg.drift {
        let ray = Ray::new(&out)?;
        let t = drift.velocity(&ray)?;
        out = normalize(&out.add_scaled(Complex64::new(cfg.dt, 0.0), &t.direction)?)?;
    }
    Ok(out)
}

/// `Σ_axes p_a² / 2m_a + V(x)` on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridHamiltonian {
    grid: Grid,
    masses: Vec<f64>,
    potential: Vec<f64>,
    hbar: f64,
}

impl GridHamiltonian {
    pub fn new(grid: Grid, mass: f64, potential: Vec<f64>) -> Result<Self> {
        Self::with_masses(grid, vec![mass; grid.dims()], potential)
    }

    /// One mass per axis (e.g. a particle axis and a heavier device axis).
    pub fn with_masses(grid: Grid, masses: Vec<f64>, potential: Vec<f64>) -> Result<Self> {
        if masses.len() != grid.dims() {
            return Err(param_err("mass", format!("need {} masses, got {}", grid.dims(), masses.len())));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(param_err("mass", "masses must be positive"));
        }
        if potential.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: potential.len(),
                right: grid.len(),
            });
        }
        if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
            return Err(param_err("potential", format!("non-finite value at node {i}")));
        }
        Ok(Self {
            grid,
            masses,
            potential,
            hbar: 1.0,
        })
    }

    pub fn free(grid: Grid, mass: f64) -> Result<Self> {
        Self::new(grid, mass, vec![0.0; grid.len()])
    }

    /// Samples `v(x)` at every node (`x` has one coordinate per axis).
    pub fn from_fn(grid: Grid, masses: Vec<f64>, v: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.points();
        let dims = grid.dims();
        let mut x = vec![0.0; dims];
        let potential = (0..grid.len())
            .map(|idx| {
                let mut rest = idx;
                for axis in (0..dims).rev() {
                    x[axis] = grid.node(rest % n);
                    rest /= n;
                }
                v(&x)
            })
            .collect();
        Self::with_masses(grid, masses, potential)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(param_err("hbar", "must be positive"));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// Precomputed Strang split-step propagator for a fixed `dt`.
pub struct GridPropagator {
    grid: Grid,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    edge: Vec<bool>,
    fft: AxisFft,
}

impl GridPropagator {
    pub fn new(h: &GridHamiltonian, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(param_err("dt", format!("must be non-negative, got {dt}")));
        }
        let grid = h.grid;
        let n = grid.points();
        let dims = grid.dims();
        let dk = grid.momentum_spacing();
        let half_potential = h
            .potential
            .iter()
            .map(|&v| Complex64::from_polar(1.0, -v * dt / (2.0 * h.hbar)))
            .collect();
        let band_edge = (n / 2) as i64;
        let mut kinetic = Vec::with_capacity(grid.len());
        let mut edge = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let mut rest = idx;
            let mut energy = 0.0;
            let mut near_edge = false;
            for axis in (0..dims).rev() {
                let bin = signed_bin(rest % n, n);
                rest /= n;
                let k = bin as f64 * dk;
                energy += h.hbar * k * k / (2.0 * h.masses[axis]);
                near_edge |= bin.abs() > band_edge - EDGE_BINS;
            }
            kinetic.push(Complex64::from_polar(1.0, -energy * dt));
            edge.push(near_edge);
        }
        Ok(Self {
            grid,
            half_potential,
            kinetic,
            edge,
            fft: AxisFft::new(n, dims),
        })
    }

    /// One full Strang step in place.
    pub fn step(&mut self, amps: &mut [Complex64]) -> Result<()> {
        if amps.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: self.grid.len(),
            });
        }
        for (a, p) in amps.iter_mut().zip(&self.half_potential) {
            *a *= p;
        }
        self.fft.apply(amps, false);
        let edge_weight: f64 = amps
            .iter()
            .zip(&self.edge)
            .filter(|(_, e)| **e)
            .map(|(a, _)| a.norm_sqr())
            .sum();
        if edge_weight > ALIASING_TOL {
            return Err(Error::Resolution(format!(
                "spectral weight {edge_weight:.3e} within {EDGE_BINS} bins of the band edge"
            )));
        }
        for (a, k) in amps.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.fft.apply(amps, true);
        for (a, p) in amps.iter_mut().zip(&self.half_potential) {
            *a *= p;
        }
        Ok(())
    }

    pub fn run(&mut self, psi: &StateVector, steps: usize) -> Result<StateVector> {
        let mut amps = psi.as_slice().to_vec();
        for _ in 0..steps {
            self.step(&mut amps)?;
        }
        StateVector::new(amps)
    }
}

/// Strang split-step propagation for `steps` steps of length `dt`.
pub fn evolve_grid(psi: &StateVector, h: &GridHamiltonian, dt: f64, steps: usize) -> Result<StateVector> {
    if psi.len() != h.grid.len() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: h.grid.len(),
        });
    }
    GridPropagator::new(h, dt)?.run(psi, steps)
}

/// Step, then project back onto the manifold, warm-started at `warm`.
pub fn constrained_step(
    psi: &StateVector,
    base: impl FnOnce(&StateVector) -> Result<StateVector>,
    spec: &ManifoldSpec,
    warm: &[f64],
) -> Result<(StateVector, Vec<f64>)> {
    let stepped = base(psi)?;
    let proj = project_to_manifold(&stepped, spec, Some(warm))?;
    Ok((proj.member, proj.params))
}
