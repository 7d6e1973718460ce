use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{axis_momentum_spectrum, axis_packet, check_sigma, Grid};
use crate::error::{param_err, Error, Result};
use crate::fourier::centered_inverse;
use crate::hilbert::{kron, normalize, StateVector};

/// Which packet family a manifold is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    /// `ω(a)`: position packets at rest.
    Position,
    /// `Ω(a, p)`: position packets with a momentum phase.
    PhaseSpace,
    /// Fourier images of position packets, parameterized by mean momentum.
    Momentum,
}

/// A packet manifold over `factors` copies of `grid`.
///
/// Every axis of every factor is one *mode*; mode `m` covers axis
/// `m % dims` of factor `m / dims`, and the joint amplitude array is the
/// Kronecker product of the per-mode vectors in mode order.
///
/// Parameter layout: one center per mode for `Position`, one mean momentum
/// per mode for `Momentum`, and all centers followed by all momenta for
/// `PhaseSpace`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub grid: Grid,
    pub sigma: f64,
    pub factors: usize,
}

impl ManifoldSpec {
    pub fn new(kind: ManifoldKind, grid: Grid, sigma: f64, factors: usize) -> Result<Self> {
        check_sigma(sigma)?;
        if factors == 0 {
            return Err(param_err("factors", "need at least one factor"));
        }
        Ok(Self {
            kind,
            grid,
            sigma,
            factors,
        })
    }

    pub fn modes(&self) -> usize {
        self.factors * self.grid.dims()
    }

    pub fn param_len(&self) -> usize {
        match self.kind {
            ManifoldKind::PhaseSpace => 2 * self.modes(),
            _ => self.modes(),
        }
    }

    pub fn joint_dim(&self) -> usize {
        self.grid.len().pow(self.factors as u32)
    }

    /// Global parameter indices owned by mode `m`.
    pub(crate) fn local_indices(&self, m: usize) -> Vec<usize> {
        match self.kind {
            ManifoldKind::PhaseSpace => vec![m, self.modes() + m],
            _ => vec![m],
        }
    }

    /// Size of one step "of natural length" per parameter: the packet width
    /// for positions, the momentum spread for phases, the spectral width for
    /// momentum members.
    pub(crate) fn natural_scales(&self) -> Vec<f64> {
        let m = self.modes();
        match self.kind {
            ManifoldKind::Position | ManifoldKind::Momentum => vec![self.sigma; m],
            ManifoldKind::PhaseSpace => {
                let mut s = vec![self.sigma; m];
                s.extend(std::iter::repeat_n(0.5 / self.sigma, m));
                s
            }
        }
    }

    /// Grid resolution per parameter, the yardstick for convergence.
    pub(crate) fn resolution(&self) -> Vec<f64> {
        let m = self.modes();
        let dx = self.grid.spacing();
        let dk = self.grid.momentum_spacing();
        match self.kind {
            ManifoldKind::Position => vec![dx; m],
            ManifoldKind::Momentum => vec![dk; m],
            ManifoldKind::PhaseSpace => {
                let mut s = vec![dx; m];
                s.extend(std::iter::repeat_n(dk, m));
                s
            }
        }
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_len() {
            return Err(Error::DimensionMismatch {
                left: params.len(),
                right: self.param_len(),
            });
        }
        if params.iter().any(|x| !x.is_finite()) {
            return Err(param_err("params", "manifold coordinates must be finite"));
        }
        Ok(())
    }

    /// The raw, unnormalized vector of mode `m` together with its first and
    /// second parameter derivatives (`d[l]`, `dd[l][l']` over local indices).
    pub(crate) fn mode_jet(&self, m: usize, params: &[f64]) -> ModeJet {
        let grid = self.grid.axis();
        let s2 = self.sigma * self.sigma;
        match self.kind {
            ManifoldKind::Position | ManifoldKind::PhaseSpace => {
                let a = params[m];
                let p = if self.kind == ManifoldKind::PhaseSpace {
                    params[self.modes() + m]
                } else {
                    0.0
                };
                let v = axis_packet(&grid, a, p, self.sigma);
                let x = grid.axis_nodes();
                let da: Vec<Complex64> = v.iter().zip(&x).map(|(v, &x)| v * ((x - a) / (2.0 * s2))).collect();
                let daa: Vec<Complex64> = v
                    .iter()
                    .zip(&x)
                    .map(|(v, &x)| v * ((x - a).powi(2) / (4.0 * s2 * s2) - 0.5 / s2))
                    .collect();
                if self.kind == ManifoldKind::Position {
                    return ModeJet {
                        v,
                        d: vec![da],
                        dd: vec![vec![daa]],
                    };
                }
                let i = Complex64::i();
                let dp: Vec<Complex64> = v.iter().zip(&x).map(|(v, &x)| v * i * x).collect();
                let dap: Vec<Complex64> = da.iter().zip(&x).map(|(v, &x)| v * i * x).collect();
                let dpp: Vec<Complex64> = v.iter().zip(&x).map(|(v, &x)| -v * x * x).collect();
                ModeJet {
                    v,
                    d: vec![da, dp],
                    dd: vec![vec![daa, dap.clone()], vec![dap, dpp]],
                }
            }
            ManifoldKind::Momentum => {
                let b = params[m];
                let s = axis_momentum_spectrum(&grid, b, self.sigma);
                let k = grid.momentum_nodes();
                let ds: Vec<Complex64> = s.iter().zip(&k).map(|(s, &k)| s * ((k - b) / (2.0 * s2))).collect();
                let dds: Vec<Complex64> = s
                    .iter()
                    .zip(&k)
                    .map(|(s, &k)| s * ((k - b).powi(2) / (4.0 * s2 * s2) - 0.5 / s2))
                    .collect();
                ModeJet {
                    v: centered_inverse(&s),
                    d: vec![centered_inverse(&ds)],
                    dd: vec![vec![centered_inverse(&dds)]],
                }
            }
        }
    }

    /// Normalized member without the grid-support check.
    pub(crate) fn member_unchecked(&self, params: &[f64]) -> Result<StateVector> {
        let mut out: Option<StateVector> = None;
        for m in 0..self.modes() {
            let v = StateVector::new(self.mode_jet(m, params).v)?;
            out = Some(match out {
                None => v,
                Some(acc) => kron(&acc, &v),
            });
        }
        normalize(&out.expect("at least one mode"))
    }

    /// The normalized manifold point with coordinates `params`.
    pub fn member(&self, params: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let d = self.grid.dims();
        let modes = self.modes();
        let mut out: Option<StateVector> = None;
        for f in 0..self.factors {
            let slice = |base: usize| params[base + f * d..base + (f + 1) * d].to_vec();
            let part = match self.kind {
                ManifoldKind::Position => super::make_position_packet(&self.grid, &slice(0), self.sigma)?,
                ManifoldKind::PhaseSpace => {
                    super::make_phase_packet(&self.grid, &slice(0), &slice(modes), self.sigma)?
                }
                ManifoldKind::Momentum => super::momentum_member(&self.grid, &slice(0), self.sigma)?,
            };
            out = Some(match out {
                None => part,
                Some(acc) => kron(&acc, &part),
            });
        }
        normalize(&out.expect("at least one factor"))
    }
}

pub(crate) struct ModeJet {
    pub v: Vec<Complex64>,
    pub d: Vec<Vec<Complex64>>,
    pub dd: Vec<Vec<Vec<Complex64>>>,
}
