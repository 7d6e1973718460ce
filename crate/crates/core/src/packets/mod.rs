//! Gaussian packets sampled on periodic grids, and the embedded manifolds they
//! trace out in state space.
//!
//! Amplitude convention: the amplitude stored at node `x_k` is
//! `ψ(x_k) · Δx^{dims/2}`, so that `Σ |c_k|²` approximates `∫ |ψ|² dx`.
//! Units are `ħ = 1`; momenta are wavenumbers.
//!
//! * position packets `g_{a,σ}(x) = (2πσ²)^{-dims/4} exp(-|x-a|²/4σ²)`
//! * phase-space packets `g_{a,σ}(x) e^{i p·x}`
//! * momentum members: the unitary Fourier image of `g_{b,σ}`, i.e. the state
//!   whose momentum-space amplitudes are `g_{b,σ}(k)`. In position space it is
//!   a wide packet (width `1/2σ`) centered on the middle of the grid with mean
//!   momentum `b`.

mod manifold;
mod projection;

use std::f64::consts::{PI, TAU};

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::fourier;
use crate::hilbert::{kron, normalize, tangent_project, Ray, StateVector, TangentVector};

pub use manifold::{ManifoldKind, ManifoldSpec};
pub use projection::{project_last_factor, project_to_manifold, FactorProjection, Projection};

/// Largest tolerated `|1 - Σ|c_k|²|` for a freshly sampled packet.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Packets are expected to sit at least this many widths from the grid edges.
pub const SUPPORT_MARGIN: f64 = 5.0;

/// A periodic, uniformly spaced grid with `points` nodes per axis.
///
/// Node `k` of every axis sits at `min + k Δx`, `Δx = (max - min) / points`;
/// `max` itself is the periodic image of `min`. Multi-axis arrays are
/// row-major with axis 0 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    points: usize,
    min: f64,
    max: f64,
    dims: usize,
}

impl Grid {
    pub fn new(points: usize, min: f64, max: f64, dims: usize) -> Result<Self> {
        if points < 16 {
            return Err(param_err("points", format!("need at least 16 nodes per axis, got {points}")));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(param_err("max", format!("axis bounds must satisfy min < max, got [{min}, {max}]")));
        }
        if !(1..=3).contains(&dims) {
            return Err(param_err("dims", format!("dims must be 1, 2 or 3, got {dims}")));
        }
        Ok(Self {
            points,
            min,
            max,
            dims,
        })
    }

    pub fn line(points: usize, min: f64, max: f64) -> Result<Self> {
        Self::new(points, min, max, 1)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Total number of nodes, `points^dims`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / self.points as f64
    }

    pub fn extent(&self) -> f64 {
        self.max - self.min
    }

    /// Coordinate of node `k` along any axis.
    pub fn node(&self, k: usize) -> f64 {
        self.min + k as f64 * self.spacing()
    }

    pub fn axis_nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.node(k)).collect()
    }

    /// Node `points / 2`, the reference point of momentum members.
    pub fn center(&self) -> f64 {
        self.node(self.points / 2)
    }

    pub fn momentum_spacing(&self) -> f64 {
        TAU / self.extent()
    }

    /// Nyquist wavenumber `π / Δx`.
    pub fn band_limit(&self) -> f64 {
        PI / self.spacing()
    }

    /// Centered wavenumber lattice `(m - points/2) Δk`.
    pub fn momentum_nodes(&self) -> Vec<f64> {
        let h = (self.points / 2) as f64;
        let dk = self.momentum_spacing();
        (0..self.points).map(|m| (m as f64 - h) * dk).collect()
    }

    /// The one-axis grid with the same nodes.
    pub fn axis(&self) -> Grid {
        Grid { dims: 1, ..*self }
    }

    /// Interval of centers keeping a packet of width `sigma` inside the margin.
    pub fn support_window(&self, sigma: f64) -> (f64, f64) {
        (self.min + SUPPORT_MARGIN * sigma, self.max - SUPPORT_MARGIN * sigma)
    }

    pub fn in_support(&self, center: f64, sigma: f64) -> bool {
        let (lo, hi) = self.support_window(sigma);
        center >= lo && center <= hi
    }
}

/// Center, momentum and width of a phase-space packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub a: Vec<f64>,
    pub p: Vec<f64>,
    pub sigma: f64,
}

impl GaussianParams {
    pub fn at_rest(a: Vec<f64>, sigma: f64) -> Self {
        let p = vec![0.0; a.len()];
        Self { a, p, sigma }
    }

    /// Whether every center component keeps the support margin.
    pub fn fits(&self, grid: &Grid) -> bool {
        self.a.iter().all(|&x| grid.in_support(x, self.sigma))
    }

    pub fn to_state(&self, grid: &Grid) -> Result<StateVector> {
        make_phase_packet(grid, &self.a, &self.p, self.sigma)
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(param_err("sigma", format!("width must be positive, got {sigma}")));
    }
    Ok(())
}

fn check_components(grid: &Grid, v: &[f64], name: &'static str) -> Result<()> {
    if v.len() != grid.dims() {
        return Err(param_err(
            name,
            format!("expected {} components, got {}", grid.dims(), v.len()),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(param_err(name, "components must be finite"));
    }
    Ok(())
}

fn gaussian_amplitude(x: f64, a: f64, sigma: f64) -> f64 {
    (TAU * sigma * sigma).powf(-0.25) * (-(x - a).powi(2) / (4.0 * sigma * sigma)).exp()
}

/// Unnormalized samples `g_{a,σ}(x_k) e^{i p x_k} √Δx` along one axis.
pub(crate) fn axis_packet(grid: &Grid, a: f64, p: f64, sigma: f64) -> Vec<Complex64> {
    let sq = grid.spacing().sqrt();
    grid.axis_nodes()
        .into_iter()
        .map(|x| Complex64::from_polar(gaussian_amplitude(x, a, sigma) * sq, p * x))
        .collect()
}

/// Unnormalized momentum-space samples `g_{b,σ}(k_m) √Δk` on the centered lattice.
pub(crate) fn axis_momentum_spectrum(grid: &Grid, b: f64, sigma: f64) -> Vec<Complex64> {
    let sq = grid.momentum_spacing().sqrt();
    grid.momentum_nodes()
        .into_iter()
        .map(|k| Complex64::new(gaussian_amplitude(k, b, sigma) * sq, 0.0))
        .collect()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_support(raw_norms: &[f64]) -> Result<()> {
    let total: f64 = raw_norms.iter().product();
    let deficit = (1.0 - total).abs();
    if deficit > SUPPORT_TOL {
        return Err(Error::GridSupport { deficit });
    }
    Ok(())
}

fn warn_margin(grid: &Grid, a: &[f64], sigma: f64) {
    if a.iter().any(|&x| !grid.in_support(x, sigma)) {
        warn!(
            "packet center {a:?} closer than {SUPPORT_MARGIN}σ (σ = {sigma}) to the grid edge [{}, {})",
            grid.min(),
            grid.max()
        );
    }
}

fn tensor_axes(axes: Vec<Vec<Complex64>>) -> Result<StateVector> {
    let mut iter = axes.into_iter();
    let first = iter.next().expect("at least one axis");
    let mut out = StateVector::new(first)?;
    for v in iter {
        out = kron(&out, &StateVector::new(v)?);
    }
    Ok(out)
}

/// Samples `g_{a,σ}`: the point `ω(a)` of the position manifold.
pub fn make_position_packet(grid: &Grid, a: &[f64], sigma: f64) -> Result<StateVector> {
    make_phase_packet(grid, a, &vec![0.0; a.len()], sigma)
}

/// Samples `φ_{a,p,σ}`: the point `Ω(a, p)` of the phase-space manifold.
pub fn make_phase_packet(grid: &Grid, a: &[f64], p: &[f64], sigma: f64) -> Result<StateVector> {
    check_sigma(sigma)?;
    check_components(grid, a, "a")?;
    check_components(grid, p, "p")?;
    let guard = grid.band_limit() - 1.5 / sigma;
    if let Some(&bad) = p.iter().find(|q| q.abs() >= guard) {
        return Err(Error::Resolution(format!(
            "momentum {bad} exceeds the grid band limit guard {guard:.4}"
        )));
    }
    warn_margin(grid, a, sigma);
    let axes: Vec<Vec<Complex64>> = a
        .iter()
        .zip(p)
        .map(|(&ai, &pi)| axis_packet(grid, ai, pi, sigma))
        .collect();
    let norms: Vec<f64> = axes.iter().map(|v| norm_sqr(v)).collect();
    check_support(&norms)?;
    normalize(&tensor_axes(axes)?)
}

/// The Fourier image of `g_{b,σ}`: a member of the momentum manifold.
///
/// The momentum-space samples are normalized and then mapped to position
/// space by a unitary centered inverse DFT, so the result has unit norm to
/// roundoff without a final rescale.
pub fn momentum_member(grid: &Grid, b: &[f64], sigma: f64) -> Result<StateVector> {
    check_sigma(sigma)?;
    check_components(grid, b, "b")?;
    let spectra: Vec<Vec<Complex64>> = b
        .iter()
        .map(|&bi| axis_momentum_spectrum(grid, bi, sigma))
        .collect();
    let norms: Vec<f64> = spectra.iter().map(|v| norm_sqr(v)).collect();
    check_support(&norms)?;
    let axes = spectra
        .into_iter()
        .zip(norms)
        .map(|(s, n)| {
            let scale = 1.0 / n.sqrt();
            let s: Vec<Complex64> = s.into_iter().map(|z| z * scale).collect();
            fourier::centered_inverse(&s)
        })
        .collect();
    tensor_axes(axes)
}

/// `⟨φ, g_{a,σ}⟩` for a centered Gaussian `φ` whose density has variance `d²`:
/// `(2σd / (σ² + d²))^{dims/2}`.
pub fn overlap_centered(d: f64, sigma: f64, dims: u32) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(param_err("d", format!("spread must be positive, got {d}")));
    }
    check_sigma(sigma)?;
    if dims == 0 {
        return Err(param_err("dims", "dims must be at least 1"));
    }
    Ok((2.0 * sigma * d / (sigma * sigma + d * d)).powf(dims as f64 / 2.0))
}

/// `|⟨ω(a), ω(b)⟩| = exp(-|a-b|²/8σ²)` for two packets of equal width.
pub fn overlap_displaced(distance: f64, sigma: f64) -> f64 {
    (-(distance * distance) / (8.0 * sigma * sigma)).exp()
}

/// Derivative samples `∂g/∂a_i` for every axis, scaled consistently with the
/// normalized member.
pub fn position_tangents(grid: &Grid, a: &[f64], sigma: f64) -> Result<Vec<StateVector>> {
    let (axes, scale) = normalized_axes(grid, a, sigma)?;
    let nodes = grid.axis_nodes();
    let mut out = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        let mut parts = axes.clone();
        parts[i] = axes[i]
            .iter()
            .zip(&nodes)
            .map(|(v, &x)| v * ((x - a[i]) / (2.0 * sigma * sigma)))
            .collect();
        out.push(tensor_axes(parts)?.scaled(Complex64::new(scale, 0.0)));
    }
    Ok(out)
}

/// The width-variation direction `∂g_{a,σ}/∂σ`, projected onto the tangent
/// space at `ω(a)`.
pub fn sigma_tangent(grid: &Grid, a: &[f64], sigma: f64) -> Result<TangentVector> {
    let (axes, scale) = normalized_axes(grid, a, sigma)?;
    let nodes = grid.axis_nodes();
    let mut total: Option<StateVector> = None;
    for i in 0..a.len() {
        let mut parts = axes.clone();
        parts[i] = axes[i]
            .iter()
            .zip(&nodes)
            .map(|(v, &x)| v * ((x - a[i]).powi(2) / (2.0 * sigma.powi(3)) - 0.5 / sigma))
            .collect();
        let term = tensor_axes(parts)?;
        total = Some(match total {
            None => term,
            Some(t) => t.add_scaled(Complex64::new(1.0, 0.0), &term)?,
        });
    }
    let raw = total.expect("dims >= 1").scaled(Complex64::new(scale, 0.0));
    let base = Ray::new(&make_position_packet(grid, a, sigma)?)?;
    tangent_project(&base, &raw)
}

fn normalized_axes(grid: &Grid, a: &[f64], sigma: f64) -> Result<(Vec<Vec<Complex64>>, f64)> {
    check_sigma(sigma)?;
    check_components(grid, a, "a")?;
    let axes: Vec<Vec<Complex64>> = a.iter().map(|&ai| axis_packet(grid, ai, 0.0, sigma)).collect();
    let norms: Vec<f64> = axes.iter().map(|v| norm_sqr(v)).collect();
    check_support(&norms)?;
    let scale = 1.0 / norms.iter().product::<f64>().sqrt();
    Ok((axes, scale))
}

/// Mean and variance of the position density along each axis (node
/// coordinates, no periodic unwrapping).
pub fn position_moments(grid: &Grid, psi: &StateVector) -> Result<(Vec<f64>, Vec<f64>)> {
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: grid.len(),
        });
    }
    let n = grid.points();
    let dims = grid.dims();
    let total = psi.norm_sqr();
    let mut mean = vec![0.0; dims];
    let mut second = vec![0.0; dims];
    for (idx, z) in psi.as_slice().iter().enumerate() {
        let w = z.norm_sqr() / total;
        let mut rest = idx;
        for axis in (0..dims).rev() {
            let x = grid.node(rest % n);
            rest /= n;
            mean[axis] += w * x;
            second[axis] += w * x * x;
        }
    }
    let var = mean.iter().zip(&second).map(|(m, s)| s - m * m).collect();
    Ok((mean, var))
}

/// Mean momentum along each axis, from the FFT of `psi`.
pub fn momentum_mean(grid: &Grid, psi: &StateVector) -> Result<Vec<f64>> {
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: grid.len(),
        });
    }
    let n = grid.points();
    let dims = grid.dims();
    let mut spec = psi.as_slice().to_vec();
    fourier::fft_axes(&mut spec, n, dims, false);
    let dk = grid.momentum_spacing();
    let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
    let mut mean = vec![0.0; dims];
    for (idx, z) in spec.iter().enumerate() {
        let w = z.norm_sqr() / total;
        let mut rest = idx;
        for axis in (0..dims).rev() {
            let k = fourier::signed_bin(rest % n, n) as f64 * dk;
            rest /= n;
            mean[axis] += w * k;
        }
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fs_distance, inner};

    fn grid() -> Grid {
        Grid::line(256, -20.0, 20.0).unwrap()
    }

    fn ray(v: &StateVector) -> Ray {
        Ray::new(v).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::line(8, 0.0, 1.0).is_err());
        assert!(Grid::line(16, 1.0, 1.0).is_err());
        assert!(Grid::new(16, 0.0, 1.0, 4).is_err());
        let g = Grid::new(16, 0.0, 16.0, 2).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.center(), 8.0);
    }

    #[test]
    fn position_packet_is_normalized() {
        let g = grid();
        let psi = make_position_packet(&g, &[1.0], 1.0).unwrap();
        assert!((inner(&psi, &psi).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn position_packet_errors() {
        let g = grid();
        assert!(matches!(
            make_position_packet(&g, &[0.0], 0.0),
            Err(Error::Parameter { name: "sigma", .. })
        ));
        assert!(matches!(
            make_position_packet(&g, &[19.0], 1.0),
            Err(Error::GridSupport { .. })
        ));
        assert!(make_position_packet(&g, &[0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn distant_packets_are_nearly_orthogonal() {
        let g = grid();
        let sigma = 1.0;
        let a = make_position_packet(&g, &[-3.0], sigma).unwrap();
        let b = make_position_packet(&g, &[3.0], sigma).unwrap();
        let overlap = inner(&a, &b).unwrap().norm();
        assert!((overlap - (-36.0f64 / 8.0).exp()).abs() < 1e-10);
        let d = fs_distance(&ray(&a), &ray(&b)).unwrap();
        assert!((d - 1.5597).abs() < 1e-4, "{d}");
    }

    #[test]
    fn small_displacement_is_isometric() {
        let g = grid();
        let sigma = 1.0;
        let a = make_position_packet(&g, &[0.0], sigma).unwrap();
        let b = make_position_packet(&g, &[0.1], sigma).unwrap();
        let d = fs_distance(&ray(&a), &ray(&b)).unwrap();
        assert!((d / 0.05 - 1.0).abs() < 0.01);
    }

    #[test]
    fn phase_packet_reduces_to_position_packet() {
        let g = grid();
        let a = make_position_packet(&g, &[2.0], 1.5).unwrap();
        let b = make_phase_packet(&g, &[2.0], &[0.0], 1.5).unwrap();
        assert_eq!(fs_distance(&ray(&a), &ray(&b)).unwrap(), 0.0);
    }

    #[test]
    fn phase_packet_overlap_matches_gaussian_factor() {
        let g = grid();
        let (sigma, p) = (1.0, 0.8);
        let a = make_phase_packet(&g, &[0.5], &[p], sigma).unwrap();
        let b = make_phase_packet(&g, &[0.5], &[0.0], sigma).unwrap();
        let overlap = inner(&a, &b).unwrap().norm();
        assert!((overlap - (-p * p * sigma * sigma / 2.0).exp()).abs() < 1e-10);
    }

    #[test]
    fn phase_packet_mean_position_is_center() {
        let g = grid();
        let psi = make_phase_packet(&g, &[1.3], &[2.0], 1.0).unwrap();
        let (mean, _) = position_moments(&g, &psi).unwrap();
        assert!((mean[0] - 1.3).abs() < g.spacing());
    }

    #[test]
    fn phase_packet_aliasing_guard() {
        let g = grid();
        let limit = g.band_limit() - 1.5;
        assert!(matches!(
            make_phase_packet(&g, &[0.0], &[limit + 0.01], 1.0),
            Err(Error::Resolution(_))
        ));
        assert!(make_phase_packet(&g, &[0.0], &[limit - 0.5], 1.0).is_ok());
    }

    #[test]
    fn overlap_centered_examples() {
        assert_eq!(overlap_centered(1.0, 1.0, 3).unwrap(), 1.0);
        assert!((overlap_centered(2.0, 1.0, 3).unwrap() - 0.715_541_752_799_933_2).abs() < 1e-15);
        assert!(overlap_centered(0.0, 1.0, 3).is_err());
        assert!(overlap_centered(1.0, -1.0, 3).is_err());
    }

    #[test]
    fn momentum_member_is_unit_norm_and_wide() {
        let g = grid();
        let sigma = 0.5;
        let m = momentum_member(&g, &[1.0], sigma).unwrap();
        assert!((m.norm() - 1.0).abs() < 1e-12);
        let (mean, var) = position_moments(&g, &m).unwrap();
        assert!((mean[0] - g.center()).abs() < 1e-9);
        let expected = 1.0 / (2.0 * sigma);
        assert!((var[0].sqrt() / expected - 1.0).abs() < 1e-6);
        let k = momentum_mean(&g, &m).unwrap();
        assert!((k[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sigma_direction_is_orthogonal_to_translations() {
        let g = grid();
        for &a in &[0.0, 0.37, -2.2] {
            let t = sigma_tangent(&g, &[a], 1.2).unwrap();
            let rep = t.base.representative();
            assert!(inner(rep, &t.direction).unwrap().norm() < 1e-12);
            for d in position_tangents(&g, &[a], 1.2).unwrap() {
                assert!(inner(&d, &t.direction).unwrap().norm() < 1e-8);
            }
        }
    }
}
