//! Fast property checks over the core primitives, for the `selftest`
//! command. Each check is seeded and finishes in well under a second.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::gue::GueSampler;
use crate::hilbert::{fs_distance, Ray};
use crate::packets::{make_position_packet, overlap_centered, project_to_manifold, Grid, ManifoldKind, ManifoldSpec};
use crate::rng::{random_state, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation.
    pub value: f64,
    pub tolerance: f64,
}

impl SelfCheck {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }
}

fn fs_metric(seed: u64) -> Result<SelfCheck> {
    let mut rng = rng_from_seed(seed);
    let mut worst: f64 = 0.0;
    for n in [2, 8, 64] {
        for _ in 0..100 {
            let a = Ray::new(&random_state(n, &mut rng)?)?;
            let b = Ray::new(&random_state(n, &mut rng)?)?;
            let c = Ray::new(&random_state(n, &mut rng)?)?;
            let ab = fs_distance(&a, &b)?;
            let ba = fs_distance(&b, &a)?;
            let rotated = Ray::new(&b.representative().scaled(Complex64::from_polar(1.0, 0.7)))?;
            worst = worst
                .max((ab - ba).abs())
                .max((ab - fs_distance(&a, &rotated)?).abs())
                .max(fs_distance(&a, &c)? - ab - fs_distance(&b, &c)?)
                .max(fs_distance(&a, &a)?);
        }
    }
    Ok(SelfCheck::new("fs_metric", worst, 1e-12))
}

fn gue_draws(seed: u64) -> Result<Vec<SelfCheck>> {
    let mut s1 = GueSampler::new(16, 1.0, seed)?;
    let mut s2 = GueSampler::new(16, 1.0, seed)?;
    let mut non_hermitian = 0.0;
    let mut mismatch = 0.0;
    for _ in 0..20 {
        let h1 = s1.sample();
        let h2 = s2.sample();
        if !h1.is_hermitian() {
            non_hermitian += 1.0;
        }
        if h1.entries() != h2.entries() {
            mismatch += 1.0;
        }
    }
    Ok(vec![
        SelfCheck::new("gue_hermitian", non_hermitian, 0.0),
        SelfCheck::new("gue_seed_determinism", mismatch, 0.0),
    ])
}

fn overlap_closed_form() -> Result<SelfCheck> {
    // Riemann sum of g_{0,σ} against a centered Gaussian of spread d.
    let sigma = 1.0;
    let mut worst: f64 = 0.0;
    for d in [0.3, 1.0, 3.0] {
        let h = 1e-3;
        let g = |x: f64, s: f64| (2.0 * std::f64::consts::PI * s * s).powf(-0.25) * (-x * x / (4.0 * s * s)).exp();
        let numeric: f64 = (-40_000..=40_000).map(|k| {
            let x = k as f64 * h;
            g(x, sigma) * g(x, d) * h
        }).sum();
        worst = worst.max((numeric / overlap_centered(d, sigma, 1)? - 1.0).abs());
    }
    Ok(SelfCheck::new("overlap_closed_form", worst, 1e-10))
}

fn isometry() -> Result<SelfCheck> {
    let grid = Grid::line(512, -20.0, 20.0)?;
    let sigma = 1.0;
    let base = Ray::new(&make_position_packet(&grid, &[0.0], sigma)?)?;
    let mut worst: f64 = 0.0;
    for delta in [0.02, 0.05, 0.1, 0.2] {
        let moved = Ray::new(&make_position_packet(&grid, &[delta], sigma)?)?;
        let d = fs_distance(&base, &moved)?;
        worst = worst.max((d / (delta / (2.0 * sigma)) - 1.0).abs());
    }
    Ok(SelfCheck::new("small_displacement_isometry", worst, 0.01))
}

fn projection_roundtrip() -> Result<SelfCheck> {
    let grid = Grid::line(128, -16.0, 16.0)?;
    let spec = ManifoldSpec::new(ManifoldKind::PhaseSpace, grid, 1.0, 1)?;
    let target = [1.3, -0.4];
    let proj = project_to_manifold(&spec.member(&target)?, &spec, None)?;
    let err = proj
        .params
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t).abs())
        .fold(proj.distance, f64::max);
    Ok(SelfCheck::new("projection_roundtrip", err, 1e-6))
}

/// Runs every check; errors inside a check propagate.
pub fn run_selftest(seed: u64) -> Result<Vec<SelfCheck>> {
    let mut out = vec![fs_metric(seed)?];
    out.extend(gue_draws(seed)?);
    out.push(overlap_closed_form()?);
    out.push(isometry()?);
    out.push(projection_roundtrip()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_selftest(3).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
