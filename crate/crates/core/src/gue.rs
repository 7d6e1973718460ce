//! Gaussian unitary ensemble sampling and spectral diagnostics.
//!
//! Normalization: density `∝ exp(−Tr H² / 2s²)` in the sense that every
//! independent real Gaussian has variance `s²` — diagonal entries are
//! `N(0, s²)`, off-diagonal entries are `(X + iY)/√2` with `X, Y ~ N(0, s²)`.
//! Then `E|H_jk|² = s²` for every entry and the spectrum of `H / (s√N)`
//! tends to the semicircle on `[−2, 2]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::rng::{rng_from_seed, unitarity_defect};
use crate::stats::{ks_one_sample, KsResult};

/// Seeded GUE sampler. Owns its generator; clone-free by design so two
/// walkers can never share a stream by accident.
#[derive(Debug)]
pub struct GueSampler {
    dimension: usize,
    scale: f64,
    seed: u64,
    rng: ChaCha8Rng,
}

impl GueSampler {
    pub fn new(dimension: usize, scale: f64, seed: u64) -> Result<Self> {
        if dimension < 2 {
            return Err(param_err("dimension", format!("need N >= 2, got {dimension}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(param_err("gue_scale", format!("scale must be positive, got {scale}")));
        }
        Ok(Self {
            dimension,
            scale,
            seed,
            rng: rng_from_seed(seed),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fresh independent draw. Entries are generated row by row over the
    /// upper triangle: the diagonal entry, then the off-diagonal entries to
    /// its right (real part before imaginary part).
    pub fn sample(&mut self) -> HermitianMatrix {
        let n = self.dimension;
        let s = self.scale;
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for j in 0..n {
            let d: f64 = self.rng.sample(StandardNormal);
            m[(j, j)] = Complex64::new(s * d, 0.0);
            for k in j + 1..n {
                let x: f64 = self.rng.sample(StandardNormal);
                let y: f64 = self.rng.sample(StandardNormal);
                let z = Complex64::new(x, y) * (s * FRAC_1_SQRT_2);
                m[(j, k)] = z;
                m[(k, j)] = z.conj();
            }
        }
        HermitianMatrix { entries: m }
    }
}

/// A Hermitian matrix, exactly equal to its adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Accepts only square, finite, exactly Hermitian input.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: entries.ncols(),
            });
        }
        for (idx, z) in entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(idx));
            }
        }
        for i in 0..n {
            for j in i..n {
                if entries[(i, j)] != entries[(j, i)].conj() {
                    return Err(param_err("entries", format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.entries == self.entries.adjoint()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues and unitary eigenvectors (columns).
    pub fn eigen(&self) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
        let n = self.dim();
        let e = SymmetricEigen::try_new(self.entries.clone(), f64::EPSILON, 1000 * n.max(10))
            .ok_or(Error::Eigen)?;
        if e.eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigen);
        }
        Ok((e.eigenvalues, e.eigenvectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let vals = self.entries.symmetric_eigenvalues();
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigen);
        }
        Ok(vals.iter().copied().collect())
    }

    /// `U H U†`.
    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> HermitianMatrix {
        let m = u * &self.entries * u.adjoint();
        // Symmetrize so the result is exactly Hermitian.
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianMatrix { entries: h }
    }
}

/// Semicircle CDF on `[−2, 2]`: `1/2 + x√(4−x²)/4π + arcsin(x/2)/π`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

/// Pools the eigenvalues of `draws` samples, scales them by `1/(s√N)` and
/// runs a Kolmogorov–Smirnov test against the semicircle law.
pub fn semicircle_ks(sampler: &mut GueSampler, draws: usize) -> Result<KsResult> {
    let norm = sampler.scale() * (sampler.dimension() as f64).sqrt();
    let mut pooled = Vec::with_capacity(draws * sampler.dimension());
    for _ in 0..draws {
        pooled.extend(sampler.sample().eigenvalues()?.into_iter().map(|x| x / norm));
    }
    Ok(ks_one_sample(&pooled, semicircle_cdf))
}

/// Moment comparison between `{H}` and `{U H U†}` over the same draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub draws: usize,
    /// `max_jk |E[H_jk] − E[(UHU†)_jk]|`.
    pub first_moment_discrepancy: f64,
    /// `max_jk |E|H_jk|² − E|(UHU†)_jk|²|`.
    pub second_moment_discrepancy: f64,
    /// Standard error of a single empirical second moment, `√2 s² / √draws`
    /// (the diagonal, which has the larger spread).
    pub second_moment_se: f64,
    /// Standard error of a single empirical mean entry, `s / √draws`.
    pub first_moment_se: f64,
}

pub fn unitary_invariance_check(
    sampler: &mut GueSampler,
    u: &DMatrix<Complex64>,
    draws: usize,
) -> Result<InvarianceReport> {
    let n = sampler.dimension();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: n,
        });
    }
    let defect = unitarity_defect(u);
    if defect > 1e-12 {
        return Err(Error::NonUnitary(defect));
    }
    if draws == 0 {
        return Err(param_err("draws", "need at least one draw"));
    }
    let zero = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let (mut m1, mut m1u) = (zero.clone(), zero);
    let (mut m2, mut m2u) = (DMatrix::zeros(n, n), DMatrix::<f64>::zeros(n, n));
    for _ in 0..draws {
        let h = sampler.sample();
        let hu = h.conjugated(u);
        m1 += h.entries();
        m1u += hu.entries();
        m2 += h.entries().map(|z| z.norm_sqr());
        m2u += hu.entries().map(|z| z.norm_sqr());
    }
    let d = draws as f64;
    let first = (m1 - m1u).iter().map(|z| z.norm() / d).fold(0.0, f64::max);
    let second = (m2 - m2u).iter().map(|x| x.abs() / d).fold(0.0, f64::max);
    let s = sampler.scale();
    Ok(InvarianceReport {
        draws,
        first_moment_discrepancy: first,
        second_moment_discrepancy: second,
        second_moment_se: 2f64.sqrt() * s * s / d.sqrt(),
        first_moment_se: s / d.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_exactly_hermitian() {
        let mut s = GueSampler::new(5, 0.7, 1).unwrap();
        for _ in 0..10 {
            let h = s.sample();
            assert!(h.is_hermitian());
            assert!(HermitianMatrix::new(h.entries().clone()).is_ok());
        }
    }

    #[test]
    fn seed_determinism() {
        let mut a = GueSampler::new(6, 1.0, 99).unwrap();
        let mut b = GueSampler::new(6, 1.0, 99).unwrap();
        for _ in 0..5 {
            assert_eq!(a.sample(), b.sample());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GueSampler::new(1, 1.0, 0).is_err());
        assert!(GueSampler::new(4, 0.0, 0).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        ]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let mut s = GueSampler::new(6, 1.0, 4).unwrap();
        let h = s.sample();
        let (vals, vecs) = h.eigen().unwrap();
        let diag = DMatrix::from_diagonal(&vals.map(|x| Complex64::new(x, 0.0)));
        let back = &vecs * diag * vecs.adjoint();
        assert!((back - h.entries()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn semicircle_cdf_endpoints_and_center() {
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
        // d/dx at 0 is the density 1/π.
        let h = 1e-6;
        let slope = (semicircle_cdf(h) - semicircle_cdf(-h)) / (2.0 * h);
        assert!((slope - 1.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn identity_gives_zero_discrepancy() {
        let mut s = GueSampler::new(3, 1.0, 5).unwrap();
        let r = unitary_invariance_check(&mut s, &DMatrix::identity(3, 3), 100).unwrap();
        assert!(r.first_moment_discrepancy < 1e-14);
        assert!(r.second_moment_discrepancy < 1e-14);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let mut s = GueSampler::new(2, 1.0, 5).unwrap();
        let u = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(
            unitary_invariance_check(&mut s, &u, 10),
            Err(Error::NonUnitary(_))
        ));
    }
}
