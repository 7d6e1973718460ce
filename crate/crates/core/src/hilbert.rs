//! Finite-dimensional Hilbert space and its projectivization.
//!
//! A [`StateVector`] is a plain list of complex amplitudes. A [`Ray`] is a
//! normalized representative of a point of projective space; every quantity
//! computed from rays is invariant under a global phase of the representative.
//! Distances are Fubini-Study angles in `[0, π/2]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};

/// Tolerance used when checking that a vector is normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Singular values below this floor are dropped from the entanglement entropy.
pub const SINGULAR_FLOOR: f64 = 1e-14;

/// Amplitudes over a fixed, declared basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps `amps`; requires at least two finite entries.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(param_err("amplitudes", "need at least two basis states"));
        }
        if let Some(i) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { amps })
    }

    /// Wraps amplitudes produced internally from finite arithmetic.
    pub(crate) fn from_vec_unchecked(amps: Vec<Complex64>) -> Self {
        debug_assert!(amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { amps }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis vector `e_k` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(param_err("k", format!("basis index {k} out of range for dimension {n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_vec_unchecked(self.amps.iter().map(|z| z * factor).collect())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: Complex64, other: &StateVector) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self::from_vec_unchecked(
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + factor * b)
                .collect(),
        ))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// A point of projective space, stored as a normalized representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    rep: StateVector,
}

impl Ray {
    /// Normalizes `v` and takes its ray.
    pub fn new(v: &StateVector) -> Result<Self> {
        Ok(Self { rep: normalize(v)? })
    }

    pub fn representative(&self) -> &StateVector {
        &self.rep
    }

    pub fn into_representative(self) -> StateVector {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// `|⟨self, other⟩|`, the cosine of the Fubini-Study distance.
    pub fn overlap(&self, other: &Ray) -> Result<f64> {
        Ok(inner(&self.rep, &other.rep)?.norm())
    }
}

/// A tangent vector to projective space at `base`, orthogonal to the base
/// representative.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: Ray,
    pub direction: StateVector,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        self.direction.norm()
    }

    /// The same tangent direction rescaled to Euclidean length `length`.
    /// A zero direction stays zero.
    pub fn with_length(&self, length: f64) -> Self {
        let n = self.norm();
        let factor = if n > 0.0 { length / n } else { 0.0 };
        Self {
            base: self.base.clone(),
            direction: self.direction.scaled(Complex64::new(factor, 0.0)),
        }
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Hermitian inner product, conjugate-linear in the first slot.
pub fn inner(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    check_len(psi.len(), phi.len())?;
    Ok(inner_slices(psi.as_slice(), phi.as_slice()))
}

pub(crate) fn inner_slices(psi: &[Complex64], phi: &[Complex64]) -> Complex64 {
    psi.iter().zip(phi).map(|(a, b)| a.conj() * b).sum()
}

/// Fubini-Study distance `arccos |⟨a, b⟩|`, clamped into `[0, π/2]`.
///
/// Near coincidence `arccos` loses half the digits, so small angles come
/// from the chord `‖a − e^{-iφ} b‖ = 2 sin(θ/2)` with `φ = arg ⟨a, b⟩`.
pub fn fs_distance(a: &Ray, b: &Ray) -> Result<f64> {
    let (ra, rb) = (a.representative(), b.representative());
    let z = inner(ra, rb)?;
    let c = z.norm();
    if c < 0.9 {
        return Ok(c.clamp(0.0, 1.0).acos());
    }
    let phase = if c > 0.0 { z.conj() / c } else { Complex64::new(1.0, 0.0) };
    let chord = ra
        .as_slice()
        .iter()
        .zip(rb.as_slice())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((2.0 * (0.5 * chord).min(1.0).asin()).clamp(0.0, std::f64::consts::FRAC_PI_2))
}

/// Removes the component of `v` along `base`.
pub fn tangent_project(base: &Ray, v: &StateVector) -> Result<TangentVector> {
    let rep = base.representative();
    let c = inner(rep, v)?;
    let direction = v.add_scaled(-c, rep)?;
    Ok(TangentVector {
        base: base.clone(),
        direction,
    })
}

/// Scales `psi` to unit norm.
pub fn normalize(psi: &StateVector) -> Result<StateVector> {
    let n = psi.norm();
    if !(n > 0.0) {
        return Err(Error::DegenerateState);
    }
    let mut out = psi.scaled(Complex64::new(1.0 / n, 0.0));
    // One refinement pass pulls the norm to within a few ulps of 1.
    let m = out.norm();
    if m != 1.0 {
        out = out.scaled(Complex64::new(1.0 / m, 0.0));
    }
    Ok(out)
}

/// Tensor product `a ⊗ b`; index `i * b.len() + j` carries `a_i b_j`.
pub fn kron(a: &StateVector, b: &StateVector) -> StateVector {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.as_slice() {
        for y in b.as_slice() {
            out.push(x * y);
        }
    }
    StateVector::from_vec_unchecked(out)
}

/// Entanglement entropy (nats) of a bipartite pure state.
///
/// The amplitudes are read as a `dim_a × dim_b` coefficient matrix (row
/// index = first factor). Squared singular values are normalized by their sum
/// before the entropy is taken, and values below [`SINGULAR_FLOOR`] are
/// dropped.
pub fn schmidt_entropy(psi: &StateVector, dim_a: usize, dim_b: usize) -> Result<f64> {
    let s = schmidt_coefficients(psi, dim_a, dim_b)?;
    let total: f64 = s.iter().map(|x| x * x).sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateState);
    }
    let entropy = s
        .iter()
        .filter(|&&x| x >= SINGULAR_FLOOR)
        .map(|x| {
            let p = x * x / total;
            if p > 0.0 {
                -p * p.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>();
    Ok(entropy.max(0.0))
}

/// Singular values of the coefficient matrix, descending.
pub fn schmidt_coefficients(psi: &StateVector, dim_a: usize, dim_b: usize) -> Result<Vec<f64>> {
    if dim_a == 0 || dim_b == 0 || psi.len() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: dim_a * dim_b,
        });
    }
    let m = DMatrix::from_row_slice(dim_a, dim_b, psi.as_slice());
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(n: usize, k: usize) -> StateVector {
        StateVector::basis(n, k).unwrap()
    }

    fn ray(v: &StateVector) -> Ray {
        Ray::new(v).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&e(2, 0), &e(2, 0)).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e(2, 0), &e(2, 1)).unwrap(), c(0.0, 0.0));
        let h = StateVector::from_real(&[0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap();
        let v = inner(&h, &e(2, 0)).unwrap();
        assert!((v.re - FRAC_1_SQRT_2).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn inner_is_conjugate_symmetric() {
        let a = StateVector::new(vec![c(1.0, 2.0), c(-0.5, 0.25)]).unwrap();
        let b = StateVector::new(vec![c(0.3, -1.0), c(2.0, 1.0)]).unwrap();
        assert_eq!(inner(&a, &b).unwrap(), inner(&b, &a).unwrap().conj());
    }

    #[test]
    fn inner_rejects_length_mismatch() {
        assert_eq!(
            inner(&e(2, 0), &e(3, 0)),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn fs_distance_examples() {
        assert_eq!(fs_distance(&ray(&e(2, 0)), &ray(&e(2, 0))).unwrap(), 0.0);
        assert!((fs_distance(&ray(&e(2, 0)), &ray(&e(2, 1))).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let h = StateVector::from_real(&[1.0, 1.0]).unwrap();
        assert!((fs_distance(&ray(&h), &ray(&e(2, 0))).unwrap() - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn fs_distance_clamps_roundoff() {
        // |⟨a, a⟩| can land a hair above 1 for unnormalized-looking data.
        let a = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let d = fs_distance(&ray(&a), &ray(&a)).unwrap();
        assert!(d.is_finite() && d < 1e-7);
    }

    #[test]
    fn tangent_project_examples() {
        let base = ray(&e(2, 0));
        let t = tangent_project(&base, &e(2, 0)).unwrap();
        assert_eq!(t.norm(), 0.0);
        let t = tangent_project(&base, &e(2, 1)).unwrap();
        assert_eq!(t.direction, e(2, 1));
        let sum = e(2, 0).add_scaled(c(1.0, 0.0), &e(2, 1)).unwrap();
        let t = tangent_project(&base, &sum).unwrap();
        assert!(t.direction.max_abs_diff(&e(2, 1)).unwrap() < 1e-15);
    }

    #[test]
    fn normalize_examples() {
        let v = normalize(&StateVector::from_real(&[2.0, 0.0]).unwrap()).unwrap();
        assert_eq!(v, e(2, 0));
        let v = normalize(&StateVector::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        assert!((v.as_slice()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(
            normalize(&StateVector::zeros(2).unwrap()),
            Err(Error::DegenerateState)
        );
    }

    #[test]
    fn state_vector_rejects_bad_input() {
        assert!(StateVector::new(vec![c(1.0, 0.0)]).is_err());
        assert_eq!(
            StateVector::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(1))
        );
    }

    #[test]
    fn schmidt_entropy_examples() {
        let prod = kron(&e(2, 0), &e(2, 0));
        assert!(schmidt_entropy(&prod, 2, 2).unwrap().abs() < 1e-15);

        let bell = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!((schmidt_entropy(&bell, 2, 2).unwrap() - 2f64.ln()).abs() < 1e-12);

        let factorizable = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0]).unwrap();
        assert!(schmidt_entropy(&factorizable, 2, 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn schmidt_entropy_rejects_bad_factorization() {
        let v = StateVector::zeros(6).unwrap();
        assert!(matches!(
            schmidt_entropy(&v, 4, 2),
            Err(Error::DimensionMismatch { left: 6, right: 8 })
        ));
    }
}
