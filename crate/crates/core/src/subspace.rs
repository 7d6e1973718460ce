//! Low-dimensional walk subspaces embedded in a large state space.
//!
//! A full-grid GUE walk would need eigendecompositions of `n^dims`-sized
//! matrices every step. The scenarios instead run the walk inside the span
//! of the states that matter (initial state and detector targets), which is
//! exactly GUE-isotropic within that span.

use num_complex::Complex64;

use crate::error::{param_err, Error, Result};
use crate::hilbert::{inner_slices, normalize, StateVector};

/// Residual norm below which a spanning vector counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Vec<StateVector>,
}

impl Subspace {
    /// Orthonormalizes `vectors` in order (modified Gram-Schmidt, two
    /// passes). Linearly dependent input is rejected.
    pub fn span(vectors: &[StateVector]) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(param_err("subspace", "need at least two spanning vectors"));
        }
        let len = vectors[0].len();
        let mut basis: Vec<StateVector> = Vec::with_capacity(vectors.len());
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != len {
                return Err(Error::DimensionMismatch { left: v.len(), right: len });
            }
            let scale = v.norm();
            let mut w = v.as_slice().to_vec();
            for _ in 0..2 {
                for b in &basis {
                    let c = inner_slices(b.as_slice(), &w);
                    for (x, y) in w.iter_mut().zip(b.as_slice()) {
                        *x -= c * y;
                    }
                }
            }
            let w = StateVector::new(w)?;
            if w.norm() <= DEPENDENCE_TOL * scale {
                return Err(param_err("subspace", format!("spanning vector {i} is linearly dependent")));
            }
            basis.push(normalize(&w)?);
        }
        Ok(Self { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].len()
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// Coordinates `⟨b_k, v⟩` of the orthogonal projection of `v`.
    pub fn coords(&self, v: &StateVector) -> Result<StateVector> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: self.ambient_dim(),
            });
        }
        StateVector::new(self.basis.iter().map(|b| inner_slices(b.as_slice(), v.as_slice())).collect())
    }

    /// `Σ_k c_k b_k`.
    pub fn lift(&self, c: &StateVector) -> Result<StateVector> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: c.len(),
                right: self.dim(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.ambient_dim()];
        for (ck, b) in c.as_slice().iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b.as_slice()) {
                *o += ck * x;
            }
        }
        StateVector::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::inner;

    #[test]
    fn basis_is_orthonormal_and_round_trips() {
        let a = StateVector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        let b = StateVector::from_real(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        let s = Subspace::span(&[a.clone(), b.clone()]).unwrap();
        let g = s.basis();
        assert!((inner(&g[0], &g[0]).unwrap().re - 1.0).abs() < 1e-15);
        assert!(inner(&g[0], &g[1]).unwrap().norm() < 1e-15);
        let back = s.lift(&s.coords(&b).unwrap()).unwrap();
        assert!(back.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn dependent_vectors_are_rejected() {
        let a = StateVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let b = a.scaled(Complex64::new(0.0, 2.0));
        assert!(Subspace::span(&[a, b]).is_err());
    }
}
