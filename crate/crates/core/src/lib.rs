//! Random walks on projective state space constrained by Gaussian-packet
//! manifolds, with the measurement statistics they produce.

pub mod dynamics;
pub mod error;
pub mod fourier;
pub mod gue;
pub mod hilbert;
pub mod measure;
pub mod packets;
pub mod rng;
pub mod scenarios;
pub mod selftest;
pub mod stats;
pub mod subspace;

pub use error::{Error, Result};
