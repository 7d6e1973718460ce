//! Unitary discrete Fourier transforms on periodic grids.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached forward/inverse plans for unitary per-axis transforms of a
/// row-major `points^dims` array.
pub struct AxisFft {
    points: usize,
    dims: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl AxisFft {
    pub fn new(points: usize, dims: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            points,
            dims,
            forward,
            inverse,
            line: vec![Complex64::new(0.0, 0.0); points],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// `inverse = false` applies `X_m = n^{-1/2} Σ_j x_j e^{-2πi jm/n}` per axis.
    pub fn apply(&mut self, data: &mut [Complex64], inverse: bool) {
        let points = self.points;
        debug_assert_eq!(data.len(), points.pow(self.dims as u32));
        let fft = if inverse { &self.inverse } else { &self.forward };
        let scale = 1.0 / (points as f64).sqrt();
        for axis in 0..self.dims {
            let stride = points.pow((self.dims - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(points) {
                    fft.process_with_scratch(chunk, &mut self.scratch);
                }
                continue;
            }
            let block = stride * points;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (k, slot) in self.line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    fft.process_with_scratch(&mut self.line, &mut self.scratch);
                    for (k, v) in self.line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
        let total = scale.powi(self.dims as i32);
        data.iter_mut().for_each(|z| *z *= total);
    }
}

/// One-shot form of [`AxisFft::apply`].
pub fn fft_axes(data: &mut [Complex64], points: usize, dims: usize, inverse: bool) {
    AxisFft::new(points, dims).apply(data, inverse);
}

/// Signed frequency index of FFT bin `m` (`m` for `m < n/2`, else `m - n`).
pub fn signed_bin(m: usize, points: usize) -> i64 {
    if m < points.div_ceil(2) {
        m as i64
    } else {
        m as i64 - points as i64
    }
}

/// Centered inverse transform on one axis.
///
/// `spectrum[m]` is the amplitude at wavenumber `(m - h) Δk` with
/// `h = points / 2`; the result is the amplitude at node `j`, with phases
/// referenced to node `h` so that a real, centered spectrum gives a packet
/// centered on the middle of the grid.
pub fn centered_inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let h = (n / 2) as f64;
    let nf = n as f64;
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(m, c)| c * Complex64::from_polar(1.0, -TAU * m as f64 * h / nf))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / nf.sqrt();
    let global = TAU * h * h / nf;
    buf.iter()
        .enumerate()
        .map(|(j, c)| c * Complex64::from_polar(scale, -TAU * h * j as f64 / nf + global))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_centered_inverse(spec: &[Complex64]) -> Vec<Complex64> {
        let n = spec.len();
        let h = (n / 2) as f64;
        (0..n)
            .map(|j| {
                spec.iter()
                    .enumerate()
                    .map(|(m, c)| {
                        let phase = TAU * (m as f64 - h) * (j as f64 - h) / n as f64;
                        c * Complex64::from_polar(1.0, phase)
                    })
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn centered_inverse_matches_direct_sum() {
        for n in [16usize, 17, 32] {
            let spec: Vec<Complex64> = (0..n)
                .map(|m| Complex64::new((m as f64 * 0.37).sin(), (m as f64 * 1.3).cos()))
                .collect();
            let fast = centered_inverse(&spec);
            let slow = naive_centered_inverse(&spec);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn fft_axes_round_trip_is_identity_and_unitary() {
        let n = 16;
        let orig: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.5).cos()))
            .collect();
        let mut data = orig.clone();
        fft_axes(&mut data, n, 2, false);
        let n0: f64 = orig.iter().map(|z| z.norm_sqr()).sum();
        let n1: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        assert!((n0 - n1).abs() < 1e-10 * n0);
        fft_axes(&mut data, n, 2, true);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn signed_bins() {
        assert_eq!(signed_bin(0, 16), 0);
        assert_eq!(signed_bin(7, 16), 7);
        assert_eq!(signed_bin(8, 16), -8);
        assert_eq!(signed_bin(15, 16), -1);
        assert_eq!(signed_bin(8, 17), 8);
        assert_eq!(signed_bin(9, 17), -8);
    }
}
