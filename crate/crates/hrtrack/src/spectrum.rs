//! Sparse spectrum estimation by iterative thresholding with adaptive
//! thresholds (IMAT).
//!
//! The window samples are treated as a partial observation of a longer
//! record whose spectrum is sparse on a fine frequency grid. Each
//! iteration re-imposes the observed samples, transforms, and keeps only
//! the spectral coefficients above an exponentially decaying threshold.

use crate::error::{Error, Result};
use rustfft::{num_complex::Complex, FftPlanner};
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buf: &mut [Complex<f64>]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

fn ifft(buf: &mut [Complex<f64>]) {
    let n = buf.len() as f64;
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
    for v in buf.iter_mut() {
        *v /= n;
    }
}

/// Parameters of the iterative reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct ImatParams {
    pub grid_size: usize,
    pub iterations: usize,
    /// Threshold decay rate: tau_k = beta * exp(-alpha * k).
    pub alpha: f64,
}

impl ImatParams {
    pub fn new(grid_size: usize, iterations: usize, alpha: f64) -> Self {
        Self {
            grid_size,
            iterations,
            alpha,
        }
    }
}

/// Reconstruct the sparse spectrum of a signal observed only at
/// `positions` on a length-`grid_size` grid. Returns the final
/// thresholded complex spectrum (full grid).
pub fn imat_reconstruct(
    values: &[f64],
    positions: &[usize],
    params: ImatParams,
) -> Result<Vec<Complex<f64>>> {
    let g = params.grid_size;
    if values.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if values.len() != positions.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: positions.len(),
        });
    }
    if values.len() > g || positions.iter().any(|&p| p >= g) {
        return Err(Error::GridTooSmall {
            signal_len: values.len(),
            grid_size: g,
        });
    }

    // Observed record on the grid, zero elsewhere.
    let mut y = vec![0.0; g];
    for (&p, &v) in positions.iter().zip(values) {
        y[p] = v;
    }

    // Initial threshold: peak magnitude of the zero-filled spectrum.
    let mut buf: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft(&mut buf);
    let beta = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);

    let mut est = vec![0.0; g];
    let mut spectrum = vec![Complex::new(0.0, 0.0); g];
    for k in 0..params.iterations {
        // Re-impose the observed samples on the current estimate.
        let mut r = est.clone();
        for &p in positions {
            r[p] = y[p];
        }
        let mut x: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft(&mut x);
        let tau = beta * (-params.alpha * k as f64).exp();
        for c in x.iter_mut() {
            if c.norm() < tau {
                *c = Complex::new(0.0, 0.0);
            }
        }
        spectrum = x.clone();
        ifft(&mut x);
        for (e, c) in est.iter_mut().zip(&x) {
            *e = c.re;
        }
    }
    Ok(spectrum)
}

/// One-sided magnitude spectrum of an analysis window: the mean-removed
/// samples occupy the head of the grid and the remainder is treated as
/// unobserved.
pub fn imat_spectrum(window: &[f64], params: ImatParams) -> Result<Vec<f64>> {
    if window.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if window.len() > params.grid_size {
        return Err(Error::GridTooSmall {
            signal_len: window.len(),
            grid_size: params.grid_size,
        });
    }
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let values: Vec<f64> = window.iter().map(|v| v - mean).collect();
    let positions: Vec<usize> = (0..window.len()).collect();
    let full = imat_reconstruct(&values, &positions, params)?;
    Ok(full[..params.grid_size / 2].iter().map(|c| c.norm()).collect())
}

/// Indices of the non-zero coefficients in the lower half of a spectrum.
pub fn support(spectrum: &[Complex<f64>]) -> Vec<usize> {
    spectrum[..spectrum.len() / 2]
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, _)| i)
        .collect()
}
