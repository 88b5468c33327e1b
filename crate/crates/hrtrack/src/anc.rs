//! Adaptive noise cancellation: cascaded LMS filters driven by the SSA
//! motion references.
//!
//! Each reference feeds one LMS stage; the stage output is the residual
//! after the filter's best linear prediction of the reference content is
//! removed. Stages run back to back so every reference is cancelled in
//! turn. Filter weights start from zero for every window; an extra
//! adaptation pass warm-starts the weights so the beginning of the window
//! is filtered by converged coefficients.

use crate::preprocess::Bandpass;
use crate::signal_model::TrackerConfig;

/// Weight magnitude beyond which a stage is considered diverged and is
/// bypassed for the window.
const DIVERGENCE_BOUND: f64 = 1e6;
/// References below this peak amplitude carry no usable information.
const MIN_REF_AMPLITUDE: f64 = 1e-12;

/// Run one LMS stage: adapt an FIR filter of length `order` that predicts
/// `desired` from `reference`, returning the prediction error (the cleaned
/// signal). The first `passes - 1` passes only warm-start the weights;
/// the returned residual comes from the final pass. A silent reference or
/// a diverging filter leaves the input untouched.
pub fn lms_cancel(
    desired: &[f64],
    reference: &[f64],
    order: usize,
    mu: f64,
    passes: usize,
) -> Vec<f64> {
    debug_assert_eq!(desired.len(), reference.len());
    let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak < MIN_REF_AMPLITUDE {
        return desired.to_vec();
    }
    let mut w = vec![0.0; order];
    let mut err = vec![0.0; desired.len()];
    for _ in 0..passes.max(1) {
        let mut buf = vec![0.0; order];
        for n in 0..desired.len() {
            buf.rotate_right(1);
            buf[0] = reference[n];
            let pred: f64 = w.iter().zip(&buf).map(|(a, b)| a * b).sum();
            let e = desired[n] - pred;
            err[n] = e;
            for (wi, bi) in w.iter_mut().zip(&buf) {
                *wi += mu * e * bi;
            }
            if w.iter().any(|v| v.abs() > DIVERGENCE_BOUND) {
                return desired.to_vec();
            }
        }
    }
    err
}

/// Cascade one LMS stage per reference over a PPG window, then band-limit
/// the residual again: the adapting weights inject a slow wander below the
/// analysis band that would otherwise dominate the sparse spectrum.
pub fn cascade(
    ppg: &[f64],
    references: &[Vec<f64>],
    cfg: &TrackerConfig,
    bandpass: &Bandpass,
) -> Vec<f64> {
    let mut out = ppg.to_vec();
    for r in references {
        out = lms_cancel(&out, r, cfg.lms_order, cfg.lms_mu, cfg.lms_passes);
    }
    bandpass.apply(&out)
}
