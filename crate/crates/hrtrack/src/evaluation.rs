//! Tracking accuracy metrics.

use crate::error::{Error, Result};

/// Summary of one evaluated session.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Average absolute error, BPM.
    pub aae: f64,
    /// Average absolute error percentage relative to the truth.
    pub aep: f64,
    /// Variance of the signed error.
    pub ev: f64,
    /// Pearson correlation between estimate and truth.
    pub pc: f64,
    /// Average seconds of processing per window.
    pub astpf: f64,
}

fn check_lengths(est: &[f64], truth: &[f64]) -> Result<()> {
    if est.len() != truth.len() || est.is_empty() {
        return Err(Error::LengthMismatch {
            left: est.len(),
            right: truth.len(),
        });
    }
    Ok(())
}

/// Average absolute error in BPM.
pub fn aae(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_lengths(est, truth)?;
    Ok(est
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs())
        .sum::<f64>()
        / est.len() as f64)
}

/// Average absolute error as a percentage of the truth.
pub fn aep(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_lengths(est, truth)?;
    Ok(est
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs() / t)
        .sum::<f64>()
        / est.len() as f64
        * 100.0)
}

/// Variance of the signed error; population variance by default, the
/// unbiased sample variance when `sample` is set.
pub fn error_variance(est: &[f64], truth: &[f64], sample: bool) -> Result<f64> {
    check_lengths(est, truth)?;
    let n = est.len() as f64;
    let errs: Vec<f64> = est.iter().zip(truth).map(|(e, t)| e - t).collect();
    let mean = errs.iter().sum::<f64>() / n;
    let ss: f64 = errs.iter().map(|x| (x - mean).powi(2)).sum();
    let denom = if sample { (n - 1.0).max(1.0) } else { n };
    Ok(ss / denom)
}

/// Pearson correlation coefficient. A constant truth makes the
/// correlation undefined; a perfect reproduction of it still scores 1,
/// anything else is an error.
pub fn pearson(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_lengths(est, truth)?;
    let n = est.len() as f64;
    let me = est.iter().sum::<f64>() / n;
    let mt = truth.iter().sum::<f64>() / n;
    let mut se = 0.0;
    let mut st = 0.0;
    let mut cov = 0.0;
    for (e, t) in est.iter().zip(truth) {
        se += (e - me).powi(2);
        st += (t - mt).powi(2);
        cov += (e - me) * (t - mt);
    }
    if st == 0.0 {
        if est == truth {
            return Ok(1.0);
        }
        return Err(Error::DegenerateTruth);
    }
    if se == 0.0 {
        return Err(Error::DegenerateTruth);
    }
    Ok(cov / (se * st).sqrt())
}

/// All metrics at once. `seconds_per_window` is reported through as ASTPF.
pub fn compute_metrics(
    est: &[f64],
    truth: &[f64],
    seconds_per_window: f64,
    sample_variance: bool,
) -> Result<Metrics> {
    Ok(Metrics {
        aae: aae(est, truth)?,
        aep: aep(est, truth)?,
        ev: error_variance(est, truth, sample_variance)?,
        pc: pearson(est, truth)?,
        astpf: seconds_per_window,
    })
}
