//! Harmonic peak-selection tracking over the per-window sparse spectra.
//!
//! Window 0 initialises the fundamental at the strongest in-band bin of
//! either channel. Later windows search three bands around the previous
//! fundamental and its second and third harmonics in both channels and
//! pick the new fundamental by a three-stage rule: a single dominant peak,
//! then a consistent harmonic pair, then a fallback that re-estimates the
//! spectra from the previous window extended with the newest samples and
//! averages every candidate fundamental.

use crate::anc;
use crate::error::Result;
use crate::preprocess::Bandpass;
use crate::signal_model::{
    make_windows, AnalysisWindow, RecordingSession, TrackerConfig,
};
use crate::spectrum::{imat_spectrum, ImatParams};
use crate::ssa;
use std::time::Instant;

/// How a window's estimate was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionCase {
    /// First window: global in-band maximum.
    Init,
    /// One peak dominates all others.
    Dominant,
    /// Two peaks agree on the fundamental.
    HarmonicPair,
    /// Fallback using spectra of the history-extended windows.
    History,
}

/// Result of tracking one session.
#[derive(Debug, Clone)]
pub struct TrackOutput {
    pub estimates_bpm: Vec<f64>,
    pub cases: Vec<SelectionCase>,
    /// Mean wall-clock seconds spent per window.
    pub seconds_per_window: f64,
    /// One-sided magnitude spectra per window and channel, kept only on
    /// request.
    pub spectra: Option<Vec<[Vec<f64>; 2]>>,
}

struct Peak {
    bin: usize,
    mag: f64,
    harmonic: usize,
}

fn clamp_range(lo: i64, hi: i64, half: usize) -> (usize, usize) {
    let lo = lo.max(0) as usize;
    let hi = (hi.max(0) as usize).min(half.saturating_sub(1));
    (lo, hi)
}

/// The three search ranges (in bins) around the previous fundamental.
fn search_ranges(n_prev: usize, cfg: &TrackerConfig, half: usize) -> [(usize, usize); 3] {
    let n = n_prev as i64;
    [
        clamp_range(n - cfg.eps1_bins as i64, n + cfg.eps1_bins as i64, half),
        clamp_range(2 * n - cfg.eps2_bins as i64, 2 * n + cfg.eps2_bins as i64, half),
        clamp_range(3 * n - cfg.eps3_bins as i64, 3 * n + cfg.eps3_bins as i64, half),
    ]
}

/// Strongest bin inside each range; ties break toward the lower bin, and
/// a range that collapses past the grid end reports its lower bound with
/// zero magnitude.
fn range_peaks(spec: &[f64], ranges: &[(usize, usize); 3]) -> Vec<Peak> {
    ranges
        .iter()
        .enumerate()
        .map(|(h, &(a, b))| {
            if a > b {
                return Peak {
                    bin: a,
                    mag: 0.0,
                    harmonic: h + 1,
                };
            }
            let mut best = a;
            for i in a + 1..=b {
                if spec[i] > spec[best] {
                    best = i;
                }
            }
            Peak {
                bin: best,
                mag: spec[best],
                harmonic: h + 1,
            }
        })
        .collect()
}

fn round_half_up(x: f64) -> usize {
    (x + 1e-9).round().max(0.0) as usize
}

/// Peak selection over the six candidates of the current window.
/// `history_fallback` supplies six more candidates when neither a dominant
/// peak nor a consistent pair exists.
fn select<F>(
    peaks: &[Peak],
    cfg: &TrackerConfig,
    history_fallback: F,
) -> Result<(usize, SelectionCase)>
where
    F: FnOnce() -> Result<Vec<Peak>>,
{
    debug_assert_eq!(peaks.len(), 6);
    // Case 1: a single peak dominates every other even after scaling by T.
    let dominant: Vec<usize> = (0..6)
        .filter(|&i| {
            (0..6)
                .filter(|&j| j != i)
                .all(|j| peaks[i].mag * cfg.t_threshold > peaks[j].mag)
        })
        .collect();
    if dominant.len() == 1 {
        let p = &peaks[dominant[0]];
        return Ok((
            round_half_up(p.bin as f64 / p.harmonic as f64),
            SelectionCase::Dominant,
        ));
    }

    // Case 2: the strongest pair whose implied fundamentals agree.
    let fundamental = |p: &Peak| p.bin as f64 / p.harmonic as f64;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..6 {
        for j in i + 1..6 {
            let fi = fundamental(&peaks[i]);
            let fj = fundamental(&peaks[j]);
            if (fi - fj).abs() < cfg.delta_bins {
                let score = peaks[i].mag + peaks[j].mag;
                if best.is_none_or(|(s, _)| score > s) {
                    best = Some((score, (fi + fj) / 2.0));
                }
            }
        }
    }
    if let Some((_, f)) = best {
        return Ok((round_half_up(f), SelectionCase::HarmonicPair));
    }

    // Case 3: average every candidate fundamental, including those of the
    // history-extended spectra.
    let extra = history_fallback()?;
    let sum: f64 = peaks.iter().chain(&extra).map(fundamental).sum();
    let count = (peaks.len() + extra.len()) as f64;
    Ok((round_half_up(sum / count), SelectionCase::History))
}

/// The full per-session pipeline.
pub struct Tracker {
    cfg: TrackerConfig,
    sample_rate_hz: f64,
    bandpass: Bandpass,
    imat: ImatParams,
    band_bins: (usize, usize),
}

impl Tracker {
    pub fn new(cfg: TrackerConfig, sample_rate_hz: f64) -> Result<Self> {
        cfg.validate(sample_rate_hz)?;
        let bandpass = Bandpass::new(cfg.band_low_hz, cfg.band_high_hz, sample_rate_hz)?;
        let imat = ImatParams::new(cfg.grid_size, cfg.imat_iters, cfg.imat_alpha);
        let bin_hz = cfg.bin_hz(sample_rate_hz);
        let band_bins = (
            (cfg.band_low_hz / bin_hz).ceil() as usize,
            (cfg.band_high_hz / bin_hz).floor() as usize,
        );
        Ok(Self {
            cfg,
            sample_rate_hz,
            bandpass,
            imat,
            band_bins,
        })
    }

    pub fn bin_to_bpm(&self, bin: usize) -> f64 {
        bin as f64 * self.cfg.bin_hz(self.sample_rate_hz) * 60.0
    }

    /// Clean one window: band-pass every channel, extract references,
    /// cancel them from both PPG channels.
    fn clean_window(&self, w: &AnalysisWindow) -> Result<[Vec<f64>; 2]> {
        let p1 = self.bandpass.apply(&w.ppg1.samples);
        let p2 = self.bandpass.apply(&w.ppg2.samples);
        let ax = self.bandpass.apply(&w.accel_x.samples);
        let ay = self.bandpass.apply(&w.accel_y.samples);
        let az = self.bandpass.apply(&w.accel_z.samples);
        let refs = ssa::extract_references([&ax, &ay, &az], &self.cfg, self.sample_rate_hz)?;
        let series: Vec<Vec<f64>> = refs.into_iter().map(|r| r.series).collect();
        Ok([
            anc::cascade(&p1, &series, &self.cfg, &self.bandpass),
            anc::cascade(&p2, &series, &self.cfg, &self.bandpass),
        ])
    }

    fn spectra(&self, cleaned: &[Vec<f64>; 2]) -> Result<[Vec<f64>; 2]> {
        Ok([
            imat_spectrum(&cleaned[0], self.imat)?,
            imat_spectrum(&cleaned[1], self.imat)?,
        ])
    }

    /// Six candidates from the history-extended windows: the previous
    /// cleaned window followed by the newest samples of the current one.
    fn history_peaks(
        &self,
        prev: &[Vec<f64>; 2],
        cur: &[Vec<f64>; 2],
        ranges: &[(usize, usize); 3],
    ) -> Result<Vec<Peak>> {
        let stride = self.cfg.stride_samples(self.sample_rate_hz);
        let mut out = Vec::with_capacity(6);
        for ch in 0..2 {
            let mut cat = prev[ch].clone();
            if self.cfg.case3_tail_concat {
                let tail = cur[ch].len().saturating_sub(stride);
                cat.extend_from_slice(&cur[ch][tail..]);
            } else {
                cat.extend_from_slice(&cur[ch]);
            }
            let spec = imat_spectrum(&cat, self.imat)?;
            out.extend(range_peaks(&spec, ranges));
        }
        Ok(out)
    }

    /// Track a whole session causally, one window at a time.
    pub fn track(&self, session: &RecordingSession, dump_spectra: bool) -> Result<TrackOutput> {
        let windows = make_windows(session, &self.cfg)?;
        let half = self.cfg.grid_size / 2;
        let (band_lo, band_hi) = self.band_bins;

        let mut estimates = Vec::with_capacity(windows.len());
        let mut cases = Vec::with_capacity(windows.len());
        let mut kept_spectra = dump_spectra.then(Vec::new);
        let mut n_prev: usize = 0;
        let mut prev_clean: Option<[Vec<f64>; 2]> = None;
        let mut total = 0.0;

        for w in &windows {
            let t0 = Instant::now();
            let cleaned = self.clean_window(w)?;
            let specs = self.spectra(&cleaned)?;

            let (n_cur, case) = if w.index == 0 {
                // Global in-band maximum over both channels.
                let argmax = |s: &[f64]| {
                    let mut best = band_lo;
                    for i in band_lo..=band_hi.min(half - 1) {
                        if s[i] > s[best] {
                            best = i;
                        }
                    }
                    best
                };
                let m1 = argmax(&specs[0]);
                let m2 = argmax(&specs[1]);
                let n = if specs[0][m1] >= specs[1][m2] { m1 } else { m2 };
                (n, SelectionCase::Init)
            } else {
                let ranges = search_ranges(n_prev, &self.cfg, half);
                let mut peaks = range_peaks(&specs[0], &ranges);
                peaks.extend(range_peaks(&specs[1], &ranges));
                let prev = prev_clean.as_ref().expect("windows after the first");
                select(&peaks, &self.cfg, || {
                    self.history_peaks(prev, &cleaned, &ranges)
                })?
            };

            let n_cur = n_cur.clamp(band_lo, band_hi);
            total += t0.elapsed().as_secs_f64();

            estimates.push(self.bin_to_bpm(n_cur));
            cases.push(case);
            if let Some(kept) = kept_spectra.as_mut() {
                kept.push(specs);
            }
            n_prev = n_cur;
            prev_clean = Some(cleaned);
        }

        Ok(TrackOutput {
            seconds_per_window: total / estimates.len().max(1) as f64,
            estimates_bpm: estimates,
            cases,
            spectra: kept_spectra,
        })
    }
}
