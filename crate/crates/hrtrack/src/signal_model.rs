//! Core data types and windowing shared by the whole pipeline.

use crate::error::{Error, Result};

/// A uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Self {
        debug_assert!(sample_rate_hz > 0.0);
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            (self.energy() / self.samples.len() as f64).sqrt()
        }
    }
}

/// One synchronized recording: two PPG channels, three acceleration axes,
/// and optional per-window ground-truth BPM.
#[derive(Debug, Clone)]
pub struct RecordingSession {
    pub ppg1: SampledSignal,
    pub ppg2: SampledSignal,
    pub accel_x: SampledSignal,
    pub accel_y: SampledSignal,
    pub accel_z: SampledSignal,
    pub truth_bpm: Option<Vec<f64>>,
    pub session_id: String,
}

impl RecordingSession {
    pub fn sample_rate_hz(&self) -> f64 {
        self.ppg1.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.ppg1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ppg1.is_empty()
    }

    pub fn channels(&self) -> [&SampledSignal; 5] {
        [
            &self.ppg1,
            &self.ppg2,
            &self.accel_x,
            &self.accel_y,
            &self.accel_z,
        ]
    }
}

/// One analysis window: aligned slices of all five channels.
#[derive(Debug, Clone)]
pub struct AnalysisWindow {
    pub index: usize,
    pub start_sample: usize,
    pub ppg1: SampledSignal,
    pub ppg2: SampledSignal,
    pub accel_x: SampledSignal,
    pub accel_y: SampledSignal,
    pub accel_z: SampledSignal,
}

/// All tunable parameters of the tracker.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub window_len_s: f64,
    pub stride_s: f64,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// Number of singular triples retained per acceleration channel.
    pub ssa_d: usize,
    /// SSA embedding length; 0 selects round(window_samples / 2).
    pub ssa_embed_len: usize,
    /// Maximum number of motion-artifact reference components.
    pub n_refs: usize,
    /// Discard singular triples whose singular value falls below this
    /// fraction of the per-channel maximum.
    pub ssa_sigma_floor: f64,
    pub lms_order: usize,
    pub lms_mu: f64,
    /// Adaptation passes per window; the first pass only warm-starts the
    /// filter weights.
    pub lms_passes: usize,
    pub imat_iters: usize,
    pub imat_alpha: f64,
    pub grid_size: usize,
    /// Dominance threshold of the Case-1 peak test, in (0, 1).
    pub t_threshold: f64,
    /// Harmonic pairing tolerance of the Case-2 test, in bins.
    pub delta_bins: f64,
    pub eps1_bins: usize,
    pub eps2_bins: usize,
    pub eps3_bins: usize,
    /// Case-3 concatenation: previous window plus the non-overlapping tail
    /// of the current window (10 s at defaults) when true; full 16 s
    /// back-to-back concatenation when false.
    pub case3_tail_concat: bool,
    /// Use sample variance instead of population variance for EV.
    pub sample_variance: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            window_len_s: 8.0,
            stride_s: 2.0,
            band_low_hz: 0.4,
            band_high_hz: 5.0,
            ssa_d: 100,
            ssa_embed_len: 0,
            n_refs: 100,
            ssa_sigma_floor: 0.1,
            lms_order: 25,
            lms_mu: 0.005,
            lms_passes: 2,
            imat_iters: 5,
            imat_alpha: 0.1,
            grid_size: 16384,
            t_threshold: 0.6,
            delta_bins: 9.0,
            eps1_bins: 60,
            eps2_bins: 80,
            eps3_bins: 100,
            case3_tail_concat: true,
            sample_variance: false,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if !(self.t_threshold > 0.0 && self.t_threshold < 1.0) {
            return Err(Error::BadConfig(format!(
                "T must be in (0,1), got {}",
                self.t_threshold
            )));
        }
        if !(self.band_low_hz > 0.0
            && self.band_low_hz < self.band_high_hz
            && self.band_high_hz < sample_rate_hz / 2.0)
        {
            return Err(Error::InvalidBand {
                low_hz: self.band_low_hz,
                high_hz: self.band_high_hz,
                sample_rate_hz,
            });
        }
        if self.window_len_s <= 0.0
            || self.stride_s <= 0.0
            || self.ssa_d == 0
            || self.n_refs == 0
            || self.lms_order == 0
            || self.lms_mu <= 0.0
            || self.lms_passes == 0
            || self.imat_iters == 0
            || self.grid_size == 0
        {
            return Err(Error::BadConfig(
                "all counts and step sizes must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn window_samples(&self, sample_rate_hz: f64) -> usize {
        (self.window_len_s * sample_rate_hz).round() as usize
    }

    pub fn stride_samples(&self, sample_rate_hz: f64) -> usize {
        (self.stride_s * sample_rate_hz).round() as usize
    }

    /// Frequency resolution of the spectral grid.
    pub fn bin_hz(&self, sample_rate_hz: f64) -> f64 {
        sample_rate_hz / self.grid_size as f64
    }
}

/// Number of windows that fit a session of `n` samples.
pub fn window_count(n: usize, win_len: usize, stride: usize) -> usize {
    if n < win_len {
        0
    } else {
        (n - win_len) / stride + 1
    }
}

/// Slice a session into overlapping causal analysis windows.
pub fn make_windows(
    session: &RecordingSession,
    cfg: &TrackerConfig,
) -> Result<Vec<AnalysisWindow>> {
    let fs = session.sample_rate_hz();
    let win_len = cfg.window_samples(fs);
    let stride = cfg.stride_samples(fs);
    let n = session.len();
    if n < win_len {
        return Err(Error::SessionTooShort {
            samples: n,
            required: win_len,
        });
    }
    let count = window_count(n, win_len, stride);
    let slice = |sig: &SampledSignal, start: usize| {
        SampledSignal::new(sig.samples[start..start + win_len].to_vec(), fs)
    };
    Ok((0..count)
        .map(|i| {
            let start = i * stride;
            AnalysisWindow {
                index: i,
                start_sample: start,
                ppg1: slice(&session.ppg1, start),
                ppg2: slice(&session.ppg2, start),
                accel_x: slice(&session.accel_x, start),
                accel_y: slice(&session.accel_y, start),
                accel_z: slice(&session.accel_z, start),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(n: usize, fs: f64) -> RecordingSession {
        let sig = || SampledSignal::new(vec![0.0; n], fs);
        RecordingSession {
            ppg1: SampledSignal::new((0..n).map(|i| i as f64).collect(), fs),
            ppg2: sig(),
            accel_x: sig(),
            accel_y: sig(),
            accel_z: sig(),
            truth_bpm: None,
            session_id: "test".into(),
        }
    }

    #[test]
    fn window_count_64s_at_125hz() {
        // floor((8000 - 1000) / 250) + 1 = 29
        let s = session(8000, 125.0);
        let wins = make_windows(&s, &TrackerConfig::default()).unwrap();
        assert_eq!(wins.len(), 29);
        for (i, w) in wins.iter().enumerate() {
            assert_eq!(w.start_sample, i * 250);
            assert_eq!(w.ppg1.len(), 1000);
            // window samples are exact views of the session
            assert_eq!(w.ppg1.samples[0], (i * 250) as f64);
            assert_eq!(w.ppg1.samples[999], (i * 250 + 999) as f64);
        }
    }

    #[test]
    fn exactly_one_window_at_boundary() {
        let s = session(1000, 125.0);
        let wins = make_windows(&s, &TrackerConfig::default()).unwrap();
        assert_eq!(wins.len(), 1);
        assert_eq!(wins[0].start_sample, 0);
    }

    #[test]
    fn too_short_session_errors() {
        let s = session(987, 125.0); // 7.9 s at 125 Hz
        match make_windows(&s, &TrackerConfig::default()) {
            Err(Error::SessionTooShort { samples, required }) => {
                assert_eq!(samples, 987);
                assert_eq!(required, 1000);
            }
            other => panic!("expected SessionTooShort, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrackerConfig::default();
        assert!(cfg.validate(125.0).is_ok());
        cfg.t_threshold = 1.5;
        assert!(cfg.validate(125.0).is_err());
        let cfg = TrackerConfig {
            band_high_hz: 100.0, // above Nyquist at 125 Hz
            ..TrackerConfig::default()
        };
        assert!(matches!(cfg.validate(125.0), Err(Error::InvalidBand { .. })));
    }
}
