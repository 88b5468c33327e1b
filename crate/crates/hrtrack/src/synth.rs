//! Deterministic synthetic session generator.
//!
//! The PPG carrier is a unit-amplitude fundamental plus a 0.3-amplitude
//! second harmonic whose instantaneous frequency follows a per-window
//! heart-rate profile. Motion artifacts are shared sinusoidal tones mixed
//! into both PPG channels and all three acceleration axes with bounded
//! random gain and phase jitter, faded in after an onset delay so the
//! first analysis window is artifact-free. White noise completes both
//! modalities.

use crate::signal_model::{RecordingSession, SampledSignal, TrackerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One motion-artifact tone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaTone {
    pub freq_hz: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Generator parameters.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub sample_rate_hz: f64,
    pub snr_db: f64,
    pub seed: u64,
    /// Artifacts are silent before this time...
    pub onset_s: f64,
    /// ...then fade in linearly over this long.
    pub ramp_s: f64,
    /// Artifact amplitude scale on the acceleration channels.
    pub accel_gain: f64,
    pub accel_noise_std: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            sample_rate_hz: 125.0,
            snr_db: 20.0,
            seed: 0,
            onset_s: 8.0,
            ramp_s: 4.0,
            accel_gain: 0.4,
            accel_noise_std: 0.02,
        }
    }
}

/// One standard normal draw via the Box-Muller transform.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generate a session whose window-aligned heart rate follows
/// `profile_bpm` under the windowing of `cfg`. The profile values become
/// the session's ground truth.
pub fn synthesize(
    profile_bpm: &[f64],
    tones: &[MaTone],
    params: &SynthParams,
    cfg: &TrackerConfig,
) -> RecordingSession {
    let fs = params.sample_rate_hz;
    let nw = profile_bpm.len();
    let n = (((nw.saturating_sub(1)) as f64 * cfg.stride_s + cfg.window_len_s) * fs) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // Instantaneous frequency: linear interpolation between window centres.
    let centers: Vec<f64> = (0..nw)
        .map(|i| i as f64 * cfg.stride_s + cfg.window_len_s / 2.0)
        .collect();
    let freq_at = |t: f64| -> f64 {
        if t <= centers[0] {
            return profile_bpm[0] / 60.0;
        }
        if t >= centers[nw - 1] {
            return profile_bpm[nw - 1] / 60.0;
        }
        let i = centers.partition_point(|&c| c <= t) - 1;
        let frac = (t - centers[i]) / (centers[i + 1] - centers[i]);
        (profile_bpm[i] + frac * (profile_bpm[i + 1] - profile_bpm[i])) / 60.0
    };

    let mut phase = 0.0;
    let mut ppg = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / fs;
        phase += 2.0 * std::f64::consts::PI * freq_at(t) / fs;
        ppg.push(phase.sin() + 0.3 * (2.0 * phase).sin());
    }
    let sig_pow = ppg.iter().map(|v| v * v).sum::<f64>() / n as f64;

    let ramp = |t: f64| ((t - params.onset_s) / params.ramp_s).clamp(0.0, 1.0);

    let mut ch = [ppg.clone(), ppg];
    let mut acc = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for tone in tones {
        for target in ch.iter_mut() {
            let g: f64 = rng.gen_range(0.8..1.2);
            let jitter: f64 = rng.gen_range(0.0..0.5);
            for (i, v) in target.iter_mut().enumerate() {
                let t = i as f64 / fs;
                *v += ramp(t)
                    * tone.amplitude
                    * g
                    * (2.0 * std::f64::consts::PI * tone.freq_hz * t + tone.phase + jitter)
                        .sin();
            }
        }
        for target in acc.iter_mut() {
            let g: f64 = params.accel_gain * rng.gen_range(0.8..1.2);
            let jitter: f64 = rng.gen_range(0.0..0.5);
            for (i, v) in target.iter_mut().enumerate() {
                let t = i as f64 / fs;
                *v += ramp(t)
                    * g
                    * (2.0 * std::f64::consts::PI * tone.freq_hz * t + tone.phase + jitter)
                        .sin();
            }
        }
    }

    let noise_std = (sig_pow / 10f64.powf(params.snr_db / 10.0)).sqrt();
    for target in ch.iter_mut() {
        for v in target.iter_mut() {
            *v += noise_std * gauss(&mut rng);
        }
    }
    for target in acc.iter_mut() {
        for v in target.iter_mut() {
            *v += params.accel_noise_std * gauss(&mut rng);
        }
    }

    let [p1, p2] = ch;
    let [ax, ay, az] = acc;
    RecordingSession {
        ppg1: SampledSignal::new(p1, fs),
        ppg2: SampledSignal::new(p2, fs),
        accel_x: SampledSignal::new(ax, fs),
        accel_y: SampledSignal::new(ay, fs),
        accel_z: SampledSignal::new(az, fs),
        truth_bpm: Some(profile_bpm.to_vec()),
        session_id: format!("synth-{}", params.seed),
    }
}

/// A linearly spaced profile from `start` to `end` over `windows` windows.
pub fn ramp_profile(start: f64, end: f64, windows: usize) -> Vec<f64> {
    if windows <= 1 {
        return vec![start; windows];
    }
    (0..windows)
        .map(|i| start + (end - start) * i as f64 / (windows - 1) as f64)
        .collect()
}
