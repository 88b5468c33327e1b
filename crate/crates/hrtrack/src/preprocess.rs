//! Zero-phase Butterworth band-pass preprocessing.
//!
//! The band-pass is realised as an order-5 high-pass followed by an order-5
//! low-pass, each designed by the bilinear transform and applied
//! forward-backward (zero phase) with symmetric edge padding and
//! steady-state initial conditions so that edge transients do not leak
//! into the analysis windows.

use crate::error::{Error, Result};

/// One second-order section in direct form II transposed.
/// First-order sections are represented with `b2 == a2 == 0`.
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// DC gain of the section.
    fn gain_at_dc(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// Complex gain magnitude at normalized angular frequency `w` (rad/sample).
    fn gain_at(&self, w: f64) -> f64 {
        let (re1, im1) = (w.cos(), -w.sin());
        let (re2, im2) = ((2.0 * w).cos(), -(2.0 * w).sin());
        let num_re = self.b0 + self.b1 * re1 + self.b2 * re2;
        let num_im = self.b1 * im1 + self.b2 * im2;
        let den_re = 1.0 + self.a1 * re1 + self.a2 * re2;
        let den_im = self.a1 * im1 + self.a2 * im2;
        (num_re.hypot(num_im)) / (den_re.hypot(den_im))
    }

    /// Steady-state filter state for a unit step input.
    fn step_state(&self) -> (f64, f64) {
        let h = self.gain_at_dc();
        let s2 = self.b2 - self.a2 * h;
        let s1 = self.b1 + self.b2 - (self.a1 + self.a2) * h;
        (s1, s2)
    }
}

/// A cascade of second-order sections.
#[derive(Debug, Clone)]
pub struct SosFilter {
    pub sections: Vec<Biquad>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    LowPass,
    HighPass,
}

/// Butterworth analog prototype poles for the given order (left half-plane).
fn prototype_poles(order: usize) -> Vec<(f64, f64)> {
    (1..=order)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k + order - 1) as f64
                / (2 * order) as f64;
            (theta.cos(), theta.sin())
        })
        .collect()
}

fn design(order: usize, cutoff_hz: f64, sample_rate_hz: f64, kind: Kind) -> Result<SosFilter> {
    if !(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0) {
        return Err(Error::InvalidBand {
            low_hz: cutoff_hz,
            high_hz: cutoff_hz,
            sample_rate_hz,
        });
    }
    // Pre-warped analog cutoff for the bilinear transform.
    let fs2 = 2.0 * sample_rate_hz;
    let wc = fs2 * (std::f64::consts::PI * cutoff_hz / sample_rate_hz).tan();

    let mut sections = Vec::new();
    let proto = prototype_poles(order);
    let mut i = 0;
    while i < proto.len() {
        let (pr, pi) = proto[i];
        // Frequency transform of the analog prototype pole.
        let (sr, si) = match kind {
            Kind::LowPass => (wc * pr, wc * pi),
            Kind::HighPass => {
                // wc / p
                let d = pr * pr + pi * pi;
                (wc * pr / d, -wc * pi / d)
            }
        };
        if si.abs() < 1e-12 {
            // Real pole: first-order section via bilinear transform.
            let zp = (fs2 + sr) / (fs2 - sr);
            let (b0, b1) = match kind {
                Kind::LowPass => (1.0, 1.0),   // zero at z = -1
                Kind::HighPass => (1.0, -1.0), // zero at z = +1
            };
            sections.push(Biquad {
                b0,
                b1,
                b2: 0.0,
                a1: -zp,
                a2: 0.0,
            });
            i += 1;
        } else {
            // Conjugate pole pair: one biquad.
            // z = (fs2 + s) / (fs2 - s)
            let den_re = fs2 - sr;
            let den_im = -si;
            let num_re = fs2 + sr;
            let num_im = si;
            let d = den_re * den_re + den_im * den_im;
            let zr = (num_re * den_re + num_im * den_im) / d;
            let zi = (num_im * den_re - num_re * den_im) / d;
            let (b0, b1, b2) = match kind {
                Kind::LowPass => (1.0, 2.0, 1.0),   // double zero at z = -1
                Kind::HighPass => (1.0, -2.0, 1.0), // double zero at z = +1
            };
            sections.push(Biquad {
                b0,
                b1,
                b2,
                a1: -2.0 * zr,
                a2: zr * zr + zi * zi,
            });
            // Skip the conjugate partner.
            i += 2;
        }
    }

    // Normalize the overall gain to unity at the pass-band reference
    // frequency: DC for low-pass, Nyquist for high-pass.
    let mut filter = SosFilter { sections };
    let w_ref = match kind {
        Kind::LowPass => 0.0,
        Kind::HighPass => std::f64::consts::PI,
    };
    let g: f64 = filter
        .sections
        .iter()
        .map(|s| s.gain_at(w_ref))
        .product();
    let first = &mut filter.sections[0];
    first.b0 /= g;
    first.b1 /= g;
    first.b2 /= g;
    Ok(filter)
}

/// Order-5 Butterworth low-pass.
pub fn butter_lowpass(cutoff_hz: f64, sample_rate_hz: f64) -> Result<SosFilter> {
    design(5, cutoff_hz, sample_rate_hz, Kind::LowPass)
}

/// Order-5 Butterworth high-pass.
pub fn butter_highpass(cutoff_hz: f64, sample_rate_hz: f64) -> Result<SosFilter> {
    design(5, cutoff_hz, sample_rate_hz, Kind::HighPass)
}

/// Single-pass causal filtering with given per-section initial states.
fn sos_filter(filter: &SosFilter, x: &[f64], zi_scale: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut scale = zi_scale;
    for sec in &filter.sections {
        let (s1_unit, s2_unit) = sec.step_state();
        let mut s1 = s1_unit * scale;
        let mut s2 = s2_unit * scale;
        for v in y.iter_mut() {
            let x_n = *v;
            let y_n = sec.b0 * x_n + s1;
            s1 = sec.b1 * x_n - sec.a1 * y_n + s2;
            s2 = sec.b2 * x_n - sec.a2 * y_n;
            *v = y_n;
        }
        // The steady-state input level of the next section is this
        // section's DC gain times the current level.
        scale *= sec.gain_at_dc();
    }
    y
}

/// Symmetric (even) edge extension, mirroring about the edge samples
/// without repeating them.
fn even_ext(x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    debug_assert!(pad < n);
    let mut out = Vec::with_capacity(n + 2 * pad);
    out.extend((1..=pad).rev().map(|i| x[i]));
    out.extend_from_slice(x);
    out.extend((1..=pad).map(|i| x[n - 1 - i]));
    out
}

/// Forward-backward (zero-phase) application of an SOS cascade with
/// symmetric edge padding and steady-state initial conditions.
pub fn filtfilt(filter: &SosFilter, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let pad = 300.min(n - 1);
    let ext = even_ext(x, pad);

    let fwd = sos_filter(filter, &ext, ext[0]);
    let mut rev: Vec<f64> = fwd.into_iter().rev().collect();
    let first = rev[0];
    rev = sos_filter(filter, &rev, first);
    rev.reverse();
    rev[pad..pad + n].to_vec()
}

/// Zero-phase band-pass: order-5 high-pass at `low_hz` followed by an
/// order-5 low-pass at `high_hz`.
pub struct Bandpass {
    hp: SosFilter,
    lp: SosFilter,
}

impl Bandpass {
    pub fn new(low_hz: f64, high_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        if low_hz >= high_hz {
            return Err(Error::InvalidBand {
                low_hz,
                high_hz,
                sample_rate_hz,
            });
        }
        Ok(Self {
            hp: butter_highpass(low_hz, sample_rate_hz)?,
            lp: butter_lowpass(high_hz, sample_rate_hz)?,
        })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        filtfilt(&self.lp, &filtfilt(&self.hp, x))
    }
}
