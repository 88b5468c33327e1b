//! File formats: recording sessions, ground truth, configuration overrides
//! and synthetic profile specifications.
//!
//! All formats are line-oriented text. `#` starts a comment; blank lines
//! are ignored. A session file carries its sample rate in a
//! `# sample_rate_hz = <value>` comment before the header row.

use crate::error::{Error, Result};
use crate::signal_model::{RecordingSession, SampledSignal, TrackerConfig};
use crate::synth::MaTone;
use std::fmt::Write as _;
use std::path::Path;

const SESSION_HEADER: [&str; 5] = ["ppg1", "ppg2", "acc_x", "acc_y", "acc_z"];

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        path: path.display().to_string(),
        line,
        column,
        message: message.into(),
    }
}

fn parse_float(path: &Path, line_no: usize, col: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line_no, col, format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line_no, col, "non-finite value"));
    }
    Ok(v)
}

/// Parse a session from text. Exposed separately from [`load_session`]
/// so untrusted input can be exercised without touching the filesystem.
pub fn parse_session(text: &str, path: &Path) -> Result<RecordingSession> {
    let mut sample_rate: Option<f64> = None;
    let mut session_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "session".into());
    let mut header_seen = false;
    let mut cols: [Vec<f64>; 5] = Default::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "sample_rate_hz" => {
                        sample_rate = Some(parse_float(path, line_no, 1, value)?);
                    }
                    "session_id" => session_id = value.trim().to_string(),
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if !header_seen {
            let names: Vec<String> =
                fields.iter().map(|f| f.trim().to_ascii_lowercase()).collect();
            if names != SESSION_HEADER {
                return Err(Error::ColumnMismatch {
                    path: path.display().to_string(),
                    expected: SESSION_HEADER.join(","),
                    got: names.join(","),
                });
            }
            header_seen = true;
            continue;
        }
        if fields.len() != 5 {
            return Err(parse_err(
                path,
                line_no,
                1,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        for (c, field) in fields.iter().enumerate() {
            cols[c].push(parse_float(path, line_no, c + 1, field)?);
        }
    }

    if !header_seen {
        return Err(Error::ColumnMismatch {
            path: path.display().to_string(),
            expected: SESSION_HEADER.join(","),
            got: String::new(),
        });
    }
    let fs = sample_rate.ok_or_else(|| Error::RateMissing(path.display().to_string()))?;
    if fs <= 0.0 {
        return Err(parse_err(path, 1, 1, "sample rate must be positive"));
    }
    let [p1, p2, ax, ay, az] = cols;
    Ok(RecordingSession {
        ppg1: SampledSignal::new(p1, fs),
        ppg2: SampledSignal::new(p2, fs),
        accel_x: SampledSignal::new(ax, fs),
        accel_y: SampledSignal::new(ay, fs),
        accel_z: SampledSignal::new(az, fs),
        truth_bpm: None,
        session_id,
    })
}

pub fn load_session(path: &Path) -> Result<RecordingSession> {
    parse_session(&read_to_string(path)?, path)
}

/// Parse a ground-truth file: one BPM value per line, with an optional
/// `bpm` header.
pub fn parse_truth(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if out.is_empty() && line.eq_ignore_ascii_case("bpm") {
            continue;
        }
        let v = parse_float(path, idx + 1, 1, line)?;
        if v <= 0.0 {
            return Err(parse_err(path, idx + 1, 1, "truth BPM must be positive"));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn load_truth(path: &Path) -> Result<Vec<f64>> {
    parse_truth(&read_to_string(path)?, path)
}

/// Apply `key = value` overrides to a configuration.
pub fn parse_config(text: &str, base: TrackerConfig) -> Result<TrackerConfig> {
    let mut cfg = base;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::BadConfig(format!("line {}: expected key = value", idx + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let bad =
            |what: &str| Error::BadConfig(format!("line {}: {key}: {what}: {value:?}", idx + 1));
        let as_f64 = || value.parse::<f64>().map_err(|_| bad("not a number"));
        let as_usize = || value.parse::<usize>().map_err(|_| bad("not an integer"));
        let as_bool = || value.parse::<bool>().map_err(|_| bad("not a boolean"));
        match key {
            "window_len_s" => cfg.window_len_s = as_f64()?,
            "stride_s" => cfg.stride_s = as_f64()?,
            "band_low_hz" => cfg.band_low_hz = as_f64()?,
            "band_high_hz" => cfg.band_high_hz = as_f64()?,
            "ssa_d" => cfg.ssa_d = as_usize()?,
            "ssa_embed_len" => cfg.ssa_embed_len = as_usize()?,
            "ssa_sigma_floor" => cfg.ssa_sigma_floor = as_f64()?,
            "n_refs" => cfg.n_refs = as_usize()?,
            "lms_order" => cfg.lms_order = as_usize()?,
            "lms_mu" => cfg.lms_mu = as_f64()?,
            "lms_passes" => cfg.lms_passes = as_usize()?,
            "imat_iters" => cfg.imat_iters = as_usize()?,
            "imat_alpha" => cfg.imat_alpha = as_f64()?,
            "grid_size" => cfg.grid_size = as_usize()?,
            "t_threshold" => cfg.t_threshold = as_f64()?,
            "delta_bins" => cfg.delta_bins = as_f64()?,
            "eps1_bins" => cfg.eps1_bins = as_usize()?,
            "eps2_bins" => cfg.eps2_bins = as_usize()?,
            "eps3_bins" => cfg.eps3_bins = as_usize()?,
            "case3_tail_concat" => cfg.case3_tail_concat = as_bool()?,
            "sample_variance" => cfg.sample_variance = as_bool()?,
            _ => return Err(Error::BadConfig(format!("unknown key: {key}"))),
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path, base: TrackerConfig) -> Result<TrackerConfig> {
    parse_config(&read_to_string(path)?, base)
}

/// Parse a heart-rate profile specification: comma-separated segments of
/// the form `const:<bpm>:<windows>` or `ramp:<from>:<to>:<windows>`.
pub fn parse_profile(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for seg in spec.split(',') {
        let parts: Vec<&str> = seg.trim().split(':').collect();
        let bad = |what: &str| Error::BadProfile(format!("{seg:?}: {what}"));
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(bad("values must be positive"));
            }
            Ok(v)
        };
        let count = |s: &str| -> Result<usize> {
            let v: usize = s.trim().parse().map_err(|_| bad("window count must be a positive integer"))?;
            if v == 0 {
                return Err(bad("window count must be a positive integer"));
            }
            Ok(v)
        };
        match parts.as_slice() {
            ["const", bpm, windows] => {
                let bpm = num(bpm)?;
                out.extend(std::iter::repeat_n(bpm, count(windows)?));
            }
            ["ramp", from, to, windows] => {
                let (from, to) = (num(from)?, num(to)?);
                let w = count(windows)?;
                out.extend(crate::synth::ramp_profile(from, to, w));
            }
            _ => return Err(bad("expected const:<bpm>:<windows> or ramp:<from>:<to>:<windows>")),
        }
    }
    if out.is_empty() {
        return Err(Error::BadProfile("empty profile".into()));
    }
    Ok(out)
}

/// Parse a motion-artifact tone list: comma-separated
/// `<freq_hz>:<amplitude>[:<phase>]` entries.
pub fn parse_tones(spec: &str) -> Result<Vec<MaTone>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|seg| {
            let parts: Vec<&str> = seg.trim().split(':').collect();
            let bad = |what: &str| Error::BadProfile(format!("tone {seg:?}: {what}"));
            let num = |s: &str| -> Result<f64> {
                let v: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
                if !v.is_finite() {
                    return Err(bad("non-finite value"));
                }
                Ok(v)
            };
            match parts.as_slice() {
                [f, a] => Ok(MaTone {
                    freq_hz: num(f)?,
                    amplitude: num(a)?,
                    phase: 0.0,
                }),
                [f, a, p] => Ok(MaTone {
                    freq_hz: num(f)?,
                    amplitude: num(a)?,
                    phase: num(p)?,
                }),
                _ => Err(bad("expected freq:amplitude[:phase]")),
            }
        })
        .collect()
}

/// Serialize a session in the format accepted by [`parse_session`].
pub fn format_session(session: &RecordingSession) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sample_rate_hz = {}", session.sample_rate_hz());
    let _ = writeln!(out, "# session_id = {}", session.session_id);
    let _ = writeln!(out, "{}", SESSION_HEADER.join(","));
    let chans = session.channels();
    for i in 0..session.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            chans[0].samples[i],
            chans[1].samples[i],
            chans[2].samples[i],
            chans[3].samples[i],
            chans[4].samples[i]
        );
    }
    out
}

pub fn format_truth(truth: &[f64]) -> String {
    let mut out = String::from("bpm\n");
    for v in truth {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Per-window tracking results as CSV.
pub fn format_estimates(estimates_bpm: &[f64], cases: &[crate::tracker::SelectionCase]) -> String {
    let mut out = String::from("window,bpm,case\n");
    for (i, (bpm, case)) in estimates_bpm.iter().zip(cases).enumerate() {
        let _ = writeln!(out, "{i},{bpm:.4},{case:?}");
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
