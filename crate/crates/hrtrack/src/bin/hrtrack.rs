//! Command-line interface for the heart-rate tracker.

use clap::{Args, Parser, Subcommand};
use hrtrack::evaluation::{self, Metrics};
use hrtrack::io;
use hrtrack::synth::{synthesize, SynthParams};
use hrtrack::tracker::Tracker;
use hrtrack::{Error, RecordingSession, TrackerConfig};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hrtrack",
    version,
    about = "Heart-rate tracking from wrist PPG with accelerometer-based artifact cancellation"
)]
struct Cli {
    /// Worker threads for parallel work (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Configuration override file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Track heart rate through one or more recorded sessions.
    Track {
        #[command(flatten)]
        common: CommonOpts,
        /// Session CSV file(s).
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Write per-window estimates as CSV (single input only).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-window spectrum dumps.
        #[arg(long)]
        dump_spectra: Option<PathBuf>,
    },
    /// Track sessions and score them against ground truth.
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        /// Session CSV file(s).
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Matching ground-truth file(s), one per input.
        #[arg(long, required = true, num_args = 1..)]
        truth: Vec<PathBuf>,
        /// Write per-session metrics as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one session across several reference-count settings.
    SweepN {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Comma-separated reference counts to sweep.
        #[arg(long, value_delimiter = ',', default_value = "3,10,30,100")]
        n_refs: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic session with known ground truth.
    Synth {
        #[command(flatten)]
        common: CommonOpts,
        /// Heart-rate profile, e.g. "const:120:29" or "ramp:80:160:87".
        #[arg(long)]
        profile: String,
        /// Motion-artifact tones, e.g. "0.9:3.0:0.3,3.1:3.0:1.1".
        #[arg(long, default_value = "")]
        tones: String,
        #[arg(long, default_value_t = 20.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output session CSV.
        #[arg(long)]
        out: PathBuf,
        /// Output ground-truth CSV.
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
}

fn load_config(common: &CommonOpts) -> Result<TrackerConfig, Error> {
    match &common.config {
        Some(path) => io::load_config(path, TrackerConfig::default()),
        None => Ok(TrackerConfig::default()),
    }
}

fn dump_spectra(
    dir: &Path,
    session: &RecordingSession,
    cfg: &TrackerConfig,
    spectra: &[[Vec<f64>; 2]],
) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let bin_hz = cfg.bin_hz(session.sample_rate_hz());
    // Keep the region the tracker actually inspects: up to the third
    // harmonic of the band plus the widest search margin.
    let top = ((3.0 * cfg.band_high_hz / bin_hz) as usize + cfg.eps3_bins)
        .min(cfg.grid_size / 2 - 1);
    for (w, chans) in spectra.iter().enumerate() {
        let mut text = String::from("bin,hz,ch1,ch2\n");
        for (b, (c0, c1)) in chans[0].iter().zip(&chans[1]).take(top + 1).enumerate() {
            use std::fmt::Write as _;
            let _ = writeln!(text, "{b},{:.6},{c0:.8},{c1:.8}", b as f64 * bin_hz);
        }
        io::write_file(&dir.join(format!("window_{w:04}.csv")), &text)?;
    }
    Ok(())
}

fn print_metrics(label: &str, m: &Metrics) {
    println!(
        "{label}: AAE={:.3} BPM  AEP={:.3}%  EV={:.3}  PC={:.4}  ASTPF={:.3}s",
        m.aae, m.aep, m.ev, m.pc, m.astpf
    );
}

fn eval_one(
    input: &Path,
    truth_path: &Path,
    cfg: &TrackerConfig,
) -> Result<(String, Metrics), Error> {
    let session = io::load_session(input)?;
    let truth = io::load_truth(truth_path)?;
    let tracker = Tracker::new(cfg.clone(), session.sample_rate_hz())?;
    let out = tracker.track(&session, false)?;
    // Report a NaN correlation instead of failing the whole run when the
    // truth (or estimate) is constant and the correlation is undefined.
    let pc = match evaluation::pearson(&out.estimates_bpm, &truth) {
        Ok(pc) => pc,
        Err(Error::DegenerateTruth) => f64::NAN,
        Err(e) => return Err(e),
    };
    let metrics = Metrics {
        aae: evaluation::aae(&out.estimates_bpm, &truth)?,
        aep: evaluation::aep(&out.estimates_bpm, &truth)?,
        ev: evaluation::error_variance(&out.estimates_bpm, &truth, cfg.sample_variance)?,
        pc,
        astpf: out.seconds_per_window,
    };
    Ok((session.session_id, metrics))
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Error::BadConfig(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Track {
            common,
            input,
            out,
            dump_spectra: dump_dir,
        } => {
            let cfg = load_config(&common)?;
            if input.len() > 1 && (out.is_some() || dump_dir.is_some()) {
                return Err(Error::BadConfig(
                    "--out and --dump-spectra require a single --input".into(),
                ));
            }
            let results: Vec<Result<(), Error>> = input
                .par_iter()
                .map(|path| {
                    let session = io::load_session(path)?;
                    let tracker = Tracker::new(cfg.clone(), session.sample_rate_hz())?;
                    let res = tracker.track(&session, dump_dir.is_some())?;
                    if let Some(dir) = &dump_dir {
                        dump_spectra(dir, &session, &cfg, res.spectra.as_ref().unwrap())?;
                    }
                    let text = io::format_estimates(&res.estimates_bpm, &res.cases);
                    match &out {
                        Some(path) => io::write_file(path, &text)?,
                        None => print!("{text}"),
                    }
                    eprintln!(
                        "{}: {} windows, {:.3} s/window",
                        session.session_id,
                        res.estimates_bpm.len(),
                        res.seconds_per_window
                    );
                    Ok(())
                })
                .collect();
            results.into_iter().collect::<Result<(), Error>>()?;
        }
        Command::Eval {
            common,
            input,
            truth,
            out,
        } => {
            let cfg = load_config(&common)?;
            if input.len() != truth.len() {
                return Err(Error::BadConfig(format!(
                    "{} inputs but {} truth files",
                    input.len(),
                    truth.len()
                )));
            }
            let results: Vec<(String, Metrics)> = input
                .par_iter()
                .zip(&truth)
                .map(|(i, t)| eval_one(i, t, &cfg))
                .collect::<Result<_, _>>()?;
            let mut csv = String::from("session,aae,aep,ev,pc,astpf\n");
            for (id, m) in &results {
                print_metrics(id, m);
                use std::fmt::Write as _;
                let _ = writeln!(
                    csv,
                    "{id},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    m.aae, m.aep, m.ev, m.pc, m.astpf
                );
            }
            if results.len() > 1 {
                let mean = |f: fn(&Metrics) -> f64| {
                    results.iter().map(|(_, m)| f(m)).sum::<f64>() / results.len() as f64
                };
                println!(
                    "mean: AAE={:.3} BPM  AEP={:.3}%  ASTPF={:.3}s",
                    mean(|m| m.aae),
                    mean(|m| m.aep),
                    mean(|m| m.astpf)
                );
            }
            if let Some(path) = out {
                io::write_file(&path, &csv)?;
            }
        }
        Command::SweepN {
            common,
            input,
            truth,
            n_refs,
            out,
        } => {
            let base = load_config(&common)?;
            let results: Vec<(usize, Metrics)> = n_refs
                .par_iter()
                .map(|&n| {
                    let mut cfg = base.clone();
                    cfg.n_refs = n;
                    eval_one(&input, &truth, &cfg).map(|(_, m)| (n, m))
                })
                .collect::<Result<_, _>>()?;
            let mut csv = String::from("n_refs,aae,aep,ev,pc,astpf\n");
            for (n, m) in &results {
                print_metrics(&format!("n_refs={n}"), m);
                use std::fmt::Write as _;
                let _ = writeln!(
                    csv,
                    "{n},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    m.aae, m.aep, m.ev, m.pc, m.astpf
                );
            }
            if let Some(path) = out {
                io::write_file(&path, &csv)?;
            }
        }
        Command::Synth {
            common,
            profile,
            tones,
            snr_db,
            seed,
            out,
            truth_out,
        } => {
            let cfg = load_config(&common)?;
            let profile = io::parse_profile(&profile)?;
            let tones = io::parse_tones(&tones)?;
            let params = SynthParams {
                snr_db,
                seed,
                ..SynthParams::default()
            };
            let session = synthesize(&profile, &tones, &params, &cfg);
            io::write_file(&out, &io::format_session(&session))?;
            if let Some(path) = truth_out {
                io::write_file(&path, &io::format_truth(&profile))?;
            }
            eprintln!(
                "wrote {} samples ({} windows) to {}",
                session.len(),
                profile.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
