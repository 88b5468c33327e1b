//! Causal heart-rate tracking from wrist PPG during physical exercise.
//!
//! The pipeline removes motion artifacts from two PPG channels using
//! reference components extracted from 3-axis acceleration via singular
//! spectrum analysis, estimates a high-resolution sparse spectrum of the
//! cleansed signals, and tracks the heart-rate peak across overlapping
//! windows with a harmonic peak-selection rule.

pub mod anc;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod preprocess;
pub mod signal_model;
pub mod spectrum;
pub mod ssa;
pub mod synth;
pub mod tracker;

pub use error::Error;
pub use signal_model::{AnalysisWindow, RecordingSession, SampledSignal, TrackerConfig};
