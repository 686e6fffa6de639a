//! Vocal tract length estimation from vowel spectra.
//!
//! Spectra of the same vowel from several speakers are placed on a
//! log-like frequency axis, where a change in vocal tract length shows up
//! as a translation. Pairwise cross-correlation measures the translations
//! and a fitted coefficient turns them into lengths. An F0-adaptive
//! weight suppresses the resolved harmonics that otherwise dominate the
//! low-frequency part of the spectrum and bias the alignment.
//!
//! The crate is organised by stage:
//!
//! - [`axis`], [`spectrum`], [`frontends`]: frequency grids and the
//!   excitation-pattern, Fourier and Mel front ends.
//! - [`ssi`]: the weight and a simple F0 estimator.
//! - [`vtl`]: shift matrix, relative shifts, `q` fit and length estimates.
//! - [`synth`], [`corpus`]: synthetic vowels with known tract lengths.
//! - [`pipeline`], [`eval`]: representations, corpus evaluation, sweeps.
//! - [`cli`]: the `ssi-vtl` command-line front end.

pub mod axis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod frontends;
pub mod io;
pub mod pipeline;
pub mod spectrum;
pub mod ssi;
pub mod synth;
pub mod vtl;

pub use axis::{make_axis, AxisKind, FrequencyAxis};
pub use error::{Error, Result};
pub use pipeline::{synthetic_utterances, AnalysisParams, F0Source, FrontEnd, Representation, Utterance, UtteranceSource};
pub use spectrum::{Compression, Spectrogram, Spectrum};
pub use ssi::{SsiParams, Voicing};
pub use synth::{Vowel, VowelSpec};
pub use vtl::{ShiftMatrix, VtlEstimate};
