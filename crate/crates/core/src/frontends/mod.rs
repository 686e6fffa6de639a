//! Spectral front ends: gammatone excitation pattern, short-time Fourier
//! magnitude and Mel filterbank.

mod gammatone;
mod mel;
mod stft;

pub use gammatone::{gammatone_ep, GammatoneChannel, ENVELOPE_CUTOFF_HZ, GAMMATONE_ORDER};
pub use mel::{mel_filterbank, mel_spectrum};
pub use stft::{fft_power, hamming, stft_spectrum};
