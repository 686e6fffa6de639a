use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::axis::{AxisKind, FrequencyAxis};
use crate::error::{Error, Result};
use crate::spectrum::{Compression, Spectrogram};

/// Symmetric Hamming window, 0.54 - 0.46 cos(2 pi n / (N - 1)).
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let d = (n - 1) as f64;
    (0..n)
        .map(|i| 0.54 - 0.46 * (std::f64::consts::TAU * i as f64 / d).cos())
        .collect()
}

/// Squared magnitudes of the full `nfft`-point DFT of a zero-padded frame.
pub fn fft_power(frame: &[f64], nfft: usize) -> Vec<f64> {
    let fft = FftPlanner::new().plan_fft_forward(nfft);
    spectrum_of(&*fft, frame, nfft).iter().map(|c| c.norm_sqr()).collect()
}

fn spectrum_of(fft: &dyn Fft<f64>, frame: &[f64], nfft: usize) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = frame.iter().map(|v| Complex::new(*v, 0.0)).collect();
    buf.resize(nfft, Complex::new(0.0, 0.0));
    fft.process(&mut buf);
    buf
}

/// Hamming-windowed magnitude spectrogram on a linear-Hz bin axis.
///
/// Frames start every `hop` seconds; each is zero-padded to the next
/// power of two. Values are raw (unnormalized) DFT magnitudes for bins
/// 0 ..= nfft/2.
pub fn stft_spectrum(signal: &[f64], fs: f64, window_len: f64, hop: f64) -> Result<Spectrogram> {
    let win = (window_len * fs).round() as usize;
    let hop_n = (hop * fs).round() as usize;
    if win < 2 || hop_n == 0 {
        return Err(Error::Config(format!(
            "window {window_len} s / hop {hop} s too short at {fs} Hz"
        )));
    }
    if signal.len() < win {
        return Err(Error::Input(format!(
            "signal of {} samples is shorter than the {win}-sample analysis window",
            signal.len()
        )));
    }
    let nfft = win.next_power_of_two();
    let window = hamming(win);
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(nfft);
    let n_frames = 1 + (signal.len() - win) / hop_n;
    let frames = (0..n_frames)
        .map(|k| {
            let seg: Vec<f64> = signal[k * hop_n..k * hop_n + win]
                .iter()
                .zip(&window)
                .map(|(x, w)| x * w)
                .collect();
            spectrum_of(&*fft, &seg, nfft)[..=nfft / 2].iter().map(|c| c.norm()).collect()
        })
        .collect();
    let axis = FrequencyAxis::new(AxisKind::LinearHz, nfft / 2 + 1, 0.0, fs / 2.0)?;
    Spectrogram::new(frames, hop_n as f64 / fs, 0.5 * win as f64 / fs, axis, Compression::None)
}
