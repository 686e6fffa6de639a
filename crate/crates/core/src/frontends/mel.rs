use crate::axis::{hz_to_mel, mel_to_hz, AxisKind, FrequencyAxis};
use crate::error::{Error, Result};
use crate::spectrum::{Compression, Spectrogram};

/// Triangular filters with unit peak, centers equally spaced in mel from
/// `f_lo` to `f_hi` inclusive. Each triangle is linear in Hz and reaches
/// zero at the neighbouring centers.
///
/// Returns `n_filters` rows of weights over the bins of `bins`.
pub fn mel_filterbank(bins: &FrequencyAxis, n_filters: usize, f_lo: f64, f_hi: f64) -> Result<Vec<Vec<f64>>> {
    let mel_axis = FrequencyAxis::new(AxisKind::MelLinear, n_filters, f_lo, f_hi)?;
    let step = mel_axis.spacing();
    let lower_edge = mel_to_hz(hz_to_mel(f_lo) - step);
    let upper_edge = mel_to_hz(hz_to_mel(f_hi) + step);
    if lower_edge <= 0.0 || upper_edge > bins.f_hi() {
        return Err(Error::Config(format!(
            "mel filter edges [{lower_edge:.1}, {upper_edge:.1}] Hz fall outside the bin range"
        )));
    }
    let mut edges = Vec::with_capacity(n_filters + 2);
    edges.push(lower_edge);
    edges.extend(mel_axis.centers());
    edges.push(upper_edge);
    let freqs = bins.centers();
    Ok((0..n_filters)
        .map(|k| {
            let (l, c, r) = (edges[k], edges[k + 1], edges[k + 2]);
            freqs
                .iter()
                .map(|&f| {
                    if f <= l || f >= r {
                        0.0
                    } else if f <= c {
                        (f - l) / (c - l)
                    } else {
                        (r - f) / (r - c)
                    }
                })
                .collect()
        })
        .collect())
}

/// Applies a Mel filterbank to an uncompressed linear-Hz magnitude spectrogram.
pub fn mel_spectrum(stft: &Spectrogram, n_filters: usize, f_lo: f64, f_hi: f64) -> Result<Spectrogram> {
    if stft.axis().kind() != AxisKind::LinearHz {
        return Err(Error::Input(format!(
            "mel analysis expects a linear-Hz spectrogram, got a {} axis",
            stft.axis().kind()
        )));
    }
    if stft.compression() != Compression::None {
        return Err(Error::Input("mel analysis expects an uncompressed spectrogram".into()));
    }
    let bank = mel_filterbank(stft.axis(), n_filters, f_lo, f_hi)?;
    let frames = stft
        .frames()
        .iter()
        .map(|row| bank.iter().map(|w| w.iter().zip(row).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let axis = FrequencyAxis::new(AxisKind::MelLinear, n_filters, f_lo, f_hi)?;
    Spectrogram::new(frames, stft.frame_period(), stft.frame_center(0), axis, Compression::None)
}
