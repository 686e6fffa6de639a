//! Linear 4th-order gammatone filterbank on an ERB_N-number grid.
//!
//! Each channel is implemented as a baseband cascade: the input is
//! heterodyned down by the channel center frequency, passed through four
//! identical complex one-pole low-pass stages and shifted back up. The
//! impulse response of the cascade is t^3 exp(-2 pi b t) cos(2 pi fc t).

use rayon::prelude::*;

use crate::axis::{erb_bandwidth, AxisKind, FrequencyAxis};
use crate::error::{Error, Result};
use crate::spectrum::{Compression, Spectrogram};

pub const GAMMATONE_ORDER: usize = 4;
/// Bandwidth factor relating the 4th-order gammatone to the ERB.
const BANDWIDTH_FACTOR: f64 = 1.019;
/// Cutoff of the envelope smoothing low-pass.
pub const ENVELOPE_CUTOFF_HZ: f64 = 1000.0;

#[derive(Debug, Clone)]
pub struct GammatoneChannel {
    center_hz: f64,
    fs: f64,
    pole: f64,
}

impl GammatoneChannel {
    pub fn new(center_hz: f64, fs: f64) -> Self {
        let b = BANDWIDTH_FACTOR * erb_bandwidth(center_hz);
        let pole = (-2.0 * std::f64::consts::PI * b / fs).exp();
        Self { center_hz, fs, pole }
    }

    pub fn center_hz(&self) -> f64 {
        self.center_hz
    }

    /// Filters `x`, with unit gain at the center frequency.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let tau = std::f64::consts::TAU;
        let a = self.pole;
        let g = 1.0 - a;
        let cycles_per_sample = self.center_hz / self.fs;
        let mut re = [0.0f64; GAMMATONE_ORDER];
        let mut im = [0.0f64; GAMMATONE_ORDER];
        x.iter()
            .enumerate()
            .map(|(n, &v)| {
                // phase reduced modulo one cycle before scaling keeps precision on long inputs
                let theta = tau * (n as f64 * cycles_per_sample).fract();
                let (s, c) = theta.sin_cos();
                let (mut zr, mut zi) = (v * c, -v * s);
                for k in 0..GAMMATONE_ORDER {
                    re[k] = g * zr + a * re[k];
                    im[k] = g * zi + a * im[k];
                    zr = re[k];
                    zi = im[k];
                }
                2.0 * (zr * c - zi * s)
            })
            .collect()
    }
}

/// Second-order Butterworth low-pass (bilinear transform).
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
}

impl Biquad {
    fn lowpass(cutoff: f64, fs: f64) -> Self {
        let k = (std::f64::consts::PI * cutoff / fs).tan();
        let q = std::f64::consts::FRAC_1_SQRT_2;
        let norm = 1.0 / (1.0 + k / q + k * k);
        let b0 = k * k * norm;
        Self {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm],
        }
    }

    fn run(&self, x: &mut [f64]) {
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for v in x.iter_mut() {
            let y = self.b[0] * *v + self.b[1] * x1 + self.b[2] * x2 - self.a[0] * y1 - self.a[1] * y2;
            x2 = x1;
            x1 = *v;
            y2 = y1;
            y1 = y;
            *v = y;
        }
    }
}

/// Excitation-pattern spectrogram: gammatone filtering, half-wave
/// rectification, 1 kHz envelope smoothing, then a mean per frame.
pub fn gammatone_ep(signal: &[f64], fs: f64, axis: &FrequencyAxis, frame_period: f64) -> Result<Spectrogram> {
    if axis.kind() != AxisKind::ErbLinear {
        return Err(Error::Config(format!("gammatone analysis needs an ERB axis, got {}", axis.kind())));
    }
    if !(fs >= 2.0 * axis.f_hi()) {
        return Err(Error::Config(format!(
            "sample rate {fs} Hz is too low for channels up to {} Hz",
            axis.f_hi()
        )));
    }
    if signal.is_empty() {
        return Err(Error::Input("empty signal".into()));
    }
    let frame_len = (frame_period * fs).round() as usize;
    if frame_len == 0 {
        return Err(Error::Config(format!("frame period {frame_period} s is shorter than one sample")));
    }
    let n_frames = signal.len() / frame_len;
    if n_frames == 0 {
        return Err(Error::Input(format!(
            "signal of {} samples is shorter than one {frame_len}-sample frame",
            signal.len()
        )));
    }
    let smoother = Biquad::lowpass(ENVELOPE_CUTOFF_HZ, fs);
    let columns: Vec<Vec<f64>> = axis
        .centers()
        .into_par_iter()
        .map(|fc| {
            let mut y = GammatoneChannel::new(fc, fs).filter(signal);
            y.iter_mut().for_each(|v| *v = v.max(0.0));
            smoother.run(&mut y);
            y.chunks_exact(frame_len)
                .map(|f| (f.iter().sum::<f64>() / frame_len as f64).max(0.0))
                .collect()
        })
        .collect();
    let frames = (0..n_frames)
        .map(|k| columns.iter().map(|col| col[k]).collect())
        .collect();
    let period = frame_len as f64 / fs;
    Spectrogram::new(frames, period, 0.5 * period, *axis, Compression::None)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 48_000.0;

    fn tone(f: f64, secs: f64) -> Vec<f64> {
        let n = (secs * FS) as usize;
        (0..n).map(|i| (std::f64::consts::TAU * f * i as f64 / FS).sin()).collect()
    }

    fn steady_mean(sg: &Spectrogram) -> Vec<f64> {
        // skip the first 20 ms of filter onset
        let skip = (0.02 / sg.frame_period()) as usize;
        let rows = &sg.frames()[skip..];
        let n = rows.len() as f64;
        (0..sg.axis().channels()).map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / n).collect()
    }

    fn argmax(v: &[f64]) -> usize {
        v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b })
    }

    #[test]
    fn unit_gain_at_center_frequency() {
        let ch = GammatoneChannel::new(1000.0, FS);
        let y = ch.filter(&tone(1000.0, 0.2));
        let peak = y[4800..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 1.0).abs() < 2e-3, "peak {peak}");
    }

    #[test]
    fn tone_tuning() {
        let axis = FrequencyAxis::canonical_erb();
        for c in [5, 17, 30, 42, 55, 63, 71, 80, 88, 95] {
            let sg = gammatone_ep(&tone(axis.center_freq(c), 0.1), FS, &axis, 0.0005).unwrap();
            assert_eq!(argmax(&steady_mean(&sg)), c, "probe channel {c}");
            // single frames only settle once the envelope smoother removes the carrier
            if axis.center_freq(c) > 2000.0 {
                assert!(sg.frames()[40..].iter().all(|r| argmax(r) == c), "frames at channel {c}");
            }
        }
    }

    #[test]
    fn scaling_input_scales_output() {
        let axis = FrequencyAxis::canonical_erb();
        let x: Vec<f64> = tone(440.0, 0.05).iter().zip(tone(1770.0, 0.05)).map(|(a, b)| a + 0.3 * b).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = gammatone_ep(&x, FS, &axis, 0.0005).unwrap();
        let b = gammatone_ep(&x2, FS, &axis, 0.0005).unwrap();
        for (ra, rb) in a.frames().iter().zip(b.frames()) {
            for (va, vb) in ra.iter().zip(rb) {
                assert!((vb - 2.0 * va).abs() <= 1e-6 * vb.abs().max(1e-12));
            }
        }
    }

    #[test]
    fn resolved_harmonics_of_pulse_train() {
        let axis = FrequencyAxis::canonical_erb();
        let period = FS / 182.0;
        let n = (0.2 * FS) as usize;
        let mut x = vec![0.0; n];
        let mut t: f64 = 0.0;
        while (t as usize) < n {
            x[t.round() as usize % n] = 1.0;
            t += period;
        }
        let ep = steady_mean(&gammatone_ep(&x, FS, &axis, 0.0005).unwrap());
        for h in 1..=3 {
            let c = axis.nearest_channel(182.0 * h as f64);
            assert!(
                ep[c] > ep[c - 1] && ep[c] > ep[c + 1],
                "harmonic {h}: expected a local maximum at channel {c}, got {:?}",
                &ep[c - 1..=c + 1]
            );
        }
    }

    #[test]
    fn configuration_errors() {
        let axis = FrequencyAxis::canonical_erb();
        assert!(matches!(gammatone_ep(&[1.0; 100], 8000.0, &axis, 0.0005), Err(Error::Config(_))));
        assert!(matches!(gammatone_ep(&[], FS, &axis, 0.0005), Err(Error::Input(_))));
        let log = FrequencyAxis::canonical_log10();
        assert!(matches!(gammatone_ep(&[1.0; 100], FS, &log, 0.0005), Err(Error::Config(_))));
    }
}
