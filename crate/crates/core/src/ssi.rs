//! F0-adaptive spectral weight.
//!
//! Channels below `h_max * f0` are attenuated in proportion to their
//! center frequency:
//!
//! ```text
//! w(f_p, f0) = min(f_p / (h_max * f0), 1)
//! ```
//!
//! which suppresses the resolved low-order harmonics of the source while
//! leaving the formant region intact. An `f0` of zero (unvoiced, or
//! unknown) yields unit weight everywhere.

use serde::{Deserialize, Serialize};

use crate::axis::FrequencyAxis;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

pub const DEFAULT_HMAX: f64 = 3.5;

/// F0 search range and voicing threshold of [`estimate_f0`].
pub const F0_MIN_HZ: f64 = 60.0;
pub const F0_MAX_HZ: f64 = 400.0;
pub const VOICING_THRESHOLD: f64 = 0.3;
const F0_SEGMENT_SECS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsiParams {
    h_max: f64,
    f0: f64,
}

impl SsiParams {
    pub fn new(h_max: f64, f0: f64) -> Result<Self> {
        if !(h_max > 0.0) || !h_max.is_finite() {
            return Err(Error::Config(format!("h_max must be > 0, got {h_max}")));
        }
        if !(f0 >= 0.0) || !f0.is_finite() {
            return Err(Error::Config(format!("f0 must be >= 0 Hz, got {f0}")));
        }
        Ok(Self { h_max, f0 })
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    /// Frequency at and above which the weight saturates at one.
    pub fn knee_hz(&self) -> f64 {
        self.h_max * self.f0
    }

    pub fn weight_at(&self, f_p: f64) -> f64 {
        if self.f0 == 0.0 {
            return 1.0;
        }
        (f_p / self.knee_hz()).min(1.0)
    }
}

/// Per-channel weight on `axis`.
pub fn ssi_weight(axis: &FrequencyAxis, params: SsiParams) -> Vec<f64> {
    axis.centers().into_iter().map(|f| params.weight_at(f)).collect()
}

/// Shifts `s` so its minimum is zero, then multiplies by `w` element-wise.
///
/// The shift keeps dB-valued spectra from being pushed *up* by weights
/// below one.
pub fn apply_weight(s: &Spectrum, w: &[f64]) -> Result<Spectrum> {
    if w.len() != s.values().len() {
        return Err(Error::Input(format!(
            "weight has {} entries but the spectrum has {} channels",
            w.len(),
            s.values().len()
        )));
    }
    let floor = s.values().iter().copied().fold(f64::INFINITY, f64::min);
    let values = s.values().iter().zip(w).map(|(v, w)| (v - floor) * w).collect();
    Spectrum::new(values, *s.axis(), s.compression())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Voicing {
    Voiced(f64),
    Unvoiced,
}

impl Voicing {
    /// F0 in Hz, with zero standing for unvoiced.
    pub fn f0_or_zero(self) -> f64 {
        match self {
            Voicing::Voiced(f) => f,
            Voicing::Unvoiced => 0.0,
        }
    }
}

/// Autocorrelation F0 estimate over the central 50 ms of `signal`.
///
/// The normalized autocorrelation is searched over lags for 60-400 Hz.
/// The shortest lag whose local peak reaches 90% of the global maximum is
/// taken, which avoids octave-down errors on strongly periodic input, and
/// refined by parabolic interpolation.
pub fn estimate_f0(signal: &[f64], fs: f64) -> Result<Voicing> {
    let seg_len = (F0_SEGMENT_SECS * fs).round() as usize;
    if signal.len() < seg_len {
        return Err(Error::Input(format!(
            "F0 estimation needs at least {F0_SEGMENT_SECS} s ({seg_len} samples), got {}",
            signal.len()
        )));
    }
    let start = (signal.len() - seg_len) / 2;
    let seg = &signal[start..start + seg_len];
    let mean = seg.iter().sum::<f64>() / seg_len as f64;
    let x: Vec<f64> = seg.iter().map(|v| v - mean).collect();

    let min_lag = (fs / F0_MAX_HZ).floor().max(1.0) as usize;
    let max_lag = ((fs / F0_MIN_HZ).ceil() as usize).min(seg_len / 2);
    let r = normalized_autocorr(&x, min_lag - 1, max_lag + 1);
    let at = |lag: usize| r[lag - (min_lag - 1)];

    let best = (min_lag..=max_lag).map(at).fold(f64::NEG_INFINITY, f64::max);
    if !(best >= VOICING_THRESHOLD) {
        return Ok(Voicing::Unvoiced);
    }
    let lag = (min_lag..=max_lag)
        .find(|&l| at(l) >= 0.9 * best && at(l) >= at(l - 1) && at(l) >= at(l + 1))
        .expect("global maximum satisfies the peak condition");
    let (a, b, c) = (at(lag - 1), at(lag), at(lag + 1));
    let denom = a - 2.0 * b + c;
    let offset = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    Ok(Voicing::Voiced(fs / (lag as f64 + offset)))
}

/// r(lag) for lag in `lo..=hi`, normalized by the energies of the overlapping parts.
fn normalized_autocorr(x: &[f64], lo: usize, hi: usize) -> Vec<f64> {
    let n = x.len();
    (lo..=hi)
        .map(|lag| {
            let (a, b) = (&x[..n - lag], &x[lag..]);
            let num: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            let ea: f64 = a.iter().map(|v| v * v).sum();
            let eb: f64 = b.iter().map(|v| v * v).sum();
            if ea > 0.0 && eb > 0.0 {
                num / (ea * eb).sqrt()
            } else {
                0.0
            }
        })
        .collect()
}
