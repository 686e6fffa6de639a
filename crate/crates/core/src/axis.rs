//! Frequency axes: channel index <-> center frequency.
//!
//! Every warped axis places its channels uniformly in a "native"
//! coordinate (ERB_N-number, log10 Hz, mel) between two endpoint
//! frequencies. `LinearHz` describes FFT bin grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ERB_SCALE: f64 = 21.4;
const ERB_SLOPE: f64 = 0.00437;
const MEL_SCALE: f64 = 2595.0;
const MEL_BREAK_HZ: f64 = 700.0;

/// Glasberg & Moore ERB_N-number of a frequency.
pub fn hz_to_erbn(f: f64) -> Result<f64> {
    if !(f >= 0.0) {
        return Err(Error::Domain(format!("frequency must be >= 0 Hz, got {f}")));
    }
    Ok(ERB_SCALE * (ERB_SLOPE * f + 1.0).log10())
}

/// Inverse of [`hz_to_erbn`].
pub fn erbn_to_hz(e: f64) -> f64 {
    (10f64.powf(e / ERB_SCALE) - 1.0) / ERB_SLOPE
}

/// Equivalent rectangular bandwidth (Hz) of the auditory filter at `f`.
pub fn erb_bandwidth(f: f64) -> f64 {
    24.7 * (4.37 * f / 1000.0 + 1.0)
}

pub fn hz_to_mel(f: f64) -> f64 {
    MEL_SCALE * (1.0 + f / MEL_BREAK_HZ).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    MEL_BREAK_HZ * (10f64.powf(m / MEL_SCALE) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisKind {
    ErbLinear,
    Log10Hz,
    MelLinear,
    LinearHz,
}

impl AxisKind {
    /// Maps Hz into the coordinate in which this axis is uniform.
    pub fn to_native(self, f: f64) -> f64 {
        match self {
            AxisKind::ErbLinear => ERB_SCALE * (ERB_SLOPE * f + 1.0).log10(),
            AxisKind::Log10Hz => f.log10(),
            AxisKind::MelLinear => hz_to_mel(f),
            AxisKind::LinearHz => f,
        }
    }

    pub fn from_native(self, x: f64) -> f64 {
        match self {
            AxisKind::ErbLinear => erbn_to_hz(x),
            AxisKind::Log10Hz => 10f64.powf(x),
            AxisKind::MelLinear => mel_to_hz(x),
            AxisKind::LinearHz => x,
        }
    }
}

impl std::fmt::Display for AxisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AxisKind::ErbLinear => "erb",
            AxisKind::Log10Hz => "log10",
            AxisKind::MelLinear => "mel",
            AxisKind::LinearHz => "linear",
        };
        f.write_str(s)
    }
}

/// A grid of `channels` center frequencies from `f_lo` to `f_hi`
/// inclusive, uniformly spaced in the native coordinate of `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyAxis {
    kind: AxisKind,
    channels: usize,
    f_lo: f64,
    f_hi: f64,
}

/// Constructs a validated axis.
pub fn make_axis(kind: AxisKind, channels: usize, f_lo: f64, f_hi: f64) -> Result<FrequencyAxis> {
    FrequencyAxis::new(kind, channels, f_lo, f_hi)
}

impl FrequencyAxis {
    pub fn new(kind: AxisKind, channels: usize, f_lo: f64, f_hi: f64) -> Result<Self> {
        if channels < 2 {
            return Err(Error::Config(format!("axis needs at least 2 channels, got {channels}")));
        }
        let lo_ok = match kind {
            AxisKind::LinearHz => f_lo >= 0.0,
            _ => f_lo > 0.0,
        };
        if !lo_ok || !(f_hi > f_lo) || !f_hi.is_finite() {
            return Err(Error::Config(format!(
                "invalid {kind} axis bounds [{f_lo}, {f_hi}] Hz"
            )));
        }
        Ok(Self { kind, channels, f_lo, f_hi })
    }

    /// The 100-channel ERB_N-number axis spanning 100-8000 Hz.
    pub fn canonical_erb() -> Self {
        Self { kind: AxisKind::ErbLinear, channels: 100, f_lo: 100.0, f_hi: 8000.0 }
    }

    /// The 100-channel log10-Hz axis spanning 100-8000 Hz.
    pub fn canonical_log10() -> Self {
        Self { kind: AxisKind::Log10Hz, channels: 100, f_lo: 100.0, f_hi: 8000.0 }
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn f_lo(&self) -> f64 {
        self.f_lo
    }

    pub fn f_hi(&self) -> f64 {
        self.f_hi
    }

    /// Channel spacing in the native coordinate.
    pub fn spacing(&self) -> f64 {
        (self.kind.to_native(self.f_hi) - self.kind.to_native(self.f_lo)) / (self.channels - 1) as f64
    }

    /// Native coordinate of channel `c` (may be fractional or outside the grid).
    pub fn native_at(&self, c: f64) -> f64 {
        self.kind.to_native(self.f_lo) + c * self.spacing()
    }

    pub fn center_freq(&self, c: usize) -> f64 {
        if c == 0 {
            self.f_lo
        } else if c + 1 == self.channels {
            self.f_hi
        } else {
            self.kind.from_native(self.native_at(c as f64))
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.channels).map(|c| self.center_freq(c)).collect()
    }

    /// Fractional channel position of frequency `f`.
    pub fn channel_of(&self, f: f64) -> f64 {
        (self.kind.to_native(f) - self.kind.to_native(self.f_lo)) / self.spacing()
    }

    /// Index of the channel whose center is nearest `f` in the native coordinate.
    pub fn nearest_channel(&self, f: f64) -> usize {
        let c = self.channel_of(f).round();
        c.clamp(0.0, (self.channels - 1) as f64) as usize
    }

    pub fn covers(&self, f_lo: f64, f_hi: f64) -> bool {
        let tol = 1e-9 * self.f_hi;
        self.f_lo <= f_lo + tol && self.f_hi >= f_hi - tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erbn_spot_values() {
        assert_eq!(hz_to_erbn(0.0).unwrap(), 0.0);
        assert!((hz_to_erbn(1000.0).unwrap() - 15.62).abs() < 0.01);
        let back = erbn_to_hz(hz_to_erbn(8000.0).unwrap());
        assert!((back - 8000.0).abs() / 8000.0 < 1e-9);
    }

    #[test]
    fn negative_frequency_is_a_domain_error() {
        assert!(matches!(hz_to_erbn(-1.0), Err(Error::Domain(_))));
        assert!(matches!(hz_to_erbn(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn mel_of_1000_hz() {
        assert!((hz_to_mel(1000.0) - 1000.0).abs() < 0.1);
        assert!((mel_to_hz(hz_to_mel(3456.0)) - 3456.0).abs() < 1e-9);
    }

    #[test]
    fn canonical_axes_endpoints() {
        let erb = make_axis(AxisKind::ErbLinear, 100, 100.0, 8000.0).unwrap();
        assert_eq!(erb.center_freq(0), 100.0);
        assert_eq!(erb, FrequencyAxis::canonical_erb());
        let log = make_axis(AxisKind::Log10Hz, 100, 100.0, 8000.0).unwrap();
        assert_eq!(log.center_freq(99), 8000.0);
        // interior reconstruction agrees with the endpoint too
        assert!((log.kind().from_native(log.native_at(99.0)) - 8000.0).abs() / 8000.0 < 1e-6);
    }

    #[test]
    fn erb_channel_spacing() {
        let erb = FrequencyAxis::canonical_erb();
        let expected = (hz_to_erbn(8000.0).unwrap() - hz_to_erbn(100.0).unwrap()) / 99.0;
        assert!((erb.spacing() - expected).abs() < 1e-12);
        // 29.9250 ERB over 99 steps
        assert!((erb.spacing() - 0.302272).abs() < 1e-6);
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(matches!(make_axis(AxisKind::ErbLinear, 1, 100.0, 8000.0), Err(Error::Config(_))));
        assert!(matches!(make_axis(AxisKind::Log10Hz, 10, 0.0, 8000.0), Err(Error::Config(_))));
        assert!(matches!(make_axis(AxisKind::MelLinear, 10, 900.0, 800.0), Err(Error::Config(_))));
        assert!(make_axis(AxisKind::LinearHz, 10, 0.0, 8000.0).is_ok());
    }

    #[test]
    fn nearest_channel_roundtrip() {
        let erb = FrequencyAxis::canonical_erb();
        for c in [0, 17, 50, 99] {
            assert_eq!(erb.nearest_channel(erb.center_freq(c)), c);
        }
    }
}
