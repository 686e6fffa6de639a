//! Source-filter vowel synthesis with a controllable vocal tract scale.
//!
//! A Rosenberg glottal flow pulse train drives a cascade of four
//! second-order resonators. Shortening the vocal tract by `1/alpha`
//! multiplies every formant frequency and bandwidth by `alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vocal tract length (cm) of the baseline formant table.
pub const BASELINE_VTL_CM: f64 = 16.0;
pub const BASELINE_BANDWIDTHS: [f64; 4] = [60.0, 90.0, 120.0, 150.0];
pub const DEFAULT_DURATION: f64 = 0.3;
pub const DEFAULT_FS: f64 = 48_000.0;
const PEAK_AMPLITUDE: f64 = 0.5;

/// Rosenberg pulse shape as fractions of the period.
const OPEN_QUOTIENT: f64 = 0.6;
const CLOSING_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vowel {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "u")]
    U,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "o")]
    O,
}

impl Vowel {
    pub const ALL: [Vowel; 5] = [Vowel::A, Vowel::I, Vowel::U, Vowel::E, Vowel::O];

    /// Adult male formant frequencies (Hz) at alpha = 1.
    pub fn baseline_formants(self) -> [f64; 4] {
        match self {
            Vowel::A => [700.0, 1200.0, 2600.0, 3400.0],
            Vowel::I => [300.0, 2300.0, 3000.0, 3700.0],
            Vowel::U => [330.0, 800.0, 2300.0, 3300.0],
            Vowel::E => [480.0, 1900.0, 2600.0, 3500.0],
            Vowel::O => [500.0, 900.0, 2500.0, 3400.0],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Vowel::A => "a",
            Vowel::I => "i",
            Vowel::U => "u",
            Vowel::E => "e",
            Vowel::O => "o",
        }
    }
}

impl std::fmt::Display for Vowel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Vowel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(Vowel::A),
            "i" => Ok(Vowel::I),
            "u" => Ok(Vowel::U),
            "e" => Ok(Vowel::E),
            "o" => Ok(Vowel::O),
            other => Err(Error::Input(format!("unknown vowel {other:?} (expected a, i, u, e or o)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelSpec {
    pub vowel: Vowel,
    pub formants: [f64; 4],
    pub bandwidths: [f64; 4],
    pub f0: f64,
    pub alpha: f64,
    pub vtl_cm: f64,
    pub duration: f64,
    pub fs: f64,
}

impl VowelSpec {
    /// Baseline (alpha = 1) spec for `vowel`.
    pub fn baseline(vowel: Vowel, f0: f64) -> Self {
        Self {
            vowel,
            formants: vowel.baseline_formants(),
            bandwidths: BASELINE_BANDWIDTHS,
            f0,
            alpha: 1.0,
            vtl_cm: BASELINE_VTL_CM,
            duration: DEFAULT_DURATION,
            fs: DEFAULT_FS,
        }
    }

    /// Baseline spec scaled to a given vocal tract length.
    pub fn with_vtl(vowel: Vowel, f0: f64, vtl_cm: f64) -> Result<Self> {
        if !(vtl_cm > 0.0) {
            return Err(Error::Config(format!("vtl_cm must be > 0, got {vtl_cm}")));
        }
        scale_vtl(&Self::baseline(vowel, f0), BASELINE_VTL_CM / vtl_cm)
    }
}

/// Scales formants and bandwidths by `alpha` and the tract length by `1/alpha`.
pub fn scale_vtl(spec: &VowelSpec, alpha: f64) -> Result<VowelSpec> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Config(format!("alpha must be > 0, got {alpha}")));
    }
    let formants = spec.formants.map(|f| f * alpha);
    if formants[3] >= spec.fs / 2.0 {
        return Err(Error::Config(format!(
            "alpha {alpha} moves F4 to {:.0} Hz, above Nyquist ({} Hz)",
            formants[3],
            spec.fs / 2.0
        )));
    }
    Ok(VowelSpec {
        formants,
        bandwidths: spec.bandwidths.map(|b| b * alpha),
        alpha: spec.alpha * alpha,
        vtl_cm: spec.vtl_cm / alpha,
        ..spec.clone()
    })
}

/// Rosenberg glottal flow at phase `p` in [0, 1).
fn rosenberg(p: f64) -> f64 {
    let opening = OPEN_QUOTIENT - CLOSING_FRACTION;
    if p < opening {
        0.5 * (1.0 - (std::f64::consts::PI * p / opening).cos())
    } else if p < OPEN_QUOTIENT {
        (std::f64::consts::FRAC_PI_2 * (p - opening) / CLOSING_FRACTION).cos()
    } else {
        0.0
    }
}

/// Mean of the pulse over one period; subtracting it removes only the DC term.
fn rosenberg_mean() -> f64 {
    0.5 * (OPEN_QUOTIENT - CLOSING_FRACTION) + 2.0 * CLOSING_FRACTION / std::f64::consts::PI
}

/// Klatt-style resonator with unit gain at DC.
struct Resonator {
    a: f64,
    b: f64,
    c: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(freq: f64, bw: f64, fs: f64) -> Self {
        let r = (-std::f64::consts::PI * bw / fs).exp();
        let c = -r * r;
        let b = 2.0 * r * (std::f64::consts::TAU * freq / fs).cos();
        Self { a: 1.0 - b - c, b, c, y1: 0.0, y2: 0.0 }
    }

    fn tick(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

pub fn synth_vowel(spec: &VowelSpec) -> Result<Vec<f64>> {
    let top = spec.formants[3] + 2.0 * spec.bandwidths[3];
    if !(spec.fs >= 2.0 * top) {
        return Err(Error::Config(format!(
            "sample rate {} Hz too low for F4 + 2 B4 = {top:.0} Hz",
            spec.fs
        )));
    }
    if !(spec.duration >= 0.2) {
        return Err(Error::Config(format!("duration must be >= 0.2 s, got {}", spec.duration)));
    }
    if !(spec.f0 > 0.0 && spec.f0 < spec.fs / 2.0) {
        return Err(Error::Config(format!("f0 must be in (0, fs/2), got {}", spec.f0)));
    }
    if spec.formants.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("formants must increase: {:?}", spec.formants)));
    }
    let n = (spec.duration * spec.fs).round() as usize;
    let mut filters: Vec<Resonator> = spec
        .formants
        .iter()
        .zip(&spec.bandwidths)
        .map(|(f, b)| Resonator::new(*f, *b, spec.fs))
        .collect();
    let dc = rosenberg_mean();
    let step = spec.f0 / spec.fs;
    let mut phase = 0.0f64;
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            let mut v = rosenberg(phase) - dc;
            phase += step;
            if phase >= 1.0 {
                phase -= 1.0;
            }
            for f in filters.iter_mut() {
                v = f.tick(v);
            }
            v
        })
        .collect();
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        let g = PEAK_AMPLITUDE / peak;
        out.iter_mut().for_each(|v| *v *= g);
    }
    Ok(out)
}
