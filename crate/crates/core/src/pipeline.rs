//! From audio to a weighted, 100-channel spectrum.
//!
//! A [`Representation`] names a front end, an amplitude compression and
//! whether the F0-adaptive weight is applied, using ids such as `Ep`,
//! `Ep_SSI`, `F_log`, `F_SSI_0.4`, `M_log` or `M_SSI_0.4`. `W_*` ids use
//! externally supplied spectra (one CSV per utterance).

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axis::{AxisKind, FrequencyAxis};
use crate::corpus::{utterance_spec, Manifest, Speaker};
use crate::error::{Error, Result};
use crate::frontends::{gammatone_ep, mel_spectrum, stft_spectrum};
use crate::io::{read_wav_canonical, CANONICAL_FS};
use crate::spectrum::{center_average_mid, compress, resample_to_axis, Compression, Spectrogram, Spectrum};
use crate::ssi::{apply_weight, estimate_f0, ssi_weight, SsiParams};
use crate::synth::{synth_vowel, Vowel};

/// Compression applied to the excitation pattern when the id does not name one.
pub const EP_DEFAULT_COMPRESSION: Compression = Compression::Log;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrontEnd {
    /// Gammatone excitation pattern on the ERB axis.
    Ep,
    /// STFT magnitude resampled to a log10-Hz axis.
    Fourier,
    /// 25-band Mel spectrum interpolated to 100 Mel channels.
    Mel,
    /// Externally computed spectrum (e.g. a vocoder envelope), log10-Hz axis.
    External,
}

impl FrontEnd {
    fn prefix(self) -> &'static str {
        match self {
            FrontEnd::Ep => "Ep",
            FrontEnd::Fourier => "F",
            FrontEnd::Mel => "M",
            FrontEnd::External => "W",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representation {
    pub front: FrontEnd,
    pub compression: Compression,
    pub ssi: bool,
}

impl Representation {
    pub fn new(front: FrontEnd, compression: Compression, ssi: bool) -> Result<Self> {
        let compression = compression.validate()?;
        if compression == Compression::None && front != FrontEnd::Ep {
            return Err(Error::Config(format!(
                "{} spectra need log or power compression",
                front.prefix()
            )));
        }
        Ok(Self { front, compression, ssi })
    }

    /// Same front end and compression without the weight.
    pub fn unweighted(self) -> Self {
        Self { ssi: false, ..self }
    }

    pub fn weighted(self) -> Self {
        Self { ssi: true, ..self }
    }

    /// Key identifying the unweighted spectrum this representation derives from.
    pub fn base_key(&self) -> String {
        self.unweighted().to_string()
    }

    /// Every id constructible from the built-in front ends.
    pub fn all_builtin() -> Vec<Self> {
        let mut out = vec![
            Self { front: FrontEnd::Ep, compression: EP_DEFAULT_COMPRESSION, ssi: false },
            Self { front: FrontEnd::Ep, compression: EP_DEFAULT_COMPRESSION, ssi: true },
        ];
        for front in [FrontEnd::Fourier, FrontEnd::Mel] {
            let mut comps = vec![Compression::Log];
            comps.extend((1..=10).map(|k| Compression::Power(k as f64 / 10.0)));
            for ssi in [false, true] {
                for c in &comps {
                    out.push(Self { front, compression: *c, ssi });
                }
            }
        }
        out
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.front.prefix())?;
        if self.ssi {
            f.write_str("_SSI")?;
        }
        let implicit = self.front == FrontEnd::Ep && self.compression == EP_DEFAULT_COMPRESSION;
        match self.compression {
            _ if implicit => {}
            Compression::None => f.write_str("_lin")?,
            c => write!(f, "_{c}")?,
        }
        Ok(())
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown representation id {s:?}"));
        let mut parts = s.trim().split('_');
        let front = match parts.next() {
            Some("Ep") => FrontEnd::Ep,
            Some("F") => FrontEnd::Fourier,
            Some("M") => FrontEnd::Mel,
            Some("W") => FrontEnd::External,
            _ => return Err(bad()),
        };
        let mut rest: Vec<&str> = parts.collect();
        let ssi = rest.first() == Some(&"SSI");
        if ssi {
            rest.remove(0);
        }
        let compression = match rest.as_slice() {
            [] if front == FrontEnd::Ep => EP_DEFAULT_COMPRESSION,
            ["log"] => Compression::Log,
            ["lin"] if front == FrontEnd::Ep => Compression::None,
            [p] => Compression::Power(p.parse::<f64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Self::new(front, compression, ssi).map_err(|e| e.context(format!("representation {s:?}")))
    }
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Representation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Analysis settings. Defaults: 100 channels over 100-8000 Hz at 48 kHz,
/// 0.5 ms EP frames, ±25 ms averaging, 25 ms / 5 ms Hamming STFT,
/// 25 Mel filters, h_max 3.5, ±30 channel lags at 0.1 channel resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisParams {
    pub channels: usize,
    pub f_lo: f64,
    pub f_hi: f64,
    pub ep_frame_period: f64,
    pub average_half_width: f64,
    pub stft_window: f64,
    pub stft_hop: f64,
    pub mel_filters: usize,
    pub h_max: f64,
    pub max_lag: usize,
    pub interp: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            channels: 100,
            f_lo: 100.0,
            f_hi: 8000.0,
            ep_frame_period: 0.0005,
            average_half_width: 0.025,
            stft_window: 0.025,
            stft_hop: 0.005,
            mel_filters: 25,
            h_max: crate::ssi::DEFAULT_HMAX,
            max_lag: crate::vtl::DEFAULT_MAX_LAG,
            interp: crate::vtl::DEFAULT_INTERP,
        }
    }
}

impl AnalysisParams {
    /// Axis of the final spectra produced by `front`.
    pub fn axis_for(&self, front: FrontEnd) -> Result<FrequencyAxis> {
        let kind = match front {
            FrontEnd::Ep => AxisKind::ErbLinear,
            FrontEnd::Fourier | FrontEnd::External => AxisKind::Log10Hz,
            FrontEnd::Mel => AxisKind::MelLinear,
        };
        FrequencyAxis::new(kind, self.channels, self.f_lo, self.f_hi)
    }
}

/// Where the F0 driving the weight comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum F0Source {
    /// Autocorrelation estimate from the audio.
    Auto,
    /// The manifest's `f0_hz` column.
    Manifest,
    Fixed(f64),
    /// Per-utterance values keyed by utterance id.
    Table(HashMap<String, f64>),
}

impl F0Source {
    /// Parses `auto`, `manifest`, a number in Hz, or a path to an F0 CSV.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(F0Source::Auto),
            "manifest" => Ok(F0Source::Manifest),
            t => match t.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.is_finite() => Ok(F0Source::Fixed(v)),
                Ok(v) => Err(Error::Config(format!("f0 must be >= 0 Hz, got {v}"))),
                Err(_) => read_f0_table(Path::new(t)).map(F0Source::Table),
            },
        }
    }
}

#[derive(Debug, Deserialize)]
struct F0Row {
    utterance_id: String,
    f0_hz: f64,
}

/// Reads `utterance_id,f0_hz` rows.
pub fn read_f0_table(path: &Path) -> Result<HashMap<String, f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = HashMap::new();
    for row in rdr.deserialize::<F0Row>() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        if !(row.f0_hz >= 0.0) {
            return Err(Error::Input(format!(
                "{}: utterance {} has negative f0",
                path.display(),
                row.utterance_id
            )));
        }
        out.insert(row.utterance_id, row.f0_hz);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum UtteranceSource {
    Wav(PathBuf),
    Samples { samples: Vec<f64>, fs: f64 },
    /// `channel,center_hz,value` CSV of an uncompressed amplitude spectrum.
    SpectrumCsv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub id: String,
    pub speaker_id: String,
    pub vowel: Vowel,
    pub vtl_cm: f64,
    pub f0_hz: Option<f64>,
    pub source: UtteranceSource,
}

impl Utterance {
    pub fn from_manifest(m: &Manifest) -> Vec<Self> {
        m.rows
            .iter()
            .map(|r| {
                let path = m.resolve(r);
                let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
                Utterance {
                    id: r.utterance_id(),
                    speaker_id: r.speaker_id.clone(),
                    vowel: r.vowel,
                    vtl_cm: r.vtl_cm,
                    f0_hz: r.f0_hz,
                    source: if is_csv { UtteranceSource::SpectrumCsv(path) } else { UtteranceSource::Wav(path) },
                }
            })
            .collect()
    }

    /// Audio at the canonical rate, or `None` for spectrum-only utterances.
    pub fn load_audio(&self) -> Result<Option<Vec<f64>>> {
        match &self.source {
            UtteranceSource::Wav(p) => read_wav_canonical(p).map(Some),
            UtteranceSource::Samples { samples, fs } if *fs == CANONICAL_FS as f64 => Ok(Some(samples.clone())),
            UtteranceSource::Samples { samples, fs } => {
                log::warn!("{}: resampling {fs} Hz -> {CANONICAL_FS} Hz by linear interpolation", self.id);
                Ok(Some(crate::io::resample_linear(samples, *fs, CANONICAL_FS as f64)))
            }
            UtteranceSource::SpectrumCsv(_) => Ok(None),
        }
    }

    pub fn resolve_f0(&self, source: &F0Source, audio: Option<&[f64]>) -> Result<f64> {
        match source {
            F0Source::Auto => {
                let x = audio.ok_or_else(|| {
                    Error::Input(format!("{}: automatic F0 needs audio; supply --f0", self.id))
                })?;
                Ok(estimate_f0(x, CANONICAL_FS as f64)?.f0_or_zero())
            }
            F0Source::Manifest => self
                .f0_hz
                .ok_or_else(|| Error::Input(format!("{}: manifest has no f0_hz", self.id))),
            F0Source::Fixed(f) => Ok(*f),
            F0Source::Table(t) => t
                .get(&self.id)
                .copied()
                .ok_or_else(|| Error::Input(format!("{}: no entry in the F0 table", self.id))),
        }
    }
}

/// In-memory utterances for every speaker and vowel, synthesized in parallel.
pub fn synthetic_utterances(speakers: &[Speaker], vowels: &[Vowel]) -> Result<Vec<Utterance>> {
    let jobs: Vec<(&Speaker, Vowel)> = speakers.iter().flat_map(|s| vowels.iter().map(move |v| (s, *v))).collect();
    jobs.par_iter()
        .map(|(s, v)| {
            let spec = utterance_spec(s, *v)?;
            Ok(Utterance {
                id: format!("{}_{}", s.id, v),
                speaker_id: s.id.clone(),
                vowel: *v,
                vtl_cm: s.vtl_cm(),
                f0_hz: Some(s.f0),
                source: UtteranceSource::Samples { samples: synth_vowel(&spec)?, fs: spec.fs },
            })
        })
        .collect()
}

/// Reads an external amplitude spectrum on a uniform linear-Hz grid.
pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum> {
    #[derive(Deserialize)]
    struct Row {
        center_hz: f64,
        value: f64,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let rows = rdr
        .deserialize::<Row>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::csv(path, e))?;
    if rows.len() < 2 {
        return Err(Error::Input(format!("{}: spectrum needs at least 2 rows", path.display())));
    }
    let (f0, f1) = (rows[0].center_hz, rows[rows.len() - 1].center_hz);
    let axis = FrequencyAxis::new(AxisKind::LinearHz, rows.len(), f0, f1)?;
    let step = axis.spacing();
    if rows.iter().enumerate().any(|(k, r)| (r.center_hz - (f0 + k as f64 * step)).abs() > 1e-6 * step.max(1.0)) {
        return Err(Error::Input(format!(
            "{}: external spectra must use uniformly spaced frequencies",
            path.display()
        )));
    }
    Spectrum::new(rows.into_iter().map(|r| r.value).collect(), axis, Compression::None)
        .map_err(|e| e.context(path.display()))
}

/// Intermediate spectrograms of one utterance, computed on demand.
struct FrontEndCache<'a> {
    audio: Option<&'a [f64]>,
    params: &'a AnalysisParams,
    ep: Option<Spectrogram>,
    stft: Option<Spectrogram>,
    mel: Option<Spectrogram>,
    external: Option<Spectrogram>,
    external_path: Option<&'a Path>,
}

impl<'a> FrontEndCache<'a> {
    fn audio(&self) -> Result<&'a [f64]> {
        self.audio.ok_or_else(|| Error::Input("this representation needs audio input".into()))
    }

    fn spectrogram(&mut self, front: FrontEnd) -> Result<&Spectrogram> {
        let fs = CANONICAL_FS as f64;
        let p = self.params;
        match front {
            FrontEnd::Ep => {
                if self.ep.is_none() {
                    let axis = p.axis_for(FrontEnd::Ep)?;
                    self.ep = Some(gammatone_ep(self.audio()?, fs, &axis, p.ep_frame_period)?);
                }
                Ok(self.ep.as_ref().expect("filled above"))
            }
            FrontEnd::Fourier | FrontEnd::Mel => {
                if self.stft.is_none() {
                    self.stft = Some(stft_spectrum(self.audio()?, fs, p.stft_window, p.stft_hop)?);
                }
                if front == FrontEnd::Fourier {
                    return Ok(self.stft.as_ref().expect("filled above"));
                }
                if self.mel.is_none() {
                    let stft = self.stft.as_ref().expect("filled above");
                    self.mel = Some(mel_spectrum(stft, p.mel_filters, p.f_lo, p.f_hi)?);
                }
                Ok(self.mel.as_ref().expect("filled above"))
            }
            FrontEnd::External => {
                if self.external.is_none() {
                    let path = self
                        .external_path
                        .ok_or_else(|| Error::Input("W representations need a spectrum CSV input".into()))?;
                    let s = read_spectrum_csv(path)?;
                    let axis = *s.axis();
                    self.external = Some(Spectrogram::new(vec![s.into_values()], 1.0, 0.0, axis, Compression::None)?);
                }
                Ok(self.external.as_ref().expect("filled above"))
            }
        }
    }

    /// Compressed, center-averaged spectrum on the analysis axis.
    fn spectrum(&mut self, front: FrontEnd, compression: Compression) -> Result<Spectrum> {
        let params = self.params;
        let sg = self.spectrogram(front)?;
        let sg = match compression {
            Compression::None => sg.clone(),
            c => compress(sg, c)?,
        };
        let avg = if front == FrontEnd::External {
            Spectrum::new(sg.frames()[0].clone(), *sg.axis(), sg.compression())?
        } else {
            center_average_mid(&sg, params.average_half_width)?
        };
        resample_to_axis(&avg, &params.axis_for(front)?)
    }
}

/// Unweighted spectra of one utterance for several representations.
///
/// Returns spectra keyed by [`Representation::base_key`].
pub fn base_spectra(
    utt: &Utterance,
    audio: Option<&[f64]>,
    reps: &[Representation],
    params: &AnalysisParams,
) -> Result<HashMap<String, Spectrum>> {
    let external_path = match &utt.source {
        UtteranceSource::SpectrumCsv(p) => Some(p.as_path()),
        _ => None,
    };
    let mut cache = FrontEndCache {
        audio,
        params,
        ep: None,
        stft: None,
        mel: None,
        external: None,
        external_path,
    };
    let mut out = HashMap::new();
    for rep in reps {
        let key = rep.base_key();
        if out.contains_key(&key) {
            continue;
        }
        let s = cache
            .spectrum(rep.front, rep.compression)
            .map_err(|e| e.context(format!("{} ({key})", utt.id)))?;
        out.insert(key, s);
    }
    Ok(out)
}

/// Applies the weight for `f0` at `h_max`; `h_max == 0` means no weighting.
pub fn weight_spectrum(s: &Spectrum, h_max: f64, f0: f64) -> Result<Spectrum> {
    if h_max == 0.0 {
        return Ok(s.clone());
    }
    let w = ssi_weight(s.axis(), SsiParams::new(h_max, f0)?);
    apply_weight(s, &w)
}

/// Full single-utterance analysis for one representation.
pub fn analyze(utt: &Utterance, rep: Representation, params: &AnalysisParams, f0: &F0Source) -> Result<(Spectrum, f64)> {
    let audio = utt.load_audio()?;
    let base = base_spectra(utt, audio.as_deref(), &[rep], params)?.remove(&rep.base_key()).expect("computed");
    if !rep.ssi {
        return Ok((base, 0.0));
    }
    let f0 = utt.resolve_f0(f0, audio.as_deref())?;
    Ok((weight_spectrum(&base, params.h_max, f0)?, f0))
}
