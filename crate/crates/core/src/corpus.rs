//! Speaker sets, corpus generation and the manifest CSV schema.
//!
//! A manifest lists one utterance per row:
//! `speaker_id,vowel,f0_hz,alpha,vtl_cm,path`. `f0_hz` and `alpha` may be
//! empty for recorded corpora; `path` is resolved relative to the
//! manifest's directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{write_atomic, write_wav_i16};
use crate::synth::{synth_vowel, Vowel, VowelSpec, BASELINE_VTL_CM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speaker {
    pub id: String,
    pub f0: f64,
    pub alpha: f64,
}

impl Speaker {
    pub fn new(id: impl Into<String>, f0: f64, alpha: f64) -> Result<Self> {
        let id = id.into();
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Config(format!("speaker {id}: alpha must be > 0, got {alpha}")));
        }
        if !(f0 > 0.0) || !f0.is_finite() {
            return Err(Error::Config(format!("speaker {id}: f0 must be > 0, got {f0}")));
        }
        Ok(Self { id, f0, alpha })
    }

    pub fn vtl_cm(&self) -> f64 {
        BASELINE_VTL_CM / self.alpha
    }
}

pub const DEFAULT_ALPHAS: [f64; 8] = [0.80, 0.88, 0.95, 1.00, 1.05, 1.12, 1.20, 1.25];
pub const DEFAULT_F0_RANGE: (f64, f64) = (100.0, 220.0);

/// Eight speakers on an alpha ladder; F0 rises linearly from 100 Hz for
/// the longest tract to 220 Hz for the shortest.
pub fn default_speakers() -> Vec<Speaker> {
    let n = DEFAULT_ALPHAS.len();
    let (lo, hi) = DEFAULT_F0_RANGE;
    DEFAULT_ALPHAS
        .iter()
        .enumerate()
        .map(|(k, &alpha)| Speaker {
            id: format!("s{}", k + 1),
            f0: lo + (hi - lo) * k as f64 / (n - 1) as f64,
            alpha,
        })
        .collect()
}

/// A short-tract, high-F0 speaker (15.0 cm, 182 Hz) and a long-tract,
/// low-F0 one (18.5 cm, 101 Hz).
pub fn pair_demo_speakers() -> Vec<Speaker> {
    vec![
        Speaker { id: "female".into(), f0: 182.0, alpha: BASELINE_VTL_CM / 15.0 },
        Speaker { id: "male".into(), f0: 101.0, alpha: BASELINE_VTL_CM / 18.5 },
    ]
}

pub fn utterance_spec(speaker: &Speaker, vowel: Vowel) -> Result<VowelSpec> {
    crate::synth::scale_vtl(&VowelSpec::baseline(vowel, speaker.f0), speaker.alpha)
        .map_err(|e| e.context(format!("speaker {}", speaker.id)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub speaker_id: String,
    pub vowel: Vowel,
    pub f0_hz: Option<f64>,
    pub alpha: Option<f64>,
    pub vtl_cm: f64,
    pub path: PathBuf,
}

impl ManifestRow {
    /// Identifier used to look up external F0 values: the file stem.
    pub fn utterance_id(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub dir: PathBuf,
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::csv(path, e))?;
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<ManifestRow>, _>>()
            .map_err(|e| Error::csv(path, e))?;
        if rows.is_empty() {
            return Err(Error::Input(format!("{}: manifest has no rows", path.display())));
        }
        if let Some(r) = rows.iter().find(|r| !(r.vtl_cm > 0.0)) {
            return Err(Error::Input(format!(
                "{}: speaker {} has non-positive vtl_cm {}",
                path.display(),
                r.speaker_id,
                r.vtl_cm
            )));
        }
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { dir, rows })
    }

    pub fn resolve(&self, row: &ManifestRow) -> PathBuf {
        if row.path.is_absolute() {
            row.path.clone()
        } else {
            self.dir.join(&row.path)
        }
    }

    pub fn to_csv_string(rows: &[ManifestRow]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| Error::csv("<manifest>", e))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(path: &Path, rows: &[ManifestRow]) -> Result<()> {
        write_atomic(path, Self::to_csv_string(rows)?.as_bytes())
    }
}

pub const MANIFEST_NAME: &str = "manifest.csv";

/// Synthesizes one utterance per speaker and vowel into `out_dir` and
/// writes `manifest.csv` alongside.
pub fn make_corpus(out_dir: &Path, speakers: &[Speaker], vowels: &[Vowel]) -> Result<Manifest> {
    if speakers.is_empty() || vowels.is_empty() {
        return Err(Error::Config("corpus needs at least one speaker and one vowel".into()));
    }
    let jobs: Vec<(&Speaker, Vowel)> = speakers
        .iter()
        .flat_map(|s| vowels.iter().map(move |v| (s, *v)))
        .collect();
    let specs = jobs
        .iter()
        .map(|(s, v)| utterance_spec(s, *v))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let rows = jobs
        .par_iter()
        .zip(&specs)
        .map(|((speaker, vowel), spec)| {
            let file = PathBuf::from(format!("{}_{}.wav", speaker.id, vowel));
            let samples = synth_vowel(spec).map_err(|e| e.context(format!("speaker {}", speaker.id)))?;
            write_wav_i16(&out_dir.join(&file), &samples, spec.fs as u32)?;
            Ok(ManifestRow {
                speaker_id: speaker.id.clone(),
                vowel: *vowel,
                f0_hz: Some(speaker.f0),
                alpha: Some(speaker.alpha),
                vtl_cm: speaker.vtl_cm(),
                path: file,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Manifest::write(&out_dir.join(MANIFEST_NAME), &rows)?;
    Ok(Manifest { dir: out_dir.to_path_buf(), rows })
}
