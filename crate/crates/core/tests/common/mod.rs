#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ssi_vtl::corpus::{default_speakers, pair_demo_speakers};
use ssi_vtl::eval::{analyze_corpus, AnalyzedUtterance};
use ssi_vtl::vtl::ShiftMatrix;
use ssi_vtl::{
    synthetic_utterances, AnalysisParams, Compression, F0Source, FrequencyAxis, Representation, Spectrum, Vowel,
};

pub fn reps(ids: &[&str]) -> Vec<Representation> {
    ids.iter().map(|s| s.parse().expect("valid representation id")).collect()
}

/// Weighted variants of `ids`, so analysis also estimates F0.
fn with_f0(ids: &[&str]) -> Vec<Representation> {
    reps(ids).into_iter().map(Representation::weighted).collect()
}

/// Default 8-speaker x 5-vowel corpus analyzed with `ids`, F0 estimated from audio.
pub fn ladder(ids: &[&str]) -> Vec<AnalyzedUtterance> {
    let utts = synthetic_utterances(&default_speakers(), &Vowel::ALL).unwrap();
    analyze_corpus(&utts, &with_f0(ids), &AnalysisParams::default(), &F0Source::Auto).unwrap()
}

/// The two-speaker /a/ corpus (female first).
pub fn pair(ids: &[&str]) -> Vec<AnalyzedUtterance> {
    let utts = synthetic_utterances(&pair_demo_speakers(), &[Vowel::A]).unwrap();
    analyze_corpus(&utts, &with_f0(ids), &AnalysisParams::default(), &F0Source::Auto).unwrap()
}

/// Raised-cosine bump of half-width `w` centred on `c`; zero outside.
pub fn bump(x: f64, c: f64, w: f64) -> f64 {
    let u = (x - c) / w;
    if u.abs() < 1.0 {
        0.5 * (1.0 + (std::f64::consts::PI * u).cos())
    } else {
        0.0
    }
}

/// Vowel-like template: three formant bumps on a floor with a downward tilt.
pub fn vowel_template(x: f64) -> f64 {
    20.0 - 0.15 * x + 12.0 * bump(x, 30.0, 7.0) + 9.0 * bump(x, 48.0, 8.0) + 5.0 * bump(x, 70.0, 9.0)
}

/// `template(c - d)` sampled on the canonical ERB axis (dB-tagged, may be negative).
pub fn constructed(template: impl Fn(f64) -> f64, d: f64) -> Spectrum {
    let axis = FrequencyAxis::canonical_erb();
    let v = (0..axis.channels()).map(|c| template(c as f64 - d)).collect();
    Spectrum::new(v, axis, Compression::Log).unwrap()
}

/// Least-squares solution of `x_j - x_i = c_ij` (all i < j) with `sum x = 0`,
/// via the Moore-Penrose pseudo-inverse.
pub fn pinv_relative_shifts(m: &ShiftMatrix) -> Vec<f64> {
    let n = m.n();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut r = vec![0.0; n];
            r[j] = 1.0;
            r[i] = -1.0;
            rows.push(r);
            rhs.push(m.get(i, j));
        }
    }
    rows.push(vec![1.0; n]);
    rhs.push(0.0);
    let a = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    let b = DVector::from_vec(rhs);
    let x = a.pseudo_inverse(1e-12).unwrap() * b;
    x.iter().copied().collect()
}

pub fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b })
}
