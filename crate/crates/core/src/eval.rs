//! Corpus-level estimation and evaluation: per-vowel shift matrices, a
//! jointly fitted conversion coefficient, correlation and RMS error
//! against measured lengths, h_max sweeps and random-exclusion trials.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::pipeline::{base_spectra, weight_spectrum, AnalysisParams, F0Source, Representation, Utterance};
use crate::spectrum::Spectrum;
use crate::synth::Vowel;
use crate::vtl::{build_shift_matrix, fit_q, relative_shifts, ShiftMatrix, VtlEstimate};

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Input(format!("correlation needs at least 3 points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::Degenerate("correlation of a constant series".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn rms_error(est: &[f64], meas: &[f64]) -> Result<f64> {
    if est.len() != meas.len() || est.is_empty() {
        return Err(Error::Input(format!(
            "rms error needs equal non-empty vectors, got {} and {}",
            est.len(),
            meas.len()
        )));
    }
    let ss: f64 = est.iter().zip(meas).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / est.len() as f64).sqrt())
}

/// Unweighted spectra of one utterance plus the F0 used for weighting.
#[derive(Debug, Clone)]
pub struct AnalyzedUtterance {
    pub speaker_id: String,
    pub vowel: Vowel,
    pub vtl_cm: f64,
    pub f0: f64,
    pub spectra: std::collections::HashMap<String, Spectrum>,
}

/// Runs the front ends for every utterance (in parallel, order preserved).
pub fn analyze_corpus(
    utts: &[Utterance],
    reps: &[Representation],
    params: &AnalysisParams,
    f0: &F0Source,
) -> Result<Vec<AnalyzedUtterance>> {
    let needs_f0 = reps.iter().any(|r| r.ssi);
    utts.par_iter()
        .map(|u| {
            let audio = u.load_audio()?;
            let spectra = base_spectra(u, audio.as_deref(), reps, params)?;
            let f0 = if needs_f0 { u.resolve_f0(f0, audio.as_deref())? } else { 0.0 };
            Ok(AnalyzedUtterance {
                speaker_id: u.speaker_id.clone(),
                vowel: u.vowel,
                vtl_cm: u.vtl_cm,
                f0,
                spectra,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub speaker_id: String,
    pub vowel: Vowel,
    pub s_channels: f64,
    pub l_est_cm: f64,
    pub l_meas_cm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimation {
    pub points: Vec<PointEstimate>,
    pub q: f64,
    pub l_bar: f64,
    /// Speaker order and shift matrix per vowel.
    pub matrices: BTreeMap<Vowel, (Vec<String>, ShiftMatrix)>,
}

impl Estimation {
    pub fn estimated(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.l_est_cm).collect()
    }

    pub fn measured(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.l_meas_cm).collect()
    }

    pub fn rms_cm(&self) -> f64 {
        rms_error(&self.estimated(), &self.measured()).expect("non-empty estimation")
    }

    /// Pearson r over all points, `None` when undefined.
    pub fn all_r(&self) -> Option<f64> {
        pearson_r(&self.measured(), &self.estimated()).ok()
    }

    pub fn per_vowel_r(&self) -> BTreeMap<Vowel, Option<f64>> {
        self.matrices
            .keys()
            .map(|v| {
                let (m, e): (Vec<f64>, Vec<f64>) = self
                    .points
                    .iter()
                    .filter(|p| p.vowel == *v)
                    .map(|p| (p.l_meas_cm, p.l_est_cm))
                    .unzip();
                (*v, pearson_r(&m, &e).ok())
            })
            .collect()
    }

    /// Across-vowel mean of estimated and measured length per speaker.
    pub fn speaker_means(&self) -> Vec<(String, f64, f64)> {
        let mut acc: Vec<(String, f64, f64, usize)> = Vec::new();
        for p in &self.points {
            match acc.iter_mut().find(|a| a.0 == p.speaker_id) {
                Some(a) => {
                    a.1 += p.l_est_cm;
                    a.2 += p.l_meas_cm;
                    a.3 += 1;
                }
                None => acc.push((p.speaker_id.clone(), p.l_est_cm, p.l_meas_cm, 1)),
            }
        }
        acc.into_iter().map(|(id, e, m, n)| (id, e / n as f64, m / n as f64)).collect()
    }
}

/// Estimates lengths for every utterance: one shift matrix per vowel,
/// one `q` for all points. `h_max` only matters for weighted representations.
pub fn estimate(items: &[AnalyzedUtterance], rep: Representation, h_max: f64, params: &AnalysisParams) -> Result<Estimation> {
    let key = rep.base_key();
    let mut by_vowel: BTreeMap<Vowel, Vec<&AnalyzedUtterance>> = BTreeMap::new();
    for it in items {
        by_vowel.entry(it.vowel).or_default().push(it);
    }
    let mut points = Vec::with_capacity(items.len());
    let mut matrices = BTreeMap::new();
    for (vowel, group) in &by_vowel {
        let spectra = group
            .iter()
            .map(|it| {
                let base = it.spectra.get(&key).ok_or_else(|| {
                    Error::Input(format!("{} /{vowel}/ was not analyzed as {key}", it.speaker_id))
                })?;
                if rep.ssi {
                    weight_spectrum(base, h_max, it.f0)
                } else {
                    Ok(base.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let m = build_shift_matrix(&spectra, params.max_lag, params.interp)
            .map_err(|e| e.context(format!("vowel /{vowel}/")))?;
        let s = relative_shifts(&m);
        for (it, si) in group.iter().zip(&s) {
            points.push(PointEstimate {
                speaker_id: it.speaker_id.clone(),
                vowel: *vowel,
                s_channels: *si,
                l_est_cm: f64::NAN,
                l_meas_cm: it.vtl_cm,
            });
        }
        matrices.insert(*vowel, (group.iter().map(|it| it.speaker_id.clone()).collect(), m));
    }
    let s: Vec<f64> = points.iter().map(|p| p.s_channels).collect();
    let meas: Vec<f64> = points.iter().map(|p| p.l_meas_cm).collect();
    let l_bar = meas.iter().sum::<f64>() / meas.len() as f64;
    let q = match fit_q(&s, &meas, l_bar) {
        Ok(q) => q,
        Err(Error::Degenerate(msg)) => {
            log::warn!("{rep}: {msg}; using q = 0");
            0.0
        }
        Err(e) => return Err(e),
    };
    let est = VtlEstimate::new(s, q, l_bar);
    for (p, l) in points.iter_mut().zip(est.l) {
        p.l_est_cm = l;
    }
    Ok(Estimation { points, q, l_bar, matrices })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub excluded: Vec<String>,
    pub rms_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub representation_id: String,
    pub h_max: f64,
    pub per_vowel_r: BTreeMap<Vowel, Option<f64>>,
    pub all_r: Option<f64>,
    pub rms_cm: f64,
    pub q: f64,
    pub trials: Vec<Trial>,
}

impl EvalReport {
    pub fn from_estimation(rep: Representation, h_max: f64, est: &Estimation, trials: Vec<Trial>) -> Self {
        Self {
            representation_id: rep.to_string(),
            h_max,
            per_vowel_r: est.per_vowel_r(),
            all_r: est.all_r(),
            rms_cm: est.rms_cm(),
            q: est.q,
            trials,
        }
    }

    /// Mean and sample standard deviation of the trial RMS errors.
    pub fn trial_stats(&self) -> Option<(f64, f64)> {
        mean_std(&self.trials.iter().map(|t| t.rms_cm).collect::<Vec<_>>())
    }
}

fn mean_std(v: &[f64]) -> Option<(f64, f64)> {
    if v.is_empty() {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Some((mean, var.sqrt()))
}

/// Distinct speaker ids in order of first appearance.
pub fn speaker_ids(items: &[AnalyzedUtterance]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for it in items {
        if !ids.contains(&it.speaker_id) {
            ids.push(it.speaker_id.clone());
        }
    }
    ids
}

/// Repeats the estimation `trials` times, each time leaving out `k`
/// speakers drawn uniformly at random (seeded).
pub fn exclusion_trials(
    items: &[AnalyzedUtterance],
    rep: Representation,
    h_max: f64,
    params: &AnalysisParams,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<Trial>> {
    let ids = speaker_ids(items);
    if ids.len() < k + 2 {
        return Err(Error::Config(format!(
            "cannot exclude {k} of {} speakers and keep at least 2",
            ids.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exclusions: Vec<Vec<String>> = (0..trials)
        .map(|_| {
            let mut idx = rand::seq::index::sample(&mut rng, ids.len(), k).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| ids[i].clone()).collect()
        })
        .collect();
    exclusions
        .into_par_iter()
        .map(|excluded| {
            let kept: Vec<AnalyzedUtterance> =
                items.iter().filter(|it| !excluded.contains(&it.speaker_id)).cloned().collect();
            let est = estimate(&kept, rep, h_max, params)?;
            Ok(Trial { excluded, rms_cm: est.rms_cm() })
        })
        .collect()
}

/// The h_max grid 0, 0.5, ..., 6.
pub fn default_hmax_grid() -> Vec<f64> {
    (0..=12).map(|k| k as f64 * 0.5).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h_max: f64,
    pub per_vowel_r: BTreeMap<Vowel, Option<f64>>,
    pub all_r: Option<f64>,
    pub rms_cm: f64,
}

/// Runs the weighted variant of `rep` at every `h_max` in `grid`
/// (`0` gives the unweighted spectrum).
pub fn hmax_sweep(items: &[AnalyzedUtterance], rep: Representation, grid: &[f64], params: &AnalysisParams) -> Result<Vec<SweepRow>> {
    let rep = rep.weighted();
    grid.par_iter()
        .map(|&h| {
            let est = estimate(items, rep, h, params).map_err(|e| e.context(format!("h_max {h}")))?;
            Ok(SweepRow { h_max: h, per_vowel_r: est.per_vowel_r(), all_r: est.all_r(), rms_cm: est.rms_cm() })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn vowel_columns(per_vowel: &BTreeMap<Vowel, Option<f64>>) -> String {
    Vowel::ALL
        .iter()
        .map(|v| opt(per_vowel.get(v).copied().flatten()))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn report_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("representation_id,h_max,r_a,r_i,r_u,r_e,r_o,r_all,rms_cm,q,trial_rms_mean,trial_rms_std,trials\n");
    for r in reports {
        let (m, s) = r.trial_stats().map(|(m, s)| (Some(m), Some(s))).unwrap_or((None, None));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.representation_id,
            r.h_max,
            vowel_columns(&r.per_vowel_r),
            opt(r.all_r),
            r.rms_cm,
            r.q,
            opt(m),
            opt(s),
            r.trials.len()
        );
    }
    out
}

pub fn sweep_csv(rep: Representation, rows: &[SweepRow]) -> String {
    let mut out = String::from("representation_id,h_max,r_a,r_i,r_u,r_e,r_o,r_all,rms_cm\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            rep.weighted(),
            r.h_max,
            vowel_columns(&r.per_vowel_r),
            opt(r.all_r),
            r.rms_cm
        );
    }
    out
}

pub fn trials_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("representation_id,trial,excluded,rms_cm\n");
    for r in reports {
        for (k, t) in r.trials.iter().enumerate() {
            let _ = writeln!(out, "{},{k},{},{}", r.representation_id, t.excluded.join(";"), t.rms_cm);
        }
    }
    out
}

pub fn estimates_csv(est: &Estimation) -> String {
    let mut out = String::from("speaker_id,vowel,S_channels,L_est_cm,L_meas_cm\n");
    for p in &est.points {
        let _ = writeln!(out, "{},{},{},{},{}", p.speaker_id, p.vowel, p.s_channels, p.l_est_cm, p.l_meas_cm);
    }
    out
}

/// Per-point measured vs estimated lengths for every representation.
pub fn scatter_csv(rows: &[(Representation, &Estimation)]) -> String {
    let mut out = String::from("representation_id,speaker_id,vowel,S_channels,L_est_cm,L_meas_cm\n");
    for (rep, est) in rows {
        for p in &est.points {
            let _ = writeln!(out, "{rep},{},{},{},{},{}", p.speaker_id, p.vowel, p.s_channels, p.l_est_cm, p.l_meas_cm);
        }
    }
    out
}

pub fn write_csv(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_spot_values() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson_r(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson_r(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::Degenerate(_))));
        assert!(pearson_r(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn rms_spot_values() {
        assert_eq!(rms_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rms_error(&[1.0, 1.0], &[0.0, 2.0]).unwrap(), 1.0);
        assert!((rms_error(&[3.0, 4.0], &[0.0, 0.0]).unwrap() - 3.5355).abs() < 1e-4);
        assert!(rms_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn grid_has_13_points() {
        let g = default_hmax_grid();
        assert_eq!(g.len(), 13);
        assert_eq!((g[0], g[7], g[12]), (0.0, 3.5, 6.0));
    }

    #[test]
    fn mean_std_of_trials() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[2.0]), Some((2.0, 0.0)));
        let (m, s) = mean_std(&[1.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
