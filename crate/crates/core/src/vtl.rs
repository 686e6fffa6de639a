//! Relative vocal tract length from pairwise spectral shifts.
//!
//! On an axis that is (close to) logarithmic in frequency, scaling the
//! vocal tract translates the spectral envelope. For a set of same-vowel
//! spectra, every pair is cross-correlated to find that translation in
//! channels; the antisymmetric matrix of pairwise shifts is reduced to one
//! shift per speaker relative to the group mean, and a fitted coefficient
//! `q` converts shifts to lengths via `L_i = exp(q S_i) * L_mean`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axis::{AxisKind, FrequencyAxis};
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

pub const DEFAULT_MAX_LAG: usize = 30;
pub const DEFAULT_INTERP: usize = 10;

/// Search interval and resolution of the coarse stage of [`fit_q`].
pub const Q_RANGE: (f64, f64) = (-2.0, 2.0);
const Q_GRID_STEP: f64 = 1e-3;
const Q_TOL: f64 = 1e-7;

/// Peak lag (in channels, resolution `1/interp`) of the normalized
/// cross-correlation between `a` and `b`.
///
/// Positive values mean the features of `b` sit at higher channels than
/// those of `a`. Both spectra are linearly upsampled by `interp`; at each
/// lag the correlation is the Pearson coefficient of the overlapping
/// parts, so samples outside the channel range contribute nothing and a
/// common spectral tilt does not pull the peak toward zero lag.
pub fn xcorr_shift(a: &Spectrum, b: &Spectrum, max_lag: usize, interp: usize) -> Result<f64> {
    if a.axis() != b.axis() {
        return Err(Error::Input("cross-correlated spectra must share an axis".into()));
    }
    let n = a.values().len();
    if interp == 0 {
        return Err(Error::Config("interpolation factor must be >= 1".into()));
    }
    if max_lag * 3 > n {
        return Err(Error::Config(format!(
            "max lag {max_lag} exceeds a third of the {n} channels"
        )));
    }
    if is_flat(a.values()) || is_flat(b.values()) {
        return Err(Error::Degenerate("flat (zero-variance) spectrum".into()));
    }
    let fa = upsample(a.values(), interp);
    let fb = upsample(b.values(), interp);

    // visit 0, -1, +1, -2, +2, ... so that strict improvement implements the tie-break
    let span = (max_lag * interp) as isize;
    let mut best_lag = 0isize;
    let mut best = overlap_correlation(&fa, &fb, 0);
    for d in 1..=span {
        for lag in [-d, d] {
            let c = overlap_correlation(&fa, &fb, lag);
            if c > best {
                best = c;
                best_lag = lag;
            }
        }
    }
    Ok(best_lag as f64 / interp as f64)
}

fn is_flat(v: &[f64]) -> bool {
    v.iter().all(|x| *x == v[0])
}

/// Pearson coefficient of `fa[k]` against `fb[k + lag]` over the common
/// range; `-inf` when either part has no variance.
fn overlap_correlation(fa: &[f64], fb: &[f64], lag: isize) -> f64 {
    let m = fa.len() as isize;
    let lo = 0.max(-lag);
    let hi = m.min(m - lag);
    let x = &fa[lo as usize..hi as usize];
    let y = &fb[(lo + lag) as usize..(hi + lag) as usize];
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (u, v) in x.iter().zip(y) {
        let (du, dv) = (u - mx, v - my);
        sxy += du * dv;
        sxx += du * du;
        syy += dv * dv;
    }
    if sxx > 0.0 && syy > 0.0 {
        sxy / (sxx * syy).sqrt()
    } else {
        f64::NEG_INFINITY
    }
}

/// Linear interpolation by an integer factor: `(n - 1) * factor + 1` points.
fn upsample(v: &[f64], factor: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity((v.len() - 1) * factor + 1);
    for w in v.windows(2) {
        for j in 0..factor {
            let t = j as f64 / factor as f64;
            out.push(w[0] + t * (w[1] - w[0]));
        }
    }
    out.push(v[v.len() - 1]);
    out
}

/// Antisymmetric matrix of pairwise shifts, `c[i][j] = xcorr_shift(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftMatrix {
    c: Vec<Vec<f64>>,
}

impl ShiftMatrix {
    /// Builds a matrix from its strict upper triangle, mirroring the
    /// negation into the lower triangle.
    pub fn from_upper(n: usize, upper: impl Fn(usize, usize) -> f64) -> Self {
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = upper(i, j);
                c[i][j] = v;
                c[j][i] = -v;
            }
        }
        Self { c }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.c
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in &self.c {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Cross-correlates every pair of spectra.
pub fn build_shift_matrix(spectra: &[Spectrum], max_lag: usize, interp: usize) -> Result<ShiftMatrix> {
    let n = spectra.len();
    if n < 2 {
        return Err(Error::Input(format!("need at least 2 spectra, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let shifts = pairs
        .par_iter()
        .map(|&(i, j)| {
            xcorr_shift(&spectra[i], &spectra[j], max_lag, interp)
                .map_err(|e| e.context(format!("pair ({i}, {j})")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let lookup: std::collections::HashMap<(usize, usize), f64> = pairs.into_iter().zip(shifts).collect();
    Ok(ShiftMatrix::from_upper(n, |i, j| lookup[&(i, j)]))
}

/// Per-speaker shift relative to the group:
/// `S_i = (sum_k c[k][i] - sum_j c[i][j]) / 2N`.
pub fn relative_shifts(m: &ShiftMatrix) -> Vec<f64> {
    let n = m.n();
    (0..n)
        .map(|i| {
            let column: f64 = (0..n).map(|k| m.c[k][i]).sum();
            let row: f64 = m.c[i].iter().sum();
            (column - row) / (2 * n) as f64
        })
        .collect()
}

fn q_objective(s: &[f64], l_meas: &[f64], l_bar: f64, q: f64) -> f64 {
    s.iter()
        .zip(l_meas)
        .map(|(si, li)| {
            let d = l_bar * (q * si).exp() - li;
            d * d
        })
        .sum()
}

/// Least-squares conversion coefficient:
/// `argmin_q sum_i (l_bar exp(q S_i) - l_meas_i)^2` over [-2, 2].
///
/// A 0.001 grid locates the basin, golden-section search refines it.
pub fn fit_q(s: &[f64], l_meas: &[f64], l_bar: f64) -> Result<f64> {
    if s.len() != l_meas.len() {
        return Err(Error::Input(format!(
            "{} shifts but {} measured lengths",
            s.len(),
            l_meas.len()
        )));
    }
    if !(l_bar > 0.0) || l_meas.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Input("lengths must be positive".into()));
    }
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if s.is_empty() || !(hi - lo > 1e-12) {
        return Err(Error::Degenerate("q fit needs at least two distinct shifts".into()));
    }
    let f = |q: f64| q_objective(s, l_meas, l_bar, q);

    let steps = ((Q_RANGE.1 - Q_RANGE.0) / Q_GRID_STEP).round() as usize;
    let mut best_q = Q_RANGE.0;
    let mut best = f(best_q);
    for k in 1..=steps {
        let q = Q_RANGE.0 + k as f64 * Q_GRID_STEP;
        let v = f(q);
        if v < best {
            best = v;
            best_q = q;
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = (best_q - Q_GRID_STEP).max(Q_RANGE.0);
    let mut b = (best_q + Q_GRID_STEP).min(Q_RANGE.1);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > Q_TOL {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    Ok(0.5 * (a + b))
}

/// `L_i = exp(q S_i) * l_bar`.
pub fn estimate_vtl(s: &[f64], q: f64, l_bar: f64) -> Vec<f64> {
    s.iter().map(|si| (q * si).exp() * l_bar).collect()
}

/// Shifts, conversion coefficient and resulting lengths for one speaker set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VtlEstimate {
    pub s: Vec<f64>,
    pub q: f64,
    pub l_bar: f64,
    pub l: Vec<f64>,
}

impl VtlEstimate {
    pub fn new(s: Vec<f64>, q: f64, l_bar: f64) -> Self {
        let l = estimate_vtl(&s, q, l_bar);
        Self { s, q, l_bar, l }
    }
}

/// Frequency ratio corresponding to a shift of `shift` channels.
///
/// Exact on a log axis. On other axes the ratio depends on where the
/// shift happens, so it is evaluated at `ref_freq`.
pub fn channel_shift_to_ratio(axis: &FrequencyAxis, shift: f64, ref_freq: f64) -> Result<f64> {
    if axis.kind() == AxisKind::Log10Hz {
        return Ok((axis.f_hi() / axis.f_lo()).powf(shift / (axis.channels() - 1) as f64));
    }
    if !(ref_freq >= axis.f_lo() && ref_freq <= axis.f_hi()) {
        return Err(Error::Input(format!(
            "reference frequency {ref_freq} Hz outside the axis range [{}, {}] Hz",
            axis.f_lo(),
            axis.f_hi()
        )));
    }
    let kind = axis.kind();
    let x = kind.to_native(ref_freq);
    Ok(kind.from_native(x + shift * axis.spacing()) / kind.from_native(x))
}
