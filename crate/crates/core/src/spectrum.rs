//! Spectra, spectrograms and the transforms shared by every front end:
//! amplitude compression, time averaging around the utterance center,
//! and resampling onto another frequency axis.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::axis::FrequencyAxis;
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Relative floor applied before log compression (100 dB below the maximum).
pub const LOG_FLOOR_REL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Compression {
    None,
    /// 20 log10(S), in dB.
    Log,
    /// S^P with P on the 0.1 grid in [0.1, 1.0].
    Power(f64),
}

impl Compression {
    pub fn validate(self) -> Result<Self> {
        if let Compression::Power(p) = self {
            let tenths = (p * 10.0).round();
            if !(0.1 - 1e-9..=1.0 + 1e-9).contains(&p) || (p * 10.0 - tenths).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "power exponent must be one of 0.1, 0.2, ..., 1.0, got {p}"
                )));
            }
            return Ok(Compression::Power(tenths / 10.0));
        }
        Ok(self)
    }

    fn nonnegative(self) -> bool {
        !matches!(self, Compression::Log)
    }
}

impl std::fmt::Display for Compression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Compression::None => f.write_str("none"),
            Compression::Log => f.write_str("log"),
            Compression::Power(p) => write!(f, "{p:.1}"),
        }
    }
}

/// One value per channel of `axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    axis: FrequencyAxis,
    compression: Compression,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, axis: FrequencyAxis, compression: Compression) -> Result<Self> {
        if values.len() != axis.channels() {
            return Err(Error::Input(format!(
                "spectrum has {} values but the axis has {} channels",
                values.len(),
                axis.channels()
            )));
        }
        if compression.nonnegative() && values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Input(format!(
                "{compression}-compressed spectrum must be nonnegative"
            )));
        }
        Ok(Self { values, axis, compression })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn axis(&self) -> &FrequencyAxis {
        &self.axis
    }

    pub fn compression(&self) -> Compression {
        self.compression
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("channel,center_hz,value\n");
        for (c, (f, v)) in self.axis.centers().iter().zip(&self.values).enumerate() {
            let _ = writeln!(out, "{c},{f},{v}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv_string().as_bytes())
    }
}

/// Frames x channels, with frame `k` centered at `t0 + k * frame_period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrogram {
    frames: Vec<Vec<f64>>,
    frame_period: f64,
    t0: f64,
    axis: FrequencyAxis,
    compression: Compression,
}

impl Spectrogram {
    pub fn new(
        frames: Vec<Vec<f64>>,
        frame_period: f64,
        t0: f64,
        axis: FrequencyAxis,
        compression: Compression,
    ) -> Result<Self> {
        if !(frame_period > 0.0) {
            return Err(Error::Input(format!("frame period must be > 0, got {frame_period}")));
        }
        if frames.is_empty() {
            return Err(Error::Input("spectrogram has no frames".into()));
        }
        if let Some(k) = frames.iter().position(|r| r.len() != axis.channels()) {
            return Err(Error::Input(format!(
                "frame {k} has {} values but the axis has {} channels",
                frames[k].len(),
                axis.channels()
            )));
        }
        if compression.nonnegative() && frames.iter().flatten().any(|v| !(*v >= 0.0)) {
            return Err(Error::Input(format!(
                "{compression}-compressed spectrogram must be nonnegative"
            )));
        }
        Ok(Self { frames, frame_period, t0, axis, compression })
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn frame_period(&self) -> f64 {
        self.frame_period
    }

    pub fn axis(&self) -> &FrequencyAxis {
        &self.axis
    }

    pub fn compression(&self) -> Compression {
        self.compression
    }

    pub fn frame_center(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.frame_period
    }

    /// Time span covered by the frames, `[first center - period/2, last center + period/2]`.
    pub fn span(&self) -> (f64, f64) {
        let half = 0.5 * self.frame_period;
        (self.t0 - half, self.frame_center(self.frames.len() - 1) + half)
    }

    /// Channel-major CSV: one row per channel, one column per frame.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("channel,center_hz");
        for k in 0..self.frames.len() {
            let _ = write!(out, ",t={}", self.frame_center(k));
        }
        out.push('\n');
        for (c, f) in self.axis.centers().iter().enumerate() {
            let _ = write!(out, "{c},{f}");
            for row in &self.frames {
                let _ = write!(out, ",{}", row[c]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv_string().as_bytes())
    }
}

/// Element-wise log or power compression of an uncompressed spectrogram.
pub fn compress(sg: &Spectrogram, mode: Compression) -> Result<Spectrogram> {
    if sg.compression != Compression::None {
        return Err(Error::Input(format!(
            "spectrogram is already {}-compressed",
            sg.compression
        )));
    }
    let mode = mode.validate()?;
    let frames = match mode {
        Compression::None => {
            return Err(Error::Input("compression mode must be log or power".into()));
        }
        Compression::Log => {
            let peak = sg.frames.iter().flatten().fold(0.0f64, |m, v| m.max(*v));
            let floor = (LOG_FLOOR_REL * peak).max(f64::MIN_POSITIVE);
            map_frames(&sg.frames, |v| 20.0 * v.max(floor).log10())
        }
        Compression::Power(p) if p == 1.0 => sg.frames.clone(),
        Compression::Power(p) => map_frames(&sg.frames, |v| v.powf(p)),
    };
    Ok(Spectrogram { frames, compression: mode, ..sg.clone() })
}

fn map_frames(frames: &[Vec<f64>], f: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    frames.iter().map(|r| r.iter().map(|v| f(*v)).collect()).collect()
}

/// Per-channel mean over the frames centered within `center ± half_width`.
pub fn center_average(sg: &Spectrogram, center: f64, half_width: f64) -> Result<Spectrum> {
    let (t_start, t_end) = sg.span();
    let (lo, hi) = (center - half_width, center + half_width);
    let tol = 1e-9 * sg.frame_period.max(1.0);
    if !(half_width >= 0.0) || lo < t_start - tol || hi > t_end + tol {
        return Err(Error::Input(format!(
            "averaging window [{lo:.6}, {hi:.6}] s lies outside the spectrogram span [{t_start:.6}, {t_end:.6}] s"
        )));
    }
    let mut acc = vec![0.0; sg.axis.channels()];
    let mut count = 0usize;
    for (k, row) in sg.frames.iter().enumerate() {
        let t = sg.frame_center(k);
        if t >= lo - tol && t <= hi + tol {
            acc.iter_mut().zip(row).for_each(|(a, v)| *a += v);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Input(format!(
            "no frame centers within [{lo:.6}, {hi:.6}] s"
        )));
    }
    let n = count as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Spectrum::new(acc, sg.axis, sg.compression)
}

/// Averages around the midpoint of the spectrogram's span.
pub fn center_average_mid(sg: &Spectrogram, half_width: f64) -> Result<Spectrum> {
    let (a, b) = sg.span();
    center_average(sg, 0.5 * (a + b), half_width)
}

/// Linear interpolation onto `target`'s centers.
///
/// Interpolation runs in the native coordinate of the target axis, so a
/// spectrum that is linear in that coordinate is reproduced exactly.
pub fn resample_to_axis(s: &Spectrum, target: &FrequencyAxis) -> Result<Spectrum> {
    if s.axis == *target {
        return Ok(s.clone());
    }
    if !s.axis.covers(target.f_lo(), target.f_hi()) {
        return Err(Error::Input(format!(
            "source axis [{}, {}] Hz does not cover target [{}, {}] Hz",
            s.axis.f_lo(),
            s.axis.f_hi(),
            target.f_lo(),
            target.f_hi()
        )));
    }
    let kind = target.kind();
    let (xs, ys): (Vec<f64>, Vec<f64>) = s
        .axis
        .centers()
        .into_iter()
        .map(|f| kind.to_native(f))
        .zip(s.values.iter().copied())
        .filter(|(x, _)| x.is_finite())
        .unzip();
    let values = (0..target.channels())
        .map(|c| interp_linear(&xs, &ys, target.native_at(c as f64)))
        .collect();
    Spectrum::new(values, *target, s.compression)
}

/// Piecewise-linear interpolation on increasing `xs`, clamped at the ends.
pub(crate) fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let hi = xs.partition_point(|v| *v <= x).min(n - 1);
    let lo = hi - 1;
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::{AxisKind, FrequencyAxis};

    fn axis(n: usize) -> FrequencyAxis {
        FrequencyAxis::new(AxisKind::ErbLinear, n, 100.0, 8000.0).unwrap()
    }

    fn sg(frames: Vec<Vec<f64>>) -> Spectrogram {
        let n = frames[0].len();
        Spectrogram::new(frames, 0.001, 0.0005, axis(n), Compression::None).unwrap()
    }

    #[test]
    fn spectrum_validates_length_and_sign() {
        assert!(Spectrum::new(vec![1.0; 3], axis(4), Compression::None).is_err());
        assert!(Spectrum::new(vec![-1.0, 0.0], axis(2), Compression::None).is_err());
        assert!(Spectrum::new(vec![-1.0, 0.0], axis(2), Compression::Log).is_ok());
    }

    #[test]
    fn compress_spot_values() {
        let s = sg(vec![vec![10.0, 4.0]]);
        assert_eq!(compress(&s, Compression::Log).unwrap().frames()[0][0], 20.0);
        let p = compress(&s, Compression::Power(0.5)).unwrap();
        assert_eq!(p.frames()[0][1], 2.0);
        assert_eq!(compress(&s, Compression::Power(1.0)).unwrap().frames(), s.frames());
    }

    #[test]
    fn compress_rejects_recompression_and_bad_exponent() {
        let s = compress(&sg(vec![vec![1.0, 2.0]]), Compression::Log).unwrap();
        assert!(matches!(compress(&s, Compression::Log), Err(Error::Input(_))));
        let raw = sg(vec![vec![1.0, 2.0]]);
        assert!(matches!(compress(&raw, Compression::Power(0.25)), Err(Error::Config(_))));
        assert!(matches!(compress(&raw, Compression::Power(1.5)), Err(Error::Config(_))));
        assert!(compress(&raw, Compression::None).is_err());
    }

    #[test]
    fn log_floor_avoids_infinity() {
        let s = sg(vec![vec![0.0, 1.0]]);
        let c = compress(&s, Compression::Log).unwrap();
        assert_eq!(c.frames()[0][0], -100.0);
    }

    #[test]
    fn center_average_constant_and_two_frames() {
        let constant = sg(vec![vec![3.0, 5.0]; 10]);
        let avg = center_average_mid(&constant, 0.002).unwrap();
        assert_eq!(avg.values(), &[3.0, 5.0]);

        // frame centers at 0.5, 1.5, 2.5, 3.5 ms; window [1.0, 3.0] ms holds two
        let s = sg(vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![3.0, 6.0], vec![9.0, 9.0]]);
        let avg = center_average(&s, 0.002, 0.001).unwrap();
        assert_eq!(avg.values(), &[2.0, 4.0]);
    }

    #[test]
    fn center_average_outside_span_fails() {
        let s = sg(vec![vec![1.0, 1.0]; 4]);
        assert!(matches!(center_average(&s, 0.002, 0.01), Err(Error::Input(_))));
    }

    #[test]
    fn resample_identity_and_linear_exactness() {
        let src_axis = FrequencyAxis::new(AxisKind::LinearHz, 400, 0.0, 10_000.0).unwrap();
        let target = FrequencyAxis::canonical_log10();
        let vals: Vec<f64> = src_axis
            .centers()
            .iter()
            .map(|f| if *f > 0.0 { 3.0 * f.log10() - 1.0 } else { 0.0 })
            .collect();
        let s = Spectrum::new(vals, src_axis, Compression::Log).unwrap();
        let r = resample_to_axis(&s, &target).unwrap();
        for (c, v) in r.values().iter().enumerate() {
            let expect = 3.0 * target.center_freq(c).log10() - 1.0;
            assert!((v - expect).abs() < 1e-9, "channel {c}: {v} vs {expect}");
        }
        assert_eq!(resample_to_axis(&r, &target).unwrap(), r);
    }

    #[test]
    fn resample_requires_coverage() {
        let src = Spectrum::new(vec![1.0; 10], FrequencyAxis::new(AxisKind::Log10Hz, 10, 200.0, 8000.0).unwrap(), Compression::None).unwrap();
        assert!(matches!(resample_to_axis(&src, &FrequencyAxis::canonical_log10()), Err(Error::Input(_))));
    }

    #[test]
    fn csv_has_header_and_one_row_per_channel() {
        let s = Spectrum::new(vec![0.5; 5], axis(5), Compression::None).unwrap();
        let text = s.to_csv_string();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "channel,center_hz,value");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,100,0.5"));
    }
}
