//! WAV input/output, sample-rate conversion and atomic file writes.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Analysis sample rate; other rates are converted on load.
pub const CANONICAL_FS: u32 = 48_000;

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Reads a mono WAV file (16-bit PCM or 32-bit float) as samples in [-1, 1].
///
/// Returns the samples and the file's sample rate.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, u32)> {
    let wav_err = |source| Error::Wav { path: path.to_path_buf(), source };
    let mut reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Input(format!(
            "{}: expected mono audio, found {} channels",
            path.display(),
            spec.channels
        )));
    }
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(wav_err)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(wav_err)?,
        (fmt, bits) => {
            return Err(Error::Input(format!(
                "{}: unsupported sample format {fmt:?}/{bits} bit",
                path.display()
            )));
        }
    };
    Ok((samples, spec.sample_rate))
}

/// Reads a WAV file and converts it to [`CANONICAL_FS`] if needed.
pub fn read_wav_canonical(path: &Path) -> Result<Vec<f64>> {
    let (samples, fs) = read_wav(path)?;
    if fs == CANONICAL_FS {
        return Ok(samples);
    }
    log::warn!(
        "{}: resampling {fs} Hz -> {CANONICAL_FS} Hz by linear interpolation",
        path.display()
    );
    Ok(resample_linear(&samples, fs as f64, CANONICAL_FS as f64))
}

/// Writes mono 16-bit PCM.
pub fn write_wav_i16(path: &Path, samples: &[f64], fs: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: fs,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut cursor = std::io::Cursor::new(Vec::new());
    {
        let wav_err = |source| Error::Wav { path: path.to_path_buf(), source };
        let mut w = hound::WavWriter::new(&mut cursor, spec).map_err(wav_err)?;
        for s in samples {
            let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
            w.write_sample(v).map_err(wav_err)?;
        }
        w.finalize().map_err(wav_err)?;
    }
    write_atomic(path, &cursor.into_inner())
}

/// Linear-interpolation sample-rate conversion.
pub fn resample_linear(x: &[f64], fs_in: f64, fs_out: f64) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let n_out = ((x.len() as f64) * fs_out / fs_in).floor().max(1.0) as usize;
    let step = fs_in / fs_out;
    (0..n_out)
        .map(|i| {
            let pos = i as f64 * step;
            let k = pos.floor() as usize;
            if k + 1 >= x.len() {
                return x[x.len() - 1];
            }
            let t = pos - k as f64;
            x[k] + t * (x[k + 1] - x[k])
        })
        .collect()
}
