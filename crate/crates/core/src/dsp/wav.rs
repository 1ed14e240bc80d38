use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::Waveform;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// On-disk sample encoding for [`save_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

/// Outcome of a write. `clipped` counts samples outside [-1, 1] saturated by PCM encoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteReport {
    pub clipped: usize,
}

/// Read a PCM16 or float32 WAV file; returns one waveform per channel (mono or stereo).
pub fn load_wav<T: Real>(path: impl AsRef<Path>) -> Result<Vec<Waveform<T>>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = WavReader::open(path).map_err(|e| match e {
        hound::Error::FormatError(_) | hound::Error::Unsupported => Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            detail: e.to_string(),
        },
        other => Error::Wav { path: path.to_path_buf(), source: other },
    })?;
    let spec = reader.spec();
    let channels = usize::from(spec.channels);
    if channels == 0 || channels > 2 {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            detail: format!("{channels} channels"),
        });
    }
    let wav_err = |e: hound::Error| Error::Wav { path: path.to_path_buf(), source: e };
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f32::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (SampleFormat::Float, 32) => {
            reader.samples::<f32>().collect::<std::result::Result<_, _>>().map_err(wav_err)?
        }
        (fmt, bits) => {
            return Err(Error::UnsupportedEncoding {
                path: path.to_path_buf(),
                detail: format!("{fmt:?} {bits}-bit"),
            })
        }
    };
    if interleaved.is_empty() {
        return Err(Error::ZeroLengthData(path.to_path_buf()));
    }
    (0..channels)
        .map(|c| {
            let samples = interleaved
                .iter()
                .skip(c)
                .step_by(channels)
                .map(|&s| T::lit(f64::from(s)))
                .collect();
            Waveform::new(samples, spec.sample_rate)
        })
        .collect()
}

/// Write a mono waveform.
pub fn save_wav<T: Real>(wave: &Waveform<T>, path: impl AsRef<Path>, format: WavFormat) -> Result<WriteReport> {
    save_wav_channels(&[wave], path, format)
}

/// Write equal-length, equal-rate channels interleaved into one file.
pub fn save_wav_channels<T: Real>(
    channels: &[&Waveform<T>],
    path: impl AsRef<Path>,
    format: WavFormat,
) -> Result<WriteReport> {
    let path = path.as_ref();
    let first = channels
        .first()
        .ok_or_else(|| Error::InvalidConfig("no channels to write".into()))?;
    for ch in &channels[1..] {
        first.ensure_same_rate(ch)?;
        if ch.len() != first.len() {
            return Err(Error::ShapeMismatch(format!("channel lengths {} vs {}", first.len(), ch.len())));
        }
    }
    let spec = WavSpec {
        channels: channels.len() as u16,
        sample_rate: first.sample_rate_hz(),
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => SampleFormat::Int,
            WavFormat::Float32 => SampleFormat::Float,
        },
    };
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Wav { path: path.to_path_buf(), source: other },
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err)?;
    let mut report = WriteReport::default();
    for n in 0..first.len() {
        for ch in channels {
            let v = ch.samples()[n].to_f64_lossy();
            match format {
                WavFormat::Pcm16 => {
                    if v.abs() > 1.0 {
                        report.clipped += 1;
                    }
                    let q = (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    writer.write_sample(q).map_err(wav_err)?;
                }
                WavFormat::Float32 => writer.write_sample(v as f32).map_err(wav_err)?,
            }
        }
    }
    writer.finalize().map_err(wav_err)?;
    if report.clipped > 0 {
        log::warn!("{}: {} samples clipped to full scale", path.display(), report.clipped);
    }
    Ok(report)
}
