use std::str::FromStr;

use super::SoftMask;
use crate::dsp::{istft, Spectrogram, Waveform};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the two masked channels are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Downmix {
    #[default]
    Sum,
    Average,
}

impl FromStr for Downmix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::Sum),
            "average" => Ok(Self::Average),
            other => Err(Error::InvalidConfig(format!("unknown downmix {other:?} (expected sum or average)"))),
        }
    }
}

/// `istft(mask * X1 + mask * X2)`, halved for [`Downmix::Average`].
pub fn apply_and_reconstruct<T: Real>(
    mask: &SoftMask<T>,
    x1: &Spectrogram<T>,
    x2: &Spectrogram<T>,
    downmix: Downmix,
) -> Result<Waveform<T>> {
    x1.ensure_compatible(x2)?;
    mask.grid().check_shape(x1.shape())?;
    let scale = match downmix {
        Downmix::Sum => T::one(),
        Downmix::Average => T::lit(0.5),
    };
    let sum = x1.data().zip_map(x2.data(), |a, b| a + b)?;
    let masked = sum.zip_map(mask.grid(), |x, &m| x * (m * scale))?;
    istft(&x1.with_data(masked)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{stft, StftConfig};

    fn signal() -> Waveform<f64> {
        let s = (0..5000).map(|n| (n as f64 * 0.013).sin() * 0.4 + (n as f64 * 0.31).cos() * 0.2).collect();
        Waveform::new(s, 16000).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        let peak = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-6 * peak);
        }
    }

    #[test]
    fn unit_mask_with_silent_second_channel_restores_left() {
        let w = signal();
        let x1 = stft(&w, &StftConfig::default()).unwrap();
        let x2 = stft(&Waveform::zeros(w.len(), 16000).unwrap(), &StftConfig::default()).unwrap();
        let mask = SoftMask::filled(x1.bins(), x1.frames(), 1.0).unwrap();
        let out = apply_and_reconstruct(&mask, &x1, &x2, Downmix::Sum).unwrap();
        assert_close(out.samples(), w.samples());
    }

    #[test]
    fn zero_mask_is_silent() {
        let w = signal();
        let x = stft(&w, &StftConfig::default()).unwrap();
        let mask = SoftMask::filled(x.bins(), x.frames(), 0.0).unwrap();
        let out = apply_and_reconstruct(&mask, &x, &x, Downmix::Sum).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn average_of_identical_channels_is_identity() {
        let w = signal();
        let x = stft(&w, &StftConfig::default()).unwrap();
        let mask = SoftMask::filled(x.bins(), x.frames(), 1.0).unwrap();
        let avg = apply_and_reconstruct(&mask, &x, &x, Downmix::Average).unwrap();
        assert_close(avg.samples(), w.samples());
        let sum = apply_and_reconstruct(&mask, &x, &x, Downmix::Sum).unwrap();
        let doubled: Vec<f64> = w.samples().iter().map(|v| 2.0 * v).collect();
        assert_close(sum.samples(), &doubled);
    }

    #[test]
    fn mask_shape_must_match() {
        let x = stft(&signal(), &StftConfig::default()).unwrap();
        let mask = SoftMask::filled(x.bins(), x.frames() + 1, 1.0).unwrap();
        assert!(matches!(apply_and_reconstruct(&mask, &x, &x, Downmix::Sum), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn downmix_names() {
        assert_eq!("sum".parse::<Downmix>().unwrap(), Downmix::Sum);
        assert_eq!("average".parse::<Downmix>().unwrap(), Downmix::Average);
        assert!("mean".parse::<Downmix>().is_err());
    }
}
