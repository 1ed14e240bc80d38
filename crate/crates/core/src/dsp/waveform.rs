use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sampled mono audio signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<T> {
    samples: Vec<T>,
    sample_rate_hz: u32,
}

impl<T: Real> Waveform<T> {
    pub fn new(samples: Vec<T>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { samples, sample_rate_hz })
    }

    pub fn zeros(len: usize, sample_rate_hz: u32) -> Result<Self> {
        Self::new(vec![T::zero(); len], sample_rate_hz)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    pub fn peak(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, &s| acc.max(s.abs()))
    }

    pub fn scaled(&self, gain: T) -> Result<Self> {
        Self::new(self.samples.iter().map(|&s| s * gain).collect(), self.sample_rate_hz)
    }

    /// Same rate, new sample buffer.
    pub fn with_samples(&self, samples: Vec<T>) -> Result<Self> {
        Self::new(samples, self.sample_rate_hz)
    }

    pub fn ensure_same_rate(&self, other: &Self) -> Result<()> {
        if self.sample_rate_hz != other.sample_rate_hz {
            return Err(Error::RateMismatch { left: self.sample_rate_hz, right: other.sample_rate_hz });
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Waveform<U> {
        Waveform {
            samples: self.samples.iter().map(|&s| U::lit(s.to_f64_lossy())).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

/// Peak normalization to an absolute maximum of 1.0.
pub fn normalize<T: Real>(wave: &Waveform<T>) -> Result<Waveform<T>> {
    let peak = wave.peak();
    if peak == T::zero() {
        return Err(Error::SilentSignal);
    }
    wave.with_samples(wave.samples().iter().map(|&s| s / peak).collect())
}
