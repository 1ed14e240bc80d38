use realfft::RealFftPlanner;

use super::{TfGrid, Waveform};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

pub const DEFAULT_FRAME_LEN: usize = 1024;
pub const DEFAULT_HOP: usize = 256;

/// Symmetric Hamming window `0.54 - 0.46 cos(2 pi p / (L - 1))`, `p = 0..L`.
pub fn hamming<T: Real>(frame_len: usize) -> Vec<T> {
    if frame_len == 1 {
        return vec![T::one()];
    }
    let denom = (frame_len - 1) as f64;
    (0..frame_len)
        .map(|p| T::lit(0.54 - 0.46 * (2.0 * std::f64::consts::PI * p as f64 / denom).cos()))
        .collect()
}

/// Analysis/synthesis framing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StftConfig<T> {
    frame_len: usize,
    hop: usize,
    window: Vec<T>,
}

impl<T: Real> StftConfig<T> {
    pub fn new(frame_len: usize, hop: usize, window: Vec<T>) -> Result<Self> {
        if frame_len == 0 || hop == 0 || hop > frame_len {
            return Err(Error::InvalidConfig(format!(
                "need 0 < hop <= frame_len, got hop {hop}, frame_len {frame_len}"
            )));
        }
        if frame_len % 2 != 0 {
            return Err(Error::InvalidConfig(format!("frame_len {frame_len} must be even")));
        }
        if window.len() != frame_len {
            return Err(Error::InvalidConfig(format!(
                "window length {} != frame_len {frame_len}",
                window.len()
            )));
        }
        let upper = T::lit(1.0 + 1e-9);
        if window.iter().any(|&w| !(w > T::zero() && w <= upper)) {
            return Err(Error::InvalidConfig("window coefficients must lie in (0, 1]".into()));
        }
        Ok(Self { frame_len, hop, window })
    }

    /// Hamming window with the given framing.
    pub fn hamming(frame_len: usize, hop: usize) -> Result<Self> {
        Self::new(frame_len, hop, hamming(frame_len))
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn window(&self) -> &[T] {
        &self.window
    }

    pub fn bins(&self) -> usize {
        self.frame_len / 2 + 1
    }

    /// Zeros prepended and appended before framing.
    pub fn pad(&self) -> usize {
        self.frame_len - self.hop
    }

    /// Number of frames produced for a signal of `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        let padded = len + 2 * self.pad();
        if padded < self.frame_len {
            0
        } else {
            (padded - self.frame_len) / self.hop + 1
        }
    }

    /// Sum of squared window values landing on each padded-signal sample,
    /// `sum_m w^2(n - m hop)`, over the first `frames` frames.
    pub fn squared_window_sum(&self, frames: usize) -> Vec<T> {
        let len = if frames == 0 { 0 } else { (frames - 1) * self.hop + self.frame_len };
        let mut acc = vec![T::zero(); len];
        for m in 0..frames {
            let start = m * self.hop;
            for (a, &w) in acc[start..start + self.frame_len].iter_mut().zip(&self.window) {
                *a += w * w;
            }
        }
        acc
    }
}

impl<T: Real> Default for StftConfig<T> {
    fn default() -> Self {
        Self::hamming(DEFAULT_FRAME_LEN, DEFAULT_HOP).expect("default STFT parameters are valid")
    }
}

/// One-sided complex time-frequency representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram<T> {
    data: TfGrid<Complex<T>>,
    config: StftConfig<T>,
    sample_rate_hz: u32,
    original_len: usize,
}

impl<T: Real> Spectrogram<T> {
    pub fn from_parts(
        data: TfGrid<Complex<T>>,
        config: StftConfig<T>,
        sample_rate_hz: u32,
        original_len: usize,
    ) -> Result<Self> {
        if data.bins() != config.bins() {
            return Err(Error::ShapeMismatch(format!(
                "{} bins for frame length {}",
                data.bins(),
                config.frame_len()
            )));
        }
        if data.as_slice().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data, config, sample_rate_hz, original_len })
    }

    pub fn data(&self) -> &TfGrid<Complex<T>> {
        &self.data
    }

    pub fn config(&self) -> &StftConfig<T> {
        &self.config
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn bins(&self) -> usize {
        self.data.bins()
    }

    pub fn frames(&self) -> usize {
        self.data.frames()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    /// Centre frequency of a one-sided bin in Hz.
    pub fn bin_frequency_hz(&self, bin: usize) -> f64 {
        bin as f64 * f64::from(self.sample_rate_hz) / self.config.frame_len() as f64
    }

    /// Same metadata with replacement data of identical shape.
    pub fn with_data(&self, data: TfGrid<Complex<T>>) -> Result<Self> {
        self.data.check_shape(data.shape())?;
        Self::from_parts(data, self.config.clone(), self.sample_rate_hz, self.original_len)
    }

    /// Errors unless both spectrograms share shape, framing and rate.
    pub fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.data.check_shape(other.shape())?;
        if self.config != other.config {
            return Err(Error::ShapeMismatch("STFT configurations differ".into()));
        }
        if self.sample_rate_hz != other.sample_rate_hz {
            return Err(Error::RateMismatch { left: self.sample_rate_hz, right: other.sample_rate_hz });
        }
        if self.original_len != other.original_len {
            return Err(Error::ShapeMismatch(format!(
                "original lengths {} vs {}",
                self.original_len, other.original_len
            )));
        }
        Ok(())
    }

    /// Sum of |X|^2 over the two-sided spectrum implied by the one-sided data.
    pub fn two_sided_energy(&self) -> f64 {
        let last = self.bins() - 1;
        let mut total = 0.0;
        for m in 0..self.frames() {
            for (k, c) in self.data.frame(m).iter().enumerate() {
                let e = c.norm_sqr().to_f64_lossy();
                total += if k == 0 || k == last { e } else { 2.0 * e };
            }
        }
        total
    }
}

/// Forward STFT with `frame_len - hop` zeros of padding on both ends.
pub fn stft<T: Real>(wave: &Waveform<T>, config: &StftConfig<T>) -> Result<Spectrogram<T>> {
    let n = config.frame_len();
    let pad = config.pad();
    let frames = config.frame_count(wave.len());
    if frames == 0 {
        return Err(Error::TooShort(format!("{} samples cannot fill a {n}-sample frame", wave.len())));
    }
    let mut padded = vec![T::zero(); wave.len() + 2 * pad];
    padded[pad..pad + wave.len()].copy_from_slice(wave.samples());

    let mut planner = RealFftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf = fft.make_input_vec();
    let mut spectrum = fft.make_output_vec();
    let mut scratch = fft.make_scratch_vec();
    let mut data = Vec::with_capacity(frames * config.bins());
    for m in 0..frames {
        let start = m * config.hop();
        for ((b, &x), &w) in buf.iter_mut().zip(&padded[start..start + n]).zip(config.window()) {
            *b = x * w;
        }
        fft.process_with_scratch(&mut buf, &mut spectrum, &mut scratch)
            .expect("forward fft length");
        data.extend_from_slice(&spectrum);
    }
    Spectrogram::from_parts(
        TfGrid::from_vec(config.bins(), frames, data)?,
        config.clone(),
        wave.sample_rate_hz(),
        wave.len(),
    )
}

/// Weighted overlap-add inverse with squared-window normalization.
pub fn istft<T: Real>(spec: &Spectrogram<T>) -> Result<Waveform<T>> {
    let config = spec.config();
    let n = config.frame_len();
    let pad = config.pad();
    let frames = spec.frames();
    let norm = config.squared_window_sum(frames);
    if pad + spec.original_len() > norm.len() {
        return Err(Error::ShapeMismatch(format!(
            "{frames} frames cannot cover {} samples",
            spec.original_len()
        )));
    }
    let floor = T::lit(1e-12);
    for (i, &w) in norm[pad..pad + spec.original_len()].iter().enumerate() {
        if w < floor {
            return Err(Error::DegenerateNormalization(i));
        }
    }

    let mut planner = RealFftPlanner::<T>::new();
    let ifft = planner.plan_fft_inverse(n);
    let mut freq = ifft.make_input_vec();
    let mut time = ifft.make_output_vec();
    let mut scratch = ifft.make_scratch_vec();
    let scale = T::one() / T::from_usize_lossy(n);
    let mut acc = vec![T::zero(); norm.len()];
    let last = freq.len() - 1;
    for m in 0..frames {
        freq.copy_from_slice(spec.data().frame(m));
        freq[0].im = T::zero();
        freq[last].im = T::zero();
        ifft.process_with_scratch(&mut freq, &mut time, &mut scratch)
            .expect("inverse fft length");
        let start = m * config.hop();
        for ((a, &t), &w) in acc[start..start + n].iter_mut().zip(&time).zip(config.window()) {
            *a += t * scale * w;
        }
    }
    let samples = acc[pad..pad + spec.original_len()]
        .iter()
        .zip(&norm[pad..])
        .map(|(&a, &w)| a / w)
        .collect();
    Waveform::new(samples, spec.sample_rate_hz())
}
