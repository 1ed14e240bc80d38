//! Image-source binaural room impulse responses, RT60 calibration and measurement.

mod calibrate;
mod geometry;
mod head;
mod image;
mod room;
mod schroeder;

pub use calibrate::calibrate_reflection;
pub use geometry::{ArrayGeometry, Vec3, MIC_SPACING_M};
pub use head::{HeadModel, HeadShadow};
pub use image::{binaural_rir_pair, image_count, image_source_rir, image_sources, ImageSource, FRACTIONAL_DELAY_TAPS};
pub use room::{eyring_rt60, reflection_coeff_from_rt60, RoomSpec, MAX_ORDER_CAP};
pub use schroeder::{energy_decay_curve_db, schroeder_rt60};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Left,
    Right,
}

/// Room impulse response between a source and one microphone.
#[derive(Debug, Clone, PartialEq)]
pub struct Rir<T> {
    taps: Vec<T>,
    sample_rate_hz: u32,
    channel: Channel,
}

impl<T: Real> Rir<T> {
    pub fn new(taps: Vec<T>, sample_rate_hz: u32, channel: Channel) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidConfig("impulse response needs at least one tap".into()));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite);
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        Ok(Self { taps, sample_rate_hz, channel })
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn energy(&self) -> f64 {
        crate::scalar::energy(&self.taps)
    }

    /// Index of the largest-magnitude tap (first one on ties).
    pub fn direct_tap_index(&self) -> usize {
        let mut best = 0;
        for (i, t) in self.taps.iter().enumerate() {
            if t.abs() > self.taps[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Zero-pad to `len` taps (never shortens).
    pub fn padded(&self, len: usize) -> Self {
        let mut taps = self.taps.clone();
        if taps.len() < len {
            taps.resize(len, T::zero());
        }
        Self { taps, ..*self }
    }
}

/// Partition into early and late parts of equal length so that `early + late == rir`.
///
/// Early keeps taps `0..=direct_tap_index + boundary`; late keeps the rest.
pub fn split_rir<T: Real>(rir: &Rir<T>, boundary_ms: f64, direct_tap_index: usize) -> Result<(Rir<T>, Rir<T>)> {
    if direct_tap_index >= rir.len() {
        return Err(Error::IndexOutOfRange { index: direct_tap_index, len: rir.len() });
    }
    if !(boundary_ms >= 0.0) || !boundary_ms.is_finite() {
        return Err(Error::InvalidConfig(format!("boundary {boundary_ms} ms")));
    }
    let boundary = (boundary_ms * 1e-3 * f64::from(rir.sample_rate_hz)).round() as usize;
    let cut = (direct_tap_index + boundary + 1).min(rir.len());
    let mut early = vec![T::zero(); rir.len()];
    let mut late = vec![T::zero(); rir.len()];
    early[..cut].copy_from_slice(&rir.taps[..cut]);
    late[cut..].copy_from_slice(&rir.taps[cut..]);
    Ok((
        Rir { taps: early, ..*rir },
        Rir { taps: late, ..*rir },
    ))
}
