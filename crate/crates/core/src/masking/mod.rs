//! Soft time-frequency masks: backends, sub-band fusion and binaural reconstruction.

mod backend;
mod bands;
mod oracle;
mod reconstruct;
mod templates;

pub use backend::{BackendKind, CueTemplateBackend, MaskBackend, MaskInputs, OracleBackend};
pub use bands::{fuse_subband, Band, BandPlan};
pub use oracle::oracle_irm_backend;
pub use reconstruct::{apply_and_reconstruct, Downmix};
pub use templates::{build_templates, cue_template_backend, CueTemplates, TemplateWidths};

use crate::dsp::TfGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real-valued mask with every entry in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask<T> {
    grid: TfGrid<T>,
}

impl<T: Real> SoftMask<T> {
    pub fn new(grid: TfGrid<T>) -> Result<Self> {
        if let Some(v) = grid.as_slice().iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::InvalidConfig(format!("mask value {v} outside [0, 1]")));
        }
        Ok(Self { grid })
    }

    pub fn filled(bins: usize, frames: usize, value: T) -> Result<Self> {
        Self::new(TfGrid::filled(bins, frames, value))
    }

    /// Clamps into [0, 1]; NaN maps to 0.
    pub(crate) fn clamped(grid: TfGrid<T>) -> Self {
        let clamp = |v: &T| if v.is_nan() { T::zero() } else { v.max(T::zero()).min(T::one()) };
        Self { grid: grid.map(clamp) }
    }

    pub fn grid(&self) -> &TfGrid<T> {
        &self.grid
    }

    pub fn into_grid(self) -> TfGrid<T> {
        self.grid
    }

    pub fn shape(&self) -> (usize, usize) {
        self.grid.shape()
    }

    pub fn mean(&self) -> f64 {
        let s = self.grid.as_slice();
        s.iter().map(|v| v.to_f64_lossy()).sum::<f64>() / s.len().max(1) as f64
    }
}

/// Direct-path mask and its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskPair<T> {
    pub direct: SoftMask<T>,
    pub reverb: SoftMask<T>,
}

impl<T: Real> MaskPair<T> {
    pub fn from_direct(direct: SoftMask<T>) -> Self {
        let reverb = SoftMask { grid: direct.grid.map(|&v| T::one() - v) };
        Self { direct, reverb }
    }
}
