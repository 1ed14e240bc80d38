//! Binaural single-source dereverberation.
//!
//! The processing chain: STFT of both microphone signals, interaural level and
//! phase differences per time-frequency bin, direct-path soft masks from a
//! pluggable backend, sub-band fusion of the two masks, then masked
//! reconstruction of the summed channels. Around it sit an image-source room
//! simulator for test material, two classical baselines (late-reverberation
//! spectral subtraction and WPE), objective metrics, and a batch experiment
//! harness.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`, which is what the harness and CLI use.

pub mod baselines;
pub mod cues;
pub mod dsp;
pub mod error;
pub mod harness;
pub mod masking;
pub mod metrics;
pub mod roomsim;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type Waveform = dsp::Waveform<f64>;
pub type StftConfig = dsp::StftConfig<f64>;
pub type Spectrogram = dsp::Spectrogram<f64>;
pub type Rir = roomsim::Rir<f64>;
pub type RoomSpec = roomsim::RoomSpec<f64>;
pub type ArrayGeometry = roomsim::ArrayGeometry<f64>;
pub type SoftMask = masking::SoftMask<f64>;
pub type MaskPair = masking::MaskPair<f64>;
pub type CueTemplates = masking::CueTemplates<f64>;
pub type CueGrid = cues::CueGrid<f64>;
