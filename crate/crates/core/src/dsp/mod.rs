//! Waveforms, WAV I/O, convolution and STFT analysis-synthesis.

mod convolve;
mod grid;
mod resample;
mod stft;
mod waveform;
mod wav;

pub use convolve::{convolve, linear_convolve};
pub use grid::TfGrid;
pub use resample::resample;
pub use stft::{hamming, istft, stft, Spectrogram, StftConfig, DEFAULT_FRAME_LEN, DEFAULT_HOP};
pub use waveform::{normalize, Waveform};
pub use wav::{load_wav, save_wav, save_wav_channels, WavFormat, WriteReport};
