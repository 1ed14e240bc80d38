use std::fmt;
use std::str::FromStr;

use super::{cue_template_backend, oracle_irm_backend, CueTemplates, MaskPair};
use crate::cues::extract_cues;
use crate::dsp::Spectrogram;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Mask backend names accepted in configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Oracle,
    #[default]
    CueTemplate,
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::CueTemplate => "cue-template",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Self::Oracle),
            "cue-template" => Ok(Self::CueTemplate),
            other => Err(Error::InvalidConfig(format!("unknown backend {other:?} (expected oracle or cue-template)"))),
        }
    }
}

/// Spectrograms available to a backend. `direct` is only present when the reference is known.
#[derive(Debug, Clone, Copy)]
pub struct MaskInputs<'a, T> {
    pub mix_left: &'a Spectrogram<T>,
    pub mix_right: &'a Spectrogram<T>,
    pub direct: Option<(&'a Spectrogram<T>, &'a Spectrogram<T>)>,
}

/// Produces `(ipd_masks, ild_masks)` for a binaural mixture.
pub trait MaskBackend<T: Real>: Send + Sync {
    fn kind(&self) -> BackendKind;

    fn masks(&self, inputs: &MaskInputs<'_, T>) -> Result<(MaskPair<T>, MaskPair<T>)>;
}

#[derive(Debug, Clone, Copy)]
pub struct OracleBackend<T> {
    pub epsilon: T,
}

impl<T: Real> MaskBackend<T> for OracleBackend<T> {
    fn kind(&self) -> BackendKind {
        BackendKind::Oracle
    }

    fn masks(&self, inputs: &MaskInputs<'_, T>) -> Result<(MaskPair<T>, MaskPair<T>)> {
        let (dl, dr) = inputs
            .direct
            .ok_or_else(|| Error::InvalidConfig("oracle backend needs the direct-path reference".into()))?;
        oracle_irm_backend(inputs.mix_left, inputs.mix_right, dl, dr, self.epsilon)
    }
}

#[derive(Debug, Clone)]
pub struct CueTemplateBackend<T> {
    pub templates: CueTemplates<T>,
    pub epsilon: T,
}

impl<T: Real> MaskBackend<T> for CueTemplateBackend<T> {
    fn kind(&self) -> BackendKind {
        BackendKind::CueTemplate
    }

    fn masks(&self, inputs: &MaskInputs<'_, T>) -> Result<(MaskPair<T>, MaskPair<T>)> {
        let cues = extract_cues(inputs.mix_left, inputs.mix_right, self.epsilon)?;
        cue_template_backend(&cues, &self.templates)
    }
}
