//! Classical dereverberation baselines: late-reverberation spectral subtraction and WPE.

mod spectral;
mod wpe;

pub use spectral::{spectral_subtraction, subtract_late_reverb, SpecSubConfig};
pub use wpe::{wpe, wpe_waveforms, wpe_with_cost, WpeConfig};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Baseline names accepted in configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    None,
    Ss,
    Wpe,
}

impl BaselineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Ss => "ss",
            Self::Wpe => "wpe",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "ss" => Ok(Self::Ss),
            "wpe" => Ok(Self::Wpe),
            other => Err(Error::InvalidConfig(format!("unknown baseline {other:?} (expected none, ss or wpe)"))),
        }
    }
}
