//! Objective quality measures and reference alignment.

mod align;
mod cepstral;
mod sdr;
mod srmr;
mod stoi;

pub use align::{align_and_trim, estimate_lag, MAX_LAG};
pub use cepstral::{cepstral_distance, CEPSTRAL_ORDER};
pub use sdr::{si_sdr, SDR_CAP_DB};
pub use srmr::srmr;
pub use stoi::stoi;

use crate::dsp::Waveform;
use crate::error::Result;
use crate::scalar::Real;

/// Scores for one estimate against its reference. `stoi` is clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricsReport {
    pub sdr_db: f64,
    pub stoi: f64,
    pub srmr_db: f64,
    pub cd: f64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "sdr_db,stoi,srmr_db,cd";

    pub fn csv_line(&self) -> String {
        format!("{:.6},{:.6},{:.6},{:.6}", self.sdr_db, self.stoi, self.srmr_db, self.cd)
    }
}

/// Aligns the estimate to the reference, then computes every metric on the overlap.
pub fn evaluate<T: Real>(reference: &Waveform<T>, estimate: &Waveform<T>) -> Result<MetricsReport> {
    let (r, e) = align_and_trim(reference, estimate)?;
    Ok(MetricsReport {
        sdr_db: si_sdr(&r, &e)?,
        stoi: stoi(&r, &e)?.clamp(0.0, 1.0),
        srmr_db: srmr(&e)?,
        cd: cepstral_distance(&r, &e)?,
    })
}

pub(crate) fn to_f64<T: Real>(w: &Waveform<T>) -> Vec<f64> {
    w.samples().iter().map(|v| v.to_f64_lossy()).collect()
}
