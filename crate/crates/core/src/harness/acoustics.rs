use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, RoomConfig};
use crate::dsp::{load_wav, resample, save_wav_channels, WavFormat, Waveform};
use crate::error::{Error, Result};
use crate::roomsim::{
    binaural_rir_pair, calibrate_reflection, schroeder_rt60, split_rir, ArrayGeometry, Channel, HeadModel, Rir, RoomSpec,
};

/// Taps kept after the main peak of a measured BRIR when isolating its direct path.
pub const MEASURED_DIRECT_WINDOW_MS: f64 = 2.5;

/// Free-field box used for template and direct-path simulations (order 0, so only its size matters).
const FREE_FIELD_DIMS: [f64; 3] = [20.0, 20.0, 10.0];

/// Reverberant and direct-path impulse responses for one source position.
#[derive(Debug, Clone)]
pub struct BrirSet {
    pub left: Rir<f64>,
    pub right: Rir<f64>,
    /// Direct path only, padded to the length of the reverberant pair.
    pub direct_left: Rir<f64>,
    pub direct_right: Rir<f64>,
}

/// Where a room's impulse responses come from.
#[derive(Debug, Clone)]
pub enum RoomSource {
    Simulated(RoomSpec<f64>),
    Measured(PathBuf),
}

impl RoomSource {
    /// Builds (and, if requested, calibrates) a simulated room, or records the BRIR directory.
    pub fn prepare(room: &RoomConfig, sample_rate_hz: u32) -> Result<Self> {
        match (&room.dims, &room.brir_dir) {
            (Some(dims), _) => {
                let mut spec = RoomSpec::new(*dims, room.rt60_s, sample_rate_hz)?;
                if room.calibrate && room.rt60_s > 0.0 {
                    spec = calibrate_reflection(&spec)?;
                }
                if let Some(order) = room.max_order {
                    spec = spec.with_max_order(order)?;
                }
                Ok(Self::Simulated(spec))
            }
            (None, Some(dir)) => Ok(Self::Measured(dir.clone())),
            (None, None) => Err(Error::InvalidConfig(format!("room {:?} has neither dims nor brir_dir", room.name))),
        }
    }

    pub fn brirs(&self, room: &RoomConfig, azimuth_deg: f64, head_model: HeadModel, sample_rate_hz: u32) -> Result<BrirSet> {
        match self {
            Self::Simulated(spec) => simulate_brirs(spec, room.distance_m, azimuth_deg, head_model),
            Self::Measured(dir) => load_measured_brirs(&dir.join(brir_file_name(&room.name, azimuth_deg)), sample_rate_hz),
        }
    }

    /// Direct-path pair used to build cue templates at `azimuth_deg`.
    pub fn direct_pair(
        &self,
        room: &RoomConfig,
        azimuth_deg: f64,
        head_model: HeadModel,
        sample_rate_hz: u32,
    ) -> Result<(Rir<f64>, Rir<f64>)> {
        match self {
            Self::Simulated(spec) => {
                let geom = ArrayGeometry::centered_in(spec, azimuth_deg, room.distance_m)?;
                binaural_rir_pair(&spec.clone().with_max_order(0)?, &geom, head_model)
            }
            Self::Measured(_) => {
                let set = self.brirs(room, azimuth_deg, head_model, sample_rate_hz)?;
                Ok((set.direct_left, set.direct_right))
            }
        }
    }
}

/// `{room}_az{azimuth}.wav`, e.g. `A_az45.wav` or `A_az22.5.wav`.
pub fn brir_file_name(room: &str, azimuth_deg: f64) -> String {
    format!("{room}_az{azimuth_deg}.wav")
}

pub fn simulate_brirs(room: &RoomSpec<f64>, distance_m: f64, azimuth_deg: f64, head_model: HeadModel) -> Result<BrirSet> {
    let geom = ArrayGeometry::centered_in(room, azimuth_deg, distance_m)?;
    let (left, right) = binaural_rir_pair(room, &geom, head_model)?;
    let (dl, dr) = binaural_rir_pair(&room.clone().with_max_order(0)?, &geom, head_model)?;
    Ok(BrirSet { direct_left: dl.padded(left.len()), direct_right: dr.padded(right.len()), left, right })
}

/// Direct-path pair in free field, independent of any room.
pub fn free_field_pair(
    azimuth_deg: f64,
    distance_m: f64,
    head_model: HeadModel,
    sample_rate_hz: u32,
) -> Result<(Rir<f64>, Rir<f64>)> {
    let room = RoomSpec::new(FREE_FIELD_DIMS, 0.0, sample_rate_hz)?.with_max_order(0)?;
    let geom = ArrayGeometry::centered_in(&room, azimuth_deg, distance_m)?;
    binaural_rir_pair(&room, &geom, head_model)
}

/// Loads a stereo BRIR (left, right) resampled to `sample_rate_hz`.
///
/// The direct path of each channel is everything up to
/// [`MEASURED_DIRECT_WINDOW_MS`] after its direct peak (see [`direct_peak_index`]).
pub fn load_measured_brirs(path: &Path, sample_rate_hz: u32) -> Result<BrirSet> {
    let channels = load_wav::<f64>(path)?;
    if channels.len() != 2 {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            detail: format!("BRIR needs 2 channels, found {}", channels.len()),
        });
    }
    let to_rir = |w: &Waveform<f64>, channel| -> Result<Rir<f64>> {
        let w = if w.sample_rate_hz() == sample_rate_hz { w.clone() } else { resample(w, sample_rate_hz)? };
        Rir::new(w.into_samples(), sample_rate_hz, channel)
    };
    let left = to_rir(&channels[0], Channel::Left)?;
    let right = to_rir(&channels[1], Channel::Right)?;
    let (direct_left, _) = split_rir(&left, MEASURED_DIRECT_WINDOW_MS, direct_peak_index(&left))?;
    let (direct_right, _) = split_rir(&right, MEASURED_DIRECT_WINDOW_MS, direct_peak_index(&right))?;
    Ok(BrirSet { left, right, direct_left, direct_right })
}

/// Index of the direct-path peak: the largest tap within 1 ms of the first tap reaching half the global peak.
///
/// Coincident early reflections (floor and ceiling images at equal path length)
/// can outweigh the direct sound, so the global maximum is not used directly.
pub fn direct_peak_index(rir: &Rir<f64>) -> usize {
    let taps = rir.taps();
    let peak = taps.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let onset = taps.iter().position(|t| t.abs() >= 0.5 * peak).unwrap_or(0);
    let search = (f64::from(rir.sample_rate_hz()) * 1e-3).ceil() as usize;
    let end = (onset + search + 1).min(taps.len());
    (onset..end).fold(onset, |best, i| if taps[i].abs() > taps[best].abs() { i } else { best })
}

/// One exported BRIR pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExportRecord {
    pub room: String,
    pub azimuth_deg: f64,
    pub file: String,
    pub wall_reflection: f64,
    pub max_order: usize,
    pub target_rt60_s: f64,
    /// Schroeder RT60 of the left channel; empty when the decay range is too short.
    pub measured_rt60_s: Option<f64>,
    pub taps: usize,
}

pub const EXPORT_INDEX: &str = "brirs.csv";

/// Writes every simulated room/azimuth pair of `config` as stereo float32 WAV plus an index CSV.
///
/// Rooms backed by measured BRIRs are skipped. The files load back through
/// `brir_dir` with the same room names.
pub fn export_room_brirs(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<ExportRecord>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let fs = config.sample_rate_hz;
    let mut records = Vec::new();
    for room in &config.rooms {
        let RoomSource::Simulated(spec) = RoomSource::prepare(room, fs)? else {
            log::info!("room {}: measured BRIRs, nothing to export", room.name);
            continue;
        };
        for &az in &config.azimuths_deg {
            let set = simulate_brirs(&spec, room.distance_m, az, config.head_model)?;
            let file = brir_file_name(&room.name, az);
            let left = Waveform::new(set.left.taps().to_vec(), fs)?;
            let right = Waveform::new(set.right.taps().to_vec(), fs)?;
            save_wav_channels(&[&left, &right], out_dir.join(&file), WavFormat::Float32)?;
            records.push(ExportRecord {
                room: room.name.clone(),
                azimuth_deg: az,
                file,
                wall_reflection: spec.wall_reflection(),
                max_order: spec.max_order(),
                target_rt60_s: room.rt60_s,
                measured_rt60_s: schroeder_rt60(&set.left).ok(),
                taps: set.left.len(),
            });
        }
    }
    let index = out_dir.join(EXPORT_INDEX);
    let mut w = csv::Writer::from_path(&index).map_err(|e| csv_error(&index, e))?;
    for r in &records {
        w.serialize(r).map_err(|e| csv_error(&index, e))?;
    }
    w.flush().map_err(|e| Error::io(&index, e))?;
    Ok(records)
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Report(format!("{}: {other:?}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        assert_eq!(brir_file_name("A", 45.0), "A_az45.wav");
        assert_eq!(brir_file_name("S", 22.5), "S_az22.5.wav");
    }

    #[test]
    fn direct_path_is_a_prefix_of_the_reverberant_response() {
        let room = RoomSpec::new([6.6, 5.7, 2.3], 0.32, 16000).unwrap();
        let set = simulate_brirs(&room, 1.5, 30.0, HeadModel::None).unwrap();
        assert_eq!(set.direct_left.len(), set.left.len());
        let peak = set.direct_left.direct_tap_index();
        assert_eq!(direct_peak_index(&set.left), peak);
        // floor and ceiling images arrive together about 57 taps later
        // (the order-0 render drops interpolator taps below the residual-energy floor)
        for (a, b) in set.left.taps()[..peak + 20].iter().zip(&set.direct_left.taps()[..peak + 20]) {
            assert!((a - b).abs() < 1e-3);
        }
        assert!(set.direct_left.taps()[peak + 40..].iter().all(|&t| t == 0.0));
    }

    #[test]
    fn free_field_pair_has_no_reflections() {
        let (l, r) = free_field_pair(0.0, 1.5, HeadModel::None, 16000).unwrap();
        let nonzero = |rir: &Rir<f64>| rir.taps().iter().filter(|t| t.abs() > 1e-12).count();
        assert!(nonzero(&l) <= 16 && nonzero(&r) <= 16);
        for (a, b) in l.taps().iter().zip(r.taps()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
