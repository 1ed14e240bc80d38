use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineKind, SpecSubConfig, WpeConfig};
use crate::error::{Error, Result};
use crate::masking::{BackendKind, Downmix};
use crate::roomsim::{HeadModel, MAX_ORDER_CAP};

fn default_azimuths() -> Vec<f64> {
    (0..=6).map(|i| 15.0 * f64::from(i)).collect()
}

fn default_sample_rate() -> u32 {
    16_000
}

fn default_distance() -> f64 {
    1.5
}

fn default_true() -> bool {
    true
}

fn default_sigma_ipd() -> [f64; 3] {
    [std::f64::consts::PI / 6.0; 3]
}

fn default_sigma_ild() -> [f64; 3] {
    [3.0; 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftSettings {
    pub frame_len: usize,
    pub hop: usize,
}

impl Default for StftSettings {
    fn default() -> Self {
        Self { frame_len: 1024, hop: 256 }
    }
}

/// Gaussian kernel widths for the cue-template backend, per band (low, mid, high).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSettings {
    #[serde(default = "default_sigma_ipd")]
    pub sigma_ipd_rad: [f64; 3],
    #[serde(default = "default_sigma_ild")]
    pub sigma_ild_db: [f64; 3],
    /// Build templates for this azimuth instead of each cell's true azimuth.
    #[serde(default)]
    pub fixed_template_azimuth: Option<f64>,
}

impl Default for TemplateSettings {
    fn default() -> Self {
        Self { sigma_ipd_rad: default_sigma_ipd(), sigma_ild_db: default_sigma_ild(), fixed_template_azimuth: None }
    }
}

/// Spectral-subtraction parameters other than RT60, which comes from the room.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpecSubSettings {
    pub late_boundary_ms: f64,
    pub gain_floor: f64,
    pub smoothing: f64,
}

impl Default for SpecSubSettings {
    fn default() -> Self {
        let d = SpecSubConfig::new(1.0);
        Self { late_boundary_ms: d.late_boundary_ms, gain_floor: d.gain_floor, smoothing: d.smoothing }
    }
}

impl SpecSubSettings {
    pub fn for_rt60(&self, rt60_s: f64) -> SpecSubConfig {
        SpecSubConfig { rt60_s, late_boundary_ms: self.late_boundary_ms, gain_floor: self.gain_floor, smoothing: self.smoothing }
    }
}

/// One room: either simulated from `dims` or loaded from measured BRIRs in `brir_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomConfig {
    pub name: String,
    /// Target RT60; also the RT60 assumed by spectral subtraction.
    pub rt60_s: f64,
    #[serde(default = "default_distance")]
    pub distance_m: f64,
    #[serde(default)]
    pub dims: Option<[f64; 3]>,
    #[serde(default)]
    pub max_order: Option<usize>,
    /// Refine wall reflection so the simulated RT60 matches `rt60_s`.
    #[serde(default = "default_true")]
    pub calibrate: bool,
    /// Directory holding `{name}_az{azimuth}.wav` stereo BRIRs.
    #[serde(default)]
    pub brir_dir: Option<PathBuf>,
}

/// Experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "room")]
    pub rooms: Vec<RoomConfig>,
    #[serde(default = "default_azimuths")]
    pub azimuths_deg: Vec<f64>,
    /// WAV paths, or `synth:N` for seeded pseudo-speech.
    pub utterances: Vec<String>,
    #[serde(default)]
    pub backend: BackendKind,
    #[serde(default)]
    pub baselines: Vec<BaselineKind>,
    #[serde(default)]
    pub downmix: Downmix,
    #[serde(default)]
    pub head_model: HeadModel,
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: u32,
    #[serde(default)]
    pub stft: StftSettings,
    #[serde(default)]
    pub templates: TemplateSettings,
    #[serde(default)]
    pub spectral_subtraction: SpecSubSettings,
    #[serde(default)]
    pub wpe: WpeConfig,
    #[serde(default)]
    pub output_dir: PathBuf,
    /// Offset added to every `synth:N` seed.
    #[serde(default)]
    pub seed: u64,
    /// Also write every processed signal as WAV.
    #[serde(default)]
    pub write_wavs: bool,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it resolve against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        for room in &mut self.rooms {
            if let Some(dir) = room.brir_dir.as_mut() {
                fix(dir);
            }
        }
        for utt in &mut self.utterances {
            if !utt.starts_with(SYNTH_PREFIX) && Path::new(utt.as_str()).is_relative() {
                *utt = base.join(&*utt).to_string_lossy().into_owned();
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.rooms.is_empty() || self.azimuths_deg.is_empty() || self.utterances.is_empty() {
            return bad("need at least one room, one azimuth and one utterance".into());
        }
        if let Some(a) = self.azimuths_deg.iter().find(|a| !(0.0..=90.0).contains(*a)) {
            return bad(format!("azimuth {a} outside [0, 90]"));
        }
        if let Some(a) = self.templates.fixed_template_azimuth {
            if !(0.0..=90.0).contains(&a) {
                return bad(format!("fixed_template_azimuth {a} outside [0, 90]"));
            }
        }
        let mut names = std::collections::HashSet::new();
        for room in &self.rooms {
            if !names.insert(room.name.as_str()) {
                return bad(format!("duplicate room name {:?}", room.name));
            }
            if room.name == super::report::OVERALL {
                return bad(format!("room name {:?} is reserved for the summary row", room.name));
            }
            if room.name.is_empty() || room.name.contains(['/', '\\']) {
                return bad(format!("room name {:?} must be a plain file-name fragment", room.name));
            }
            match (&room.dims, &room.brir_dir) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => return bad(format!("room {:?} needs exactly one of dims or brir_dir", room.name)),
            }
            if !(room.rt60_s >= 0.0 && room.rt60_s.is_finite()) {
                return bad(format!("room {:?}: rt60_s must be >= 0", room.name));
            }
            if !(room.distance_m > 0.0) {
                return bad(format!("room {:?}: distance_m must be positive", room.name));
            }
            if room.max_order.is_some_and(|q| q > MAX_ORDER_CAP) {
                return bad(format!("room {:?}: max_order above {MAX_ORDER_CAP}", room.name));
            }
        }
        let mut ids = std::collections::HashSet::new();
        for utt in &self.utterances {
            parse_utterance(utt)?;
            if !ids.insert(utterance_id(utt)) {
                return bad(format!("utterance id {:?} appears twice", utterance_id(utt)));
            }
        }
        if self.baselines.contains(&BaselineKind::Ss) {
            if let Some(room) = self.rooms.iter().find(|r| r.rt60_s == 0.0) {
                return bad(format!("spectral subtraction needs rt60_s > 0 (room {:?})", room.name));
            }
            self.spectral_subtraction.for_rt60(1.0).validate()?;
        }
        self.wpe.validate()?;
        Ok(())
    }

    /// Every algorithm evaluated per cell, in report order.
    pub fn algorithms(&self) -> Vec<String> {
        let mut out = vec![UNPROCESSED.to_string(), PROPOSED.to_string()];
        for b in &self.baselines {
            if *b != BaselineKind::None && !out.iter().any(|a| a == b.as_str()) {
                out.push(b.as_str().to_string());
            }
        }
        out
    }
}

pub const UNPROCESSED: &str = "unprocessed";
pub const PROPOSED: &str = "proposed";
pub(crate) const SYNTH_PREFIX: &str = "synth:";

/// Where an utterance comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UtteranceSource {
    Synth(u64),
    File(PathBuf),
}

pub fn parse_utterance(spec: &str) -> Result<UtteranceSource> {
    match spec.strip_prefix(SYNTH_PREFIX) {
        Some(n) => n
            .parse()
            .map(UtteranceSource::Synth)
            .map_err(|_| Error::InvalidConfig(format!("bad synthetic utterance {spec:?} (expected synth:<integer>)"))),
        None if spec.is_empty() => Err(Error::InvalidConfig("empty utterance path".into())),
        None => Ok(UtteranceSource::File(PathBuf::from(spec))),
    }
}

/// Short identifier used in reports: `synthN` or the file stem.
pub fn utterance_id(spec: &str) -> String {
    match parse_utterance(spec) {
        Ok(UtteranceSource::Synth(n)) => format!("synth{n}"),
        Ok(UtteranceSource::File(p)) => p.file_stem().map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned()),
        Err(_) => spec.to_string(),
    }
}
