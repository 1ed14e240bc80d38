use std::path::{Path, PathBuf};

use serde::Serialize;

use super::acoustics::free_field_pair;
use super::config::{StftSettings, TemplateSettings};
use super::runner::config_hash;
use crate::cues::DEFAULT_EPSILON;
use crate::dsp::{load_wav, save_wav, stft, StftConfig, WavFormat, Waveform};
use crate::error::{Error, Result};
use crate::masking::{
    apply_and_reconstruct, build_templates, fuse_subband, BackendKind, BandPlan, CueTemplateBackend, Downmix, MaskBackend,
    MaskInputs, OracleBackend, TemplateWidths,
};
use crate::roomsim::HeadModel;

/// Settings for enhancing a single recorded pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessOptions {
    pub backend: BackendKind,
    pub sigma_ipd_rad: [f64; 3],
    pub sigma_ild_db: [f64; 3],
    /// Azimuth of the free-field templates (cue-template backend).
    pub template_azimuth_deg: f64,
    pub template_distance_m: f64,
    pub head_model: HeadModel,
    pub downmix: Downmix,
    pub stft: StftSettings,
    /// Direct-path references (left, right); required by the oracle backend.
    pub direct: Option<(PathBuf, PathBuf)>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Float32,
    Pcm16,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        let t = TemplateSettings::default();
        Self {
            backend: BackendKind::default(),
            sigma_ipd_rad: t.sigma_ipd_rad,
            sigma_ild_db: t.sigma_ild_db,
            template_azimuth_deg: 0.0,
            template_distance_m: 1.5,
            head_model: HeadModel::None,
            downmix: Downmix::default(),
            stft: StftSettings::default(),
            direct: None,
            format: OutputFormat::default(),
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    left: &'a Path,
    right: &'a Path,
    output: &'a Path,
    sample_rate_hz: u32,
    samples: usize,
    clipped_samples: usize,
    config_sha256: String,
    #[serde(flatten)]
    options: &'a ProcessOptions,
}

/// What [`process_pair`] wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessOutcome {
    pub output: PathBuf,
    pub sidecar: PathBuf,
    pub clipped_samples: usize,
}

/// Sidecar path for an output file: same stem, `.json` extension.
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

fn load_mono(path: &Path) -> Result<Waveform<f64>> {
    let mut channels = load_wav::<f64>(path)?;
    if channels.len() != 1 {
        return Err(Error::UnsupportedEncoding { path: path.to_path_buf(), detail: format!("expected mono, found {} channels", channels.len()) });
    }
    Ok(channels.remove(0))
}

fn check_pair(a: &Waveform<f64>, b: &Waveform<f64>) -> Result<()> {
    a.ensure_same_rate(b)?;
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("channel lengths differ: {} vs {}", a.len(), b.len())));
    }
    Ok(())
}

/// Enhances one binaural recording and returns the mono estimate.
pub fn enhance_pair(left: &Waveform<f64>, right: &Waveform<f64>, direct: Option<(&Waveform<f64>, &Waveform<f64>)>, opts: &ProcessOptions) -> Result<Waveform<f64>> {
    check_pair(left, right)?;
    let fs = left.sample_rate_hz();
    let stft_cfg = StftConfig::hamming(opts.stft.frame_len, opts.stft.hop)?;
    let plan = BandPlan::standard(opts.stft.frame_len, fs)?;
    let x_l = stft(left, &stft_cfg)?;
    let x_r = stft(right, &stft_cfg)?;
    let backend: Box<dyn MaskBackend<f64>> = match opts.backend {
        BackendKind::Oracle => Box::new(OracleBackend { epsilon: DEFAULT_EPSILON }),
        BackendKind::CueTemplate => {
            let (dl, dr) = free_field_pair(opts.template_azimuth_deg, opts.template_distance_m, opts.head_model, fs)?;
            let widths = TemplateWidths { sigma_ipd_rad: opts.sigma_ipd_rad, sigma_ild_db: opts.sigma_ild_db };
            let templates = build_templates(&dl, &dr, &plan, widths, opts.template_azimuth_deg)?;
            Box::new(CueTemplateBackend { templates, epsilon: DEFAULT_EPSILON })
        }
    };
    let direct = match direct {
        Some((dl, dr)) => {
            check_pair(dl, dr)?;
            check_pair(left, dl)?;
            Some((stft(dl, &stft_cfg)?, stft(dr, &stft_cfg)?))
        }
        None => None,
    };
    let inputs = MaskInputs { mix_left: &x_l, mix_right: &x_r, direct: direct.as_ref().map(|(l, r)| (l, r)) };
    let (ipd, ild) = backend.masks(&inputs)?;
    let fused = fuse_subband(&ipd.direct, &ild.direct, &plan)?;
    apply_and_reconstruct(&fused, &x_l, &x_r, opts.downmix)
}

/// Reads a left/right WAV pair, enhances it and writes the estimate plus a JSON sidecar.
pub fn process_pair(left: &Path, right: &Path, out: &Path, opts: &ProcessOptions) -> Result<ProcessOutcome> {
    if opts.backend == BackendKind::Oracle && opts.direct.is_none() {
        return Err(Error::Usage("the oracle backend needs --direct-left and --direct-right".into()));
    }
    if !(0.0..=90.0).contains(&opts.template_azimuth_deg) {
        return Err(Error::InvalidConfig(format!("template azimuth {} outside [0, 90]", opts.template_azimuth_deg)));
    }
    let l = load_mono(left)?;
    let r = load_mono(right)?;
    let direct = match &opts.direct {
        Some((dl, dr)) => Some((load_mono(dl)?, load_mono(dr)?)),
        None => None,
    };
    let estimate = enhance_pair(&l, &r, direct.as_ref().map(|(a, b)| (a, b)), opts)?;
    let format = match opts.format {
        OutputFormat::Float32 => WavFormat::Float32,
        OutputFormat::Pcm16 => WavFormat::Pcm16,
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let report = save_wav(&estimate, out, format)?;
    if report.clipped > 0 {
        log::warn!("{}: {} samples clipped by PCM16 encoding", out.display(), report.clipped);
    }
    let sidecar = sidecar_path(out);
    let meta = Sidecar {
        left,
        right,
        output: out,
        sample_rate_hz: estimate.sample_rate_hz(),
        samples: estimate.len(),
        clipped_samples: report.clipped,
        config_sha256: config_hash(opts),
        options: opts,
    };
    let json = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    std::fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))?;
    Ok(ProcessOutcome { output: out.to_path_buf(), sidecar, clipped_samples: report.clipped })
}
