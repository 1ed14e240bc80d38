use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::acoustics::{brir_file_name, BrirSet, RoomSource};
use super::config::{parse_utterance, utterance_id, ExperimentConfig, UtteranceSource, PROPOSED, UNPROCESSED};
use super::report::{write_cells, CellRow, SummaryTable};
use super::synth::{synth_utterance, DEFAULT_SYNTH_LEN};
use crate::baselines::{spectral_subtraction, wpe_waveforms};
use crate::cues::DEFAULT_EPSILON;
use crate::dsp::{convolve, load_wav, normalize, resample, save_wav, stft, StftConfig, WavFormat, Waveform};
use crate::error::{Error, Result};
use crate::masking::{
    apply_and_reconstruct, build_templates, fuse_subband, BackendKind, BandPlan, CueTemplateBackend, MaskBackend, MaskInputs,
    OracleBackend, TemplateWidths,
};
use crate::metrics::{evaluate, MetricsReport};

pub const CELLS_FILE: &str = "cells.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const RUN_FILE: &str = "run.json";

/// Everything a run produced, also written under the output directory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<CellRow>,
    pub summary: SummaryTable,
    pub failed_rows: usize,
    pub cells_path: PathBuf,
    pub summary_path: PathBuf,
}

impl RunOutcome {
    pub fn all_succeeded(&self) -> bool {
        self.failed_rows == 0
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    config_sha256: String,
    algorithms: Vec<String>,
    rows: usize,
    failed_rows: usize,
    config: &'a ExperimentConfig,
}

/// SHA-256 of the config's canonical JSON form.
pub fn config_hash<S: Serialize>(config: &S) -> String {
    let json = serde_json::to_vec(config).expect("config serializes to JSON");
    Sha256::digest(json).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn load_utterance(spec: &str, seed_offset: u64, sample_rate_hz: u32) -> Result<Waveform<f64>> {
    let wave = match parse_utterance(spec)? {
        UtteranceSource::Synth(n) => synth_utterance(n.wrapping_add(seed_offset), DEFAULT_SYNTH_LEN, sample_rate_hz)?,
        UtteranceSource::File(path) => {
            let channels = load_wav::<f64>(&path)?;
            if channels.len() > 1 {
                log::warn!("{}: using the first of {} channels", path.display(), channels.len());
            }
            let first = channels.into_iter().next().ok_or_else(|| Error::ZeroLengthData(path.clone()))?;
            if first.sample_rate_hz() == sample_rate_hz { first } else { resample(&first, sample_rate_hz)? }
        }
    };
    normalize(&wave)
}

/// Acoustics and mask backend shared by every utterance at one room position.
struct Position {
    brirs: BrirSet,
    backend: Box<dyn MaskBackend<f64>>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    stft: StftConfig<f64>,
    plan: BandPlan,
    algorithms: Vec<String>,
}

impl Context<'_> {
    fn position(&self, room_idx: usize, source: &RoomSource, azimuth_deg: f64) -> Result<Position> {
        let cfg = self.config;
        let room = &cfg.rooms[room_idx];
        let fs = cfg.sample_rate_hz;
        let brirs = source.brirs(room, azimuth_deg, cfg.head_model, fs)?;
        let backend: Box<dyn MaskBackend<f64>> = match cfg.backend {
            BackendKind::Oracle => Box::new(OracleBackend { epsilon: DEFAULT_EPSILON }),
            BackendKind::CueTemplate => {
                let template_az = cfg.templates.fixed_template_azimuth.unwrap_or(azimuth_deg);
                let (dl, dr) = if template_az == azimuth_deg {
                    (brirs.direct_left.clone(), brirs.direct_right.clone())
                } else {
                    source.direct_pair(room, template_az, cfg.head_model, fs)?
                };
                let widths = TemplateWidths { sigma_ipd_rad: cfg.templates.sigma_ipd_rad, sigma_ild_db: cfg.templates.sigma_ild_db };
                let templates = build_templates(&dl, &dr, &self.plan, widths, template_az)?;
                Box::new(CueTemplateBackend { templates, epsilon: DEFAULT_EPSILON })
            }
        };
        Ok(Position { brirs, backend })
    }

    /// Metrics of every algorithm for one utterance at one position, in `self.algorithms` order.
    fn cell(&self, room_idx: usize, azimuth_deg: f64, utt_id: &str, pos: &Position, utt: &Waveform<f64>) -> Vec<Result<MetricsReport>> {
        match self.cell_signals(room_idx, pos, utt) {
            Ok((reference, estimates)) => estimates
                .into_iter()
                .zip(&self.algorithms)
                .map(|(est, alg)| {
                    let est = est?;
                    if self.config.write_wavs {
                        self.write_wav(room_idx, azimuth_deg, utt_id, alg, &est)?;
                    }
                    evaluate(&reference, &est)
                })
                .collect(),
            Err(e) => {
                let msg = e.to_string();
                self.algorithms.iter().map(|_| Err(Error::Degenerate(msg.clone()))).collect()
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn cell_signals(&self, room_idx: usize, pos: &Position, utt: &Waveform<f64>) -> Result<(Waveform<f64>, Vec<Result<Waveform<f64>>>)> {
        let cfg = self.config;
        let b = &pos.brirs;
        let mix_l = convolve(utt, &b.left)?;
        let mix_r = convolve(utt, &b.right)?;
        let ref_l = convolve(utt, &b.direct_left)?;
        let x_l = stft(&mix_l, &self.stft)?;
        let x_r = stft(&mix_r, &self.stft)?;
        let direct = if pos.backend.kind() == BackendKind::Oracle {
            Some((stft(&ref_l, &self.stft)?, stft(&convolve(utt, &b.direct_right)?, &self.stft)?))
        } else {
            None
        };
        let estimates = self
            .algorithms
            .iter()
            .map(|alg| match alg.as_str() {
                UNPROCESSED => Ok(mix_l.clone()),
                PROPOSED => {
                    let inputs = MaskInputs { mix_left: &x_l, mix_right: &x_r, direct: direct.as_ref().map(|(l, r)| (l, r)) };
                    let (ipd, ild) = pos.backend.masks(&inputs)?;
                    let fused = fuse_subband(&ipd.direct, &ild.direct, &self.plan)?;
                    apply_and_reconstruct(&fused, &x_l, &x_r, cfg.downmix)
                }
                "ss" => {
                    let ss = cfg.spectral_subtraction.for_rt60(cfg.rooms[room_idx].rt60_s);
                    spectral_subtraction(&mix_l, &ss, &self.stft)
                }
                "wpe" => Ok(wpe_waveforms(&[mix_l.clone(), mix_r.clone()], &cfg.wpe, &self.stft)?.swap_remove(0)),
                other => Err(Error::InvalidConfig(format!("unknown algorithm {other}"))),
            })
            .collect();
        Ok((ref_l, estimates))
    }

    fn write_wav(&self, room_idx: usize, azimuth_deg: f64, utt_id: &str, alg: &str, wave: &Waveform<f64>) -> Result<()> {
        let dir = self.config.output_dir.join("wavs");
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let stem = brir_file_name(&self.config.rooms[room_idx].name, azimuth_deg);
        let stem = stem.trim_end_matches(".wav");
        save_wav(wave, dir.join(format!("{stem}_{utt_id}_{alg}.wav")), WavFormat::Float32)?;
        Ok(())
    }
}

/// Runs every room × azimuth × utterance × algorithm cell and writes the reports.
///
/// Cell failures are recorded in the report rather than aborting the run.
/// Row order follows the config (room, azimuth, utterance, algorithm), so the
/// output is independent of worker scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let fs = config.sample_rate_hz;
    let ctx = Context {
        config,
        stft: StftConfig::hamming(config.stft.frame_len, config.stft.hop)?,
        plan: BandPlan::standard(config.stft.frame_len, fs)?,
        algorithms: config.algorithms(),
    };

    let utterances: Vec<(String, Result<Waveform<f64>>)> = config
        .utterances
        .par_iter()
        .map(|u| (utterance_id(u), load_utterance(u, config.seed, fs)))
        .collect();
    let rooms: Vec<Result<RoomSource>> = config.rooms.par_iter().map(|r| RoomSource::prepare(r, fs)).collect();
    let grid: Vec<(usize, f64)> =
        (0..config.rooms.len()).flat_map(|r| config.azimuths_deg.iter().map(move |&a| (r, a))).collect();
    let positions: Vec<Result<Position>> = grid
        .par_iter()
        .map(|&(r, az)| match &rooms[r] {
            Ok(source) => ctx.position(r, source, az),
            Err(e) => Err(Error::Degenerate(format!("room setup failed: {e}"))),
        })
        .collect();

    let cells: Vec<(usize, usize)> = (0..grid.len()).flat_map(|p| (0..utterances.len()).map(move |u| (p, u))).collect();
    let rows: Vec<Vec<CellRow>> = cells
        .par_iter()
        .map(|&(p, u)| {
            let (room_idx, az) = grid[p];
            let (utt_id, utt) = &utterances[u];
            let results = match (&positions[p], utt) {
                (Ok(pos), Ok(wave)) => ctx.cell(room_idx, az, utt_id, pos, wave),
                (Err(e), _) | (_, Err(e)) => ctx.algorithms.iter().map(|_| Err(Error::Degenerate(e.to_string()))).collect(),
            };
            let room = &config.rooms[room_idx].name;
            results
                .into_iter()
                .zip(&ctx.algorithms)
                .map(|(res, alg)| {
                    if let Err(e) = &res {
                        log::warn!("{room} az {az} {utt_id} {alg}: {e}");
                    }
                    CellRow::new(room, az, utt_id, alg, res)
                })
                .collect()
        })
        .collect();
    let rows: Vec<CellRow> = rows.into_iter().flatten().collect();
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();

    let summary = SummaryTable::from_rows(&rows)?;
    let cells_path = out.join(CELLS_FILE);
    let summary_path = out.join(SUMMARY_FILE);
    write_cells(&cells_path, &rows)?;
    summary.write_csv(&summary_path)?;
    write_run_record(&out.join(RUN_FILE), config, &ctx.algorithms, rows.len(), failed_rows)?;
    Ok(RunOutcome { rows, summary, failed_rows, cells_path, summary_path })
}

fn write_run_record(path: &Path, config: &ExperimentConfig, algorithms: &[String], rows: usize, failed_rows: usize) -> Result<()> {
    let record = RunRecord { config_sha256: config_hash(config), algorithms: algorithms.to_vec(), rows, failed_rows, config };
    let json = serde_json::to_string_pretty(&record).expect("run record serializes");
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}
