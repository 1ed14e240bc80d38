use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dereverb_core::dsp::load_wav;
use dereverb_core::harness::{
    export_room_brirs, process_pair, run_experiment, summarize, ExperimentConfig, OutputFormat, ProcessOptions, StftSettings, EXPORT_INDEX,
};
use dereverb_core::masking::{BackendKind, Downmix};
use dereverb_core::metrics::{evaluate, MetricsReport};
use dereverb_core::roomsim::HeadModel;
use dereverb_core::{Error, Waveform};

#[derive(Parser)]
#[command(name = "dereverb", version, about = "Binaural dereverberation with interaural-cue masks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the rooms x azimuths x utterances grid described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Enhance one left/right recording.
    Process(ProcessArgs),
    /// Export the simulated BRIRs of a config as stereo float32 WAV files.
    SimulateRoom {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score an estimate against a reference; prints `sdr_db,stoi,srmr_db,cd`.
    Metrics {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        est: PathBuf,
        /// Print the column names first.
        #[arg(long)]
        header: bool,
    },
    /// Average a per-cell report per room and overall.
    Summarize {
        #[arg(long)]
        report: PathBuf,
        /// Also write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Oracle,
    CueTemplate,
}

#[derive(Clone, Copy, ValueEnum)]
enum DownmixArg {
    Sum,
    Average,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeadArg {
    None,
    Spherical,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Float32,
    Pcm16,
}

#[derive(Args)]
struct ProcessArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long, value_enum, default_value = "cue-template")]
    backend: BackendArg,
    #[arg(long)]
    out: PathBuf,
    /// Direct-path reference for the left channel (oracle backend).
    #[arg(long, required_if_eq("backend", "oracle"), requires = "direct_right")]
    direct_left: Option<PathBuf>,
    #[arg(long, required_if_eq("backend", "oracle"), requires = "direct_left")]
    direct_right: Option<PathBuf>,
    /// Source azimuth the cue templates assume, in degrees.
    #[arg(long, default_value_t = 0.0)]
    template_azimuth: f64,
    #[arg(long, default_value_t = 1.5)]
    template_distance: f64,
    /// IPD kernel width in radians: one value, or low,mid,high.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sigma_ipd: Option<Vec<f64>>,
    /// ILD kernel width in dB: one value, or low,mid,high.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sigma_ild: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "sum")]
    downmix: DownmixArg,
    #[arg(long, value_enum, default_value = "none")]
    head_model: HeadArg,
    #[arg(long, value_enum, default_value = "float32")]
    format: FormatArg,
    #[arg(long, default_value_t = 1024)]
    frame_len: usize,
    #[arg(long, default_value_t = 256)]
    hop: usize,
}

fn widths(values: Option<Vec<f64>>, default: [f64; 3], flag: &str) -> Result<[f64; 3]> {
    match values.as_deref() {
        None => Ok(default),
        Some([v]) => Ok([*v; 3]),
        Some([a, b, c]) => Ok([*a, *b, *c]),
        Some(other) => bail!("--{flag} takes 1 or 3 values, got {}", other.len()),
    }
}

impl ProcessArgs {
    fn options(self) -> Result<(PathBuf, PathBuf, PathBuf, ProcessOptions)> {
        let d = ProcessOptions::default();
        let opts = ProcessOptions {
            backend: match self.backend {
                BackendArg::Oracle => BackendKind::Oracle,
                BackendArg::CueTemplate => BackendKind::CueTemplate,
            },
            sigma_ipd_rad: widths(self.sigma_ipd, d.sigma_ipd_rad, "sigma-ipd")?,
            sigma_ild_db: widths(self.sigma_ild, d.sigma_ild_db, "sigma-ild")?,
            template_azimuth_deg: self.template_azimuth,
            template_distance_m: self.template_distance,
            head_model: match self.head_model {
                HeadArg::None => HeadModel::None,
                HeadArg::Spherical => HeadModel::Spherical,
            },
            downmix: match self.downmix {
                DownmixArg::Sum => Downmix::Sum,
                DownmixArg::Average => Downmix::Average,
            },
            stft: StftSettings { frame_len: self.frame_len, hop: self.hop },
            direct: self.direct_left.zip(self.direct_right),
            format: match self.format {
                FormatArg::Float32 => OutputFormat::Float32,
                FormatArg::Pcm16 => OutputFormat::Pcm16,
            },
        };
        Ok((self.left, self.right, self.out, opts))
    }
}

fn first_channel(path: &Path) -> Result<Waveform> {
    let mut channels = load_wav::<f64>(path)?;
    if channels.len() > 1 {
        log::warn!("{}: scoring the first of {} channels", path.display(), channels.len());
    }
    Ok(channels.swap_remove(0))
}

/// Exit status 1 means the command ran but some grid cells failed.
fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run { config, output_dir } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let outcome = run_experiment(&cfg)?;
            print!("{}", outcome.summary.to_csv_string());
            log::info!("wrote {} and {}", outcome.cells_path.display(), outcome.summary_path.display());
            if !outcome.all_succeeded() {
                log::error!("{} of {} rows failed; see the error column", outcome.failed_rows, outcome.rows.len());
                return Ok(ExitCode::from(1));
            }
        }
        Command::Process(args) => {
            let (left, right, out, opts) = args.options()?;
            let res = process_pair(&left, &right, &out, &opts)?;
            log::info!("wrote {} and {}", res.output.display(), res.sidecar.display());
        }
        Command::SimulateRoom { config, out_dir } => {
            let cfg = ExperimentConfig::load(&config)?;
            let records = export_room_brirs(&cfg, &out_dir)?;
            for r in &records {
                let measured = r.measured_rt60_s.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
                println!("{}: target {:.3} s, measured {measured} s, reflection {:.4}, order {}", r.file, r.target_rt60_s, r.wall_reflection, r.max_order);
            }
            log::info!("index written to {}", out_dir.join(EXPORT_INDEX).display());
        }
        Command::Metrics { reference, est, header } => {
            let (r, e) = (first_channel(&reference)?, first_channel(&est)?);
            let report = evaluate(&r, &e).with_context(|| format!("scoring {} against {}", est.display(), reference.display()))?;
            if header {
                println!("{}", MetricsReport::CSV_HEADER);
            }
            println!("{}", report.csv_line());
        }
        Command::Summarize { report, out } => {
            let table = summarize(&report)?;
            if let Some(path) = out {
                table.write_csv(&path)?;
            }
            print!("{}", table.to_csv_string());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Usage(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
