//! Experiment configuration, the batch grid runner, reports and single-pair processing.

mod acoustics;
mod config;
mod process;
mod report;
mod runner;
mod synth;

pub use acoustics::{
    brir_file_name, direct_peak_index, export_room_brirs, free_field_pair, load_measured_brirs, simulate_brirs, BrirSet, ExportRecord, RoomSource,
    EXPORT_INDEX, MEASURED_DIRECT_WINDOW_MS,
};
pub use config::{
    parse_utterance, utterance_id, ExperimentConfig, RoomConfig, SpecSubSettings, StftSettings, TemplateSettings, UtteranceSource,
    PROPOSED, UNPROCESSED,
};
pub use process::{enhance_pair, process_pair, sidecar_path, OutputFormat, ProcessOptions, ProcessOutcome};
pub use report::{read_cells, summarize, write_cells, AlgorithmMean, CellRow, SummaryRow, SummaryTable, CELLS_HEADER, OVERALL};
pub use runner::{config_hash, run_experiment, RunOutcome, CELLS_FILE, RUN_FILE, SUMMARY_FILE};
pub use synth::{synth_utterance, DEFAULT_SYNTH_LEN};
