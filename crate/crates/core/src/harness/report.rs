use std::path::Path;

use serde::{Deserialize, Serialize};

use super::acoustics::csv_error;
use super::config::UNPROCESSED;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

/// Group name of the all-rooms summary row.
pub const OVERALL: &str = "overall";

/// Header of the per-cell CSV.
pub const CELLS_HEADER: &str = "room,azimuth_deg,utterance,algorithm,sdr_db,stoi,srmr_db,cd,error";

/// One (room, azimuth, utterance, algorithm) result. Exactly one of `metrics` and `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub room: String,
    pub azimuth_deg: f64,
    pub utterance: String,
    pub algorithm: String,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
}

impl CellRow {
    pub fn new(room: &str, azimuth_deg: f64, utterance: &str, algorithm: &str, result: Result<MetricsReport>) -> Self {
        let (metrics, error) = match result {
            Ok(m) => (Some(m), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            room: room.to_string(),
            azimuth_deg,
            utterance: utterance.to_string(),
            algorithm: algorithm.to_string(),
            metrics,
            error,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CellRecord {
    room: String,
    azimuth_deg: f64,
    utterance: String,
    algorithm: String,
    sdr_db: Option<f64>,
    stoi: Option<f64>,
    srmr_db: Option<f64>,
    cd: Option<f64>,
    error: String,
}

impl From<&CellRow> for CellRecord {
    fn from(r: &CellRow) -> Self {
        let m = r.metrics;
        Self {
            room: r.room.clone(),
            azimuth_deg: r.azimuth_deg,
            utterance: r.utterance.clone(),
            algorithm: r.algorithm.clone(),
            sdr_db: m.map(|m| m.sdr_db),
            stoi: m.map(|m| m.stoi),
            srmr_db: m.map(|m| m.srmr_db),
            cd: m.map(|m| m.cd),
            error: r.error.clone().unwrap_or_default(),
        }
    }
}

impl CellRecord {
    fn into_row(self) -> Result<CellRow> {
        let metrics = match (self.sdr_db, self.stoi, self.srmr_db, self.cd) {
            (Some(sdr_db), Some(stoi), Some(srmr_db), Some(cd)) => Some(MetricsReport { sdr_db, stoi, srmr_db, cd }),
            (None, None, None, None) => None,
            _ => return Err(Error::Report(format!("partial metrics in row {}/{}/{}", self.room, self.azimuth_deg, self.algorithm))),
        };
        let error = (!self.error.is_empty()).then_some(self.error);
        if metrics.is_none() && error.is_none() {
            return Err(Error::Report(format!("row {}/{}/{} has neither metrics nor error", self.room, self.azimuth_deg, self.algorithm)));
        }
        Ok(CellRow {
            room: self.room,
            azimuth_deg: self.azimuth_deg,
            utterance: self.utterance,
            algorithm: self.algorithm,
            metrics,
            error,
        })
    }
}

pub fn write_cells(path: &Path, rows: &[CellRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    if rows.is_empty() {
        w.write_record(CELLS_HEADER.split(',')).map_err(|e| csv_error(path, e))?;
    }
    for row in rows {
        w.serialize(CellRecord::from(row)).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_cells(path: &Path) -> Result<Vec<CellRow>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.iter().collect::<Vec<_>>().join(",");
    if header != CELLS_HEADER {
        return Err(Error::Report(format!("{}: unexpected header {header:?}", path.display())));
    }
    r.deserialize::<CellRecord>()
        .map(|rec| rec.map_err(|e| csv_error(path, e)).and_then(CellRecord::into_row))
        .collect()
}

/// Means of one algorithm within one group.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmMean {
    pub algorithm: String,
    /// Rows that produced metrics.
    pub n: usize,
    /// Rows that failed.
    pub failed: usize,
    pub mean: Option<MetricsReport>,
    /// `mean - unprocessed mean`; absent for the unprocessed column itself.
    pub delta: Option<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub algorithms: Vec<AlgorithmMean>,
}

/// Per-room and overall metric means, one row per group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub algorithms: Vec<String>,
    pub rows: Vec<SummaryRow>,
}

const METRIC_NAMES: [&str; 4] = ["sdr_db", "stoi", "srmr_db", "cd"];

fn metric_values(m: &MetricsReport) -> [f64; 4] {
    [m.sdr_db, m.stoi, m.srmr_db, m.cd]
}

fn from_values(v: [f64; 4]) -> MetricsReport {
    MetricsReport { sdr_db: v[0], stoi: v[1], srmr_db: v[2], cd: v[3] }
}

fn first_appearance<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.iter().any(|o| o == s) {
            out.push(s.to_string());
        }
    }
    out
}

impl SummaryTable {
    pub fn from_rows(rows: &[CellRow]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Report("empty report".into()));
        }
        let mut algorithms = first_appearance(rows.iter().map(|r| r.algorithm.as_str()));
        if let Some(i) = algorithms.iter().position(|a| a == UNPROCESSED) {
            let u = algorithms.remove(i);
            algorithms.insert(0, u);
        }
        let rooms = first_appearance(rows.iter().map(|r| r.room.as_str()));
        let mut groups: Vec<(String, Vec<&CellRow>)> =
            rooms.iter().map(|room| (room.clone(), rows.iter().filter(|r| &r.room == room).collect())).collect();
        groups.push((OVERALL.to_string(), rows.iter().collect()));

        let summary_rows = groups
            .into_iter()
            .map(|(group, members)| {
                let means: Vec<AlgorithmMean> = algorithms
                    .iter()
                    .map(|alg| {
                        let of_alg = members.iter().filter(|r| &r.algorithm == alg);
                        let ok: Vec<[f64; 4]> = of_alg.clone().filter_map(|r| r.metrics.as_ref().map(metric_values)).collect();
                        let failed = of_alg.filter(|r| r.metrics.is_none()).count();
                        let mean = (!ok.is_empty()).then(|| {
                            let mut acc = [0.0; 4];
                            for v in &ok {
                                for (a, x) in acc.iter_mut().zip(v) {
                                    *a += x;
                                }
                            }
                            from_values(acc.map(|a| a / ok.len() as f64))
                        });
                        AlgorithmMean { algorithm: alg.clone(), n: ok.len(), failed, mean, delta: None }
                    })
                    .collect();
                let baseline = means.iter().find(|m| m.algorithm == UNPROCESSED).and_then(|m| m.mean);
                let algorithms = means
                    .into_iter()
                    .map(|mut m| {
                        if m.algorithm != UNPROCESSED {
                            m.delta = match (m.mean, baseline) {
                                (Some(a), Some(b)) => {
                                    let (a, b) = (metric_values(&a), metric_values(&b));
                                    Some(from_values([0, 1, 2, 3].map(|i| a[i] - b[i])))
                                }
                                _ => None,
                            };
                        }
                        m
                    })
                    .collect();
                SummaryRow { group, algorithms }
            })
            .collect();
        Ok(Self { algorithms, rows: summary_rows })
    }

    pub fn get(&self, group: &str, algorithm: &str) -> Option<&AlgorithmMean> {
        self.rows.iter().find(|r| r.group == group)?.algorithms.iter().find(|a| a.algorithm == algorithm)
    }

    fn has_deltas(&self) -> bool {
        self.algorithms.iter().any(|a| a == UNPROCESSED)
    }

    /// Column names: `group`, then `{alg}_n`, `{alg}_failed` and the four metric means per
    /// algorithm, then `{alg}_delta_{metric}` for every processed algorithm.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["group".to_string()];
        for alg in &self.algorithms {
            h.push(format!("{alg}_n"));
            h.push(format!("{alg}_failed"));
            h.extend(METRIC_NAMES.iter().map(|m| format!("{alg}_{m}")));
        }
        if self.has_deltas() {
            for alg in self.algorithms.iter().filter(|a| *a != UNPROCESSED) {
                h.extend(METRIC_NAMES.iter().map(|m| format!("{alg}_delta_{m}")));
            }
        }
        h
    }

    fn records(&self) -> Vec<Vec<String>> {
        let fmt = |m: Option<MetricsReport>| -> Vec<String> {
            match m {
                Some(m) => metric_values(&m).iter().map(|v| format!("{v:.6}")).collect(),
                None => vec![String::new(); 4],
            }
        };
        self.rows
            .iter()
            .map(|row| {
                let mut rec = vec![row.group.clone()];
                for a in &row.algorithms {
                    rec.push(a.n.to_string());
                    rec.push(a.failed.to_string());
                    rec.extend(fmt(a.mean));
                }
                if self.has_deltas() {
                    for a in row.algorithms.iter().filter(|a| a.algorithm != UNPROCESSED) {
                        rec.extend(fmt(a.delta));
                    }
                }
                rec
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // writing to memory cannot fail
        w.write_record(self.header()).expect("in-memory csv");
        for rec in self.records() {
            w.write_record(rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Averages a per-cell report per room and overall.
pub fn summarize(report: &Path) -> Result<SummaryTable> {
    SummaryTable::from_rows(&read_cells(report)?)
}
