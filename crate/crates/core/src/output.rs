//! Result files.
//!
//! A run writes `timeseries.csv` and `run.json`; a sweep writes `sweep.csv`
//! and `sweep.json`. The JSON documents embed the resolved config.

use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunReport;
use crate::error::{Error, Result};
use crate::sweep::{SweepCell, SweepReport};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const RUN_JSON_FILE: &str = "run.json";
pub const SWEEP_CSV_FILE: &str = "sweep.csv";
pub const SWEEP_JSON_FILE: &str = "sweep.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(&path))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write_run_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir, TIMESERIES_FILE, report.timeseries_csv().as_bytes())?,
        write_file(dir, RUN_JSON_FILE, (report.to_json() + "\n").as_bytes())?,
    ])
}

/// Header `alpha,beta,replications,win_rate,degenerate_runs`, one row per cell.
pub fn sweep_csv(cells: &[SweepCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in cells {
        w.serialize(c).map_err(|source| Error::Csv {
            path: PathBuf::from(SWEEP_CSV_FILE),
            source,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: PathBuf::from(SWEEP_CSV_FILE),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_sweep_csv(text: &str, path: &Path) -> Result<Vec<SweepCell>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<SweepCell>, _>>()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepCell>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_sweep_csv(&text, path)
}

pub fn write_sweep_outputs(report: &SweepReport, dir: &Path) -> Result<Vec<PathBuf>> {
    if report.cells.is_empty() {
        return Err(Error::InvalidArgument("sweep report has no cells".into()));
    }
    let csv = sweep_csv(&report.cells)?;
    let json = serde_json::to_string_pretty(report).expect("sweep report serializes") + "\n";
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir, SWEEP_CSV_FILE, csv.as_bytes())?,
        write_file(dir, SWEEP_JSON_FILE, json.as_bytes())?,
    ])
}
