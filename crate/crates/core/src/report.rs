//! Report assembly and deterministic file output.
//!
//! Every experiment produces a versioned `report.json` plus flat CSVs.
//! Assertions carry the name of the property they operationalize, the
//! measured values, and a pass flag; the harness exit status is the AND of
//! all assertion flags. File writes go through write-temp-then-rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One machine-checkable assertion in a report.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    /// Which property this checks (e.g. "linearizability dichotomy,
    /// oscillating data: criterion functional bounded below").
    pub name: String,
    pub pass: bool,
    /// Measured values backing the verdict.
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Assertion {
        Assertion { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub experiment: String,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
    pub payload: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(experiment: &str, assertions: Vec<Assertion>, payload: T) -> Report<T> {
        let pass = assertions.iter().all(|a| a.pass);
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            experiment: experiment.to_string(),
            assertions,
            pass,
            payload,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("report.json");
        let bytes = serde_json::to_vec_pretty(self)?;
        atomic_write(&path, &bytes)?;
        Ok(path)
    }
}

/// Write bytes via a temporary file and rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut os = path.as_os_str().to_owned();
    os.push(".tmp");
    let tmp = PathBuf::from(os);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Write a CSV with a header row; each row formatted by the caller.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut buf = String::new();
    buf.push_str(header);
    buf.push('\n');
    for r in rows {
        buf.push_str(r);
        buf.push('\n');
    }
    atomic_write(path, buf.as_bytes())
}

/// CSV dump of a diagnostic series: t, then one column per channel.
pub fn write_series_csv(path: &Path, series: &crate::solver::DiagnosticSeries) -> Result<()> {
    let header = std::iter::once("t".to_string())
        .chain(series.names.iter().cloned())
        .collect::<Vec<_>>()
        .join(",");
    let rows: Vec<String> = series
        .times
        .iter()
        .zip(&series.rows)
        .map(|(t, row)| {
            std::iter::once(format!("{t}"))
                .chain(row.iter().map(|v| format!("{v}")))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    write_csv(path, &header, &rows)
}
