//! Snapshot CSV and run-summary files.
//!
//! A snapshot consists of `#key=value` metadata lines, one header row and
//! one row per cell. Values are written with 17 significant digits
//! (`{:.16e}`), which reproduces every `f64` bitwise on reading.

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Snapshot {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Write through a temporary sibling file that is renamed into place.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let tmp = temp_path(path);
    let result = (|| {
        let mut out = BufWriter::new(fs::File::create(&tmp)?);
        write(&mut out)?;
        out.into_inner().map_err(|e| e.into_error())?.sync_all()
    })();
    match result {
        Ok(()) => fs::rename(&tmp, path),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

pub fn write_snapshot(path: &Path, snapshot: &Snapshot) -> io::Result<()> {
    write_atomic(path, |out| {
        for (k, v) in &snapshot.metadata {
            if k.contains(['=', '\n']) || v.contains('\n') {
                return Err(invalid(format!("metadata entry `{k}` cannot be encoded")));
            }
            writeln!(out, "#{k}={v}")?;
        }
        writeln!(out, "{}", snapshot.columns.join(","))?;
        for row in &snapshot.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    })
}

pub fn read_snapshot(path: &Path) -> io::Result<Snapshot> {
    let file = io::BufReader::new(fs::File::open(path)?);
    let mut snap = Snapshot::default();
    let mut header = false;
    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        if let Some(meta) = line.strip_prefix('#') {
            let (k, v) =
                meta.split_once('=').ok_or_else(|| invalid(format!("line {}: metadata without `=`", lineno + 1)))?;
            snap.metadata.push((k.to_string(), v.to_string()));
        } else if !header {
            snap.columns = line.split(',').map(str::to_string).collect();
            header = true;
        } else if !line.is_empty() {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
            if row.len() != snap.columns.len() {
                return Err(invalid(format!("line {}: expected {} values", lineno + 1, snap.columns.len())));
            }
            snap.rows.push(row);
        }
    }
    if !header {
        return Err(invalid("missing header row"));
    }
    Ok(snap)
}

/// Failure details of an aborted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureInfo {
    pub step: usize,
    pub time: f64,
    pub positivity: bool,
    pub message: String,
}

/// Machine-readable description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub scheme: String,
    pub order: u32,
    pub cells: usize,
    pub cfl: f64,
    pub safety: f64,
    pub t_end: f64,
    pub completed: bool,
    pub steps: usize,
    pub time: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub min_pressure: f64,
    pub wall_time_s: f64,
    pub snapshots: Vec<String>,
    pub failure: Option<FailureInfo>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    write_atomic(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::other)?;
        writeln!(out)
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> io::Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))
}
