//! JSON and CSV writers. The report JSON holds no wall-clock data; the
//! timestamp goes to a `.meta.json` sibling.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::LabError;
use crate::report::{Curves, MasterReport};

pub fn report_json(report: &MasterReport) -> Result<String, LabError> {
    serde_json::to_string_pretty(report).map_err(|e| LabError::Serialise(e.to_string()))
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    generated_unix_seconds: u64,
    tool_version: &'a str,
    report: &'a Path,
    suite_seconds: &'a [(String, f64)],
}

pub fn meta_path(report: &Path) -> PathBuf {
    report.with_extension("meta.json")
}

fn write(path: &Path, text: &str) -> Result<(), LabError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::Io(dir.to_path_buf(), e))?;
    }
    fs::write(path, text).map_err(|e| LabError::Io(path.to_path_buf(), e))
}

pub fn write_report(path: &Path, report: &MasterReport, suite_seconds: &[(String, f64)]) -> Result<(), LabError> {
    write(path, &report_json(report)?)?;
    let meta = Metadata {
        generated_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        tool_version: env!("CARGO_PKG_VERSION"),
        report: path,
        suite_seconds,
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| LabError::Serialise(e.to_string()))?;
    write(&meta_path(path), &text)
}

/// Rows as CSV with a header row.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, LabError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| LabError::Serialise(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Serialise(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| LabError::Serialise(e.to_string()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), LabError> {
    write(path, &csv_string(rows)?)
}

/// Writes the non-empty curves as `decay.csv`, `theta.csv`, `tv.csv` and
/// `scaling.csv` under `dir`; returns the files written.
pub fn write_curves(dir: &Path, curves: &Curves) -> Result<Vec<PathBuf>, LabError> {
    let mut out = Vec::new();
    let mut emit = |name: &str, text: Option<String>| -> Result<(), LabError> {
        if let Some(text) = text {
            let p = dir.join(name);
            write(&p, &text)?;
            out.push(p);
        }
        Ok(())
    };
    fn rows<T: Serialize>(r: &[T]) -> Result<Option<String>, LabError> {
        if r.is_empty() {
            Ok(None)
        } else {
            csv_string(r).map(Some)
        }
    }
    emit("decay.csv", rows(&curves.decay)?)?;
    emit("theta.csv", rows(&curves.theta)?)?;
    emit("tv.csv", rows(&curves.tv)?)?;
    emit("scaling.csv", rows(&curves.scaling)?)?;
    Ok(out)
}

#[derive(Debug, Serialize)]
struct TrajectoryRow {
    time: f64,
    state: u64,
}

/// `(time, state)` rows: the start, then one row per jump.
pub fn trajectory_csv(traj: &mminf_core::simulator::Trajectory) -> Result<String, LabError> {
    let mut rows = vec![TrajectoryRow { time: 0.0, state: traj.initial_state() }];
    rows.extend(traj.jump_times.iter().zip(traj.states.iter().skip(1)).map(|(&time, &state)| TrajectoryRow { time, state }));
    csv_string(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mminf_core::scaling::ThetaPoint;

    #[test]
    fn csv_has_header() {
        let s = csv_string(&[ThetaPoint { t: 0.0, k: 0.0, k_star: 0.0, theta: 1.5 }]).unwrap();
        assert_eq!(s, "t,k,k_star,theta\n0.0,0.0,0.0,1.5\n");
    }

    #[test]
    fn meta_sits_next_to_report() {
        assert_eq!(meta_path(Path::new("out/report.json")), PathBuf::from("out/report.meta.json"));
    }
}
