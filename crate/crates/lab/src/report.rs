use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::LabError;

/// `report.csv` → `report.json`; other names get `.json` appended.
pub fn sidecar_path(report: &Path) -> PathBuf {
    match report.extension() {
        Some(ext) if ext == "csv" => report.with_extension("json"),
        _ => {
            let mut name = report.as_os_str().to_owned();
            name.push(".json");
            PathBuf::from(name)
        }
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>, LabError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| LabError::io(path, e))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), LabError> {
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    std::fs::write(path, text + "\n").map_err(|e| LabError::io(path, e))
}

/// Writes `header` and `rows` as CSV.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let fail = |e: csv::Error| LabError::io(path, e);
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}
