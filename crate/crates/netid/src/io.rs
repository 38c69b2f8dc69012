//! System JSON and matrix CSV.
//!
//! A system file is `{"n": 4, "p": 1, "A": [[…], …], "C": [[…]]}`; `n` and `p`
//! are checked against the matrices. Matrices alone may also be given as CSV,
//! one row per line.

use std::fs;
use std::path::Path;

use netid_core::{Matrix, NetworkSystem};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

impl SystemFile {
    pub fn from_system(sys: &NetworkSystem) -> Self {
        SystemFile { n: sys.n(), p: sys.p(), a: rows_of(sys.a()), c: rows_of(sys.c()) }
    }

    /// Matrices with their declared sizes checked.
    pub fn matrices(&self) -> Result<(Matrix, Matrix), String> {
        let a = matrix_from_rows(&self.a).map_err(|e| format!("A: {e}"))?;
        let c = matrix_from_rows(&self.c).map_err(|e| format!("C: {e}"))?;
        if a.nrows() != self.n {
            return Err(format!("\"n\" is {} but A has {} rows", self.n, a.nrows()));
        }
        if c.nrows() != self.p {
            return Err(format!("\"p\" is {} but C has {} rows", self.p, c.nrows()));
        }
        Ok((a, c))
    }

    pub fn to_system(&self) -> Result<NetworkSystem, String> {
        let (a, c) = self.matrices()?;
        NetworkSystem::new(a, c).map_err(|e| e.to_string())
    }
}

pub fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix, String> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 {
        return Err("matrix is empty".into());
    }
    if let Some(k) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("row {k} has {} entries, expected {ncols}", rows[k].len()));
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_system_file(text: &str) -> Result<SystemFile, String> {
    serde_json::from_str(text).map_err(|e| format!("line {} column {}: {e}", e.line(), e.column()))
}

pub fn parse_system(text: &str) -> Result<NetworkSystem, String> {
    parse_system_file(text)?.to_system()
}

/// Syntax and shape problems are parse errors; a well-formed file describing
/// an invalid system is reported by the core validation.
pub fn read_system(path: &Path) -> CliResult<NetworkSystem> {
    let file = parse_system_file(&read_text(path)?).map_err(|m| CliError::parse(path, m))?;
    let (a, c) = file.matrices().map_err(|m| CliError::parse(path, m))?;
    Ok(NetworkSystem::new(a, c)?)
}

pub fn write_system(path: &Path, sys: &NetworkSystem) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&SystemFile::from_system(sys)).expect("plain data serializes");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Shortest text that parses back to the same `f64`; scientific notation
/// only for very small or very large magnitudes.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("line {}: {e}", k + 1))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| format!("line {line}: cannot parse {f:?} as a number")))
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    matrix_from_rows(&rows)
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in m.row_iter() {
        writer.write_record(row.iter().map(|&x| format_float(x))).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Reads a matrix from CSV, or from JSON as an array of rows.
pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = read_text(path)?;
    let parsed = if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<Vec<f64>>>(&text)
            .map_err(|e| format!("line {} column {}: {e}", e.line(), e.column()))
            .and_then(|rows| matrix_from_rows(&rows))
    } else {
        parse_matrix_csv(&text)
    };
    parsed.map_err(|m| CliError::parse(path, m))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_round_trip() {
        let text = r#"{"n": 2, "p": 1, "A": [[0.5, 1], [0, -2]], "C": [[1, 0]]}"#;
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.a()[(0, 1)], 1.0);
        let back = serde_json::to_string(&SystemFile::from_system(&sys)).unwrap();
        assert_eq!(parse_system(&back).unwrap(), sys);
    }

    #[test]
    fn system_errors_carry_location() {
        let err = parse_system("{\"n\": 2,\n \"p\": }").unwrap_err();
        assert!(err.starts_with("line 2"), "{err}");
        let err = parse_system(r#"{"n": 3, "p": 1, "A": [[1]], "C": [[1]]}"#).unwrap_err();
        assert!(err.contains("\"n\""), "{err}");
    }

    #[test]
    fn csv_round_trip() {
        let m = Matrix::from_row_slice(2, 3, &[1.0, -0.25, 1e-20, 0.0, 3.0e17, 0.1]);
        let text = matrix_to_csv(&m);
        assert!(text.ends_with('\n'));
        assert_eq!(parse_matrix_csv(&text).unwrap(), m);
        assert!(parse_matrix_csv("1,2\n3,x\n").unwrap_err().contains("line 2"));
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
    }
}
