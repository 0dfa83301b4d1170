//! Tabular output: CSV with a header row or JSON as an array of flat
//! records, plus a metadata sidecar next to the data file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "AUCM_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Empty CSV field, JSON `null`.
    Missing,
}

impl Cell {
    /// 15 significant digits, so CSV and JSON carry the same value.
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => format_num(*v)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_num(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0.00000000000000e0"
        return format!("{:.14e}", 0.0);
    }
    format!("{v:.14e}")
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert(c.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&Value::Array(records))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Explicit path if given, else `<AUCM_OUT_DIR or .>/<stem>.<ext>`.
pub fn resolve_path(explicit: Option<&Path>, stem: &str, format: Format) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{stem}.{}", format.extension()))
}

/// Writes the table and a `<path>.meta.json` sidecar.
pub fn emit(table: &Table, format: Format, path: &Path, meta: Value) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Path(path.to_path_buf(), e))?;
    }
    let body = table.render(format)?;
    write_file(path, &body)?;
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta.json");
    let mut meta_body = serde_json::to_vec_pretty(&meta)?;
    meta_body.push(b'\n');
    write_file(Path::new(&meta_path), &meta_body)
}

fn write_file(path: &Path, body: &[u8]) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::Path(path.to_path_buf(), e))?;
    f.write_all(body)
        .map_err(|e| CliError::Path(path.to_path_buf(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_num(5.0 / 6.0), "8.33333333333333e-1");
        assert_eq!(format_num(-0.0), "0.00000000000000e0");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::Num(1.0 / 3.0), "x".into()]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "a,b\n3.33333333333333e-1,x\n");
        let json: Value = serde_json::from_slice(&t.to_json().unwrap()).unwrap();
        let a = json[0]["a"].as_f64().unwrap();
        assert_eq!(a, "3.33333333333333e-1".parse::<f64>().unwrap());
    }
}
