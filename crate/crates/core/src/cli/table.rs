use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Bool(b) => serde_json::Value::from(*b),
        }
    }
}

/// Column-named rows of output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        if self.rows.is_empty() {
            return Err(Error::domain("export", "refusing to export an empty table"));
        }
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                let csv_err = |e: csv::Error| Error::domain("export", e.to_string());
                w.write_record(&self.columns).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv_field)).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| Error::domain("export", e.to_string()))
            }
            Format::Jsonl => {
                let mut out = Vec::new();
                for row in &self.rows {
                    out.push(b'{');
                    for (i, (key, cell)) in self.columns.iter().zip(row).enumerate() {
                        if i > 0 {
                            out.push(b',');
                        }
                        serde_json::to_writer(&mut out, key).expect("string serializes");
                        out.push(b':');
                        serde_json::to_writer(&mut out, &cell.json()).expect("value serializes");
                    }
                    out.extend_from_slice(b"}\n");
                }
                Ok(out)
            }
        }
    }

    pub fn export(&self, path: &Path, format: Format) -> Result<()> {
        let bytes = self.to_bytes(format)?;
        write_file(path, &bytes)
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}
