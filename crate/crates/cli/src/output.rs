//! Tables with provenance columns, written as CSV or as a JSON mirror.

use std::io::Write;

use serde::ser::{Serialize, Serializer};

/// Crate version recorded in every table.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:e}"),
            Cell::Text(v) => f.write_str(v),
            Cell::Bool(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            // JSON has no NaN or infinity
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(v) => s.serialize_str(&format!("{v}")),
            Cell::Text(v) => s.serialize_str(v),
            Cell::Bool(v) => s.serialize_bool(*v),
        }
    }
}

/// Values shared by every row.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub grid: usize,
    pub eps_guard: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Appends the provenance columns to every row.
    pub fn with_provenance(mut self, p: &Provenance) -> Self {
        for c in ["grid", "eps_guard", "seed", "code_version"] {
            self.columns.push(c.to_string());
        }
        for r in &mut self.rows {
            r.push(p.grid.into());
            r.push(p.eps_guard.into());
            r.push(p.seed.into());
            r.push(CODE_VERSION.into());
        }
        self
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV with an optional `# generated_unix=` comment line first.
    pub fn write_csv<W: Write>(&self, out: W, timestamp: Option<u64>) -> csv::Result<()> {
        let mut out = out;
        if let Some(t) = timestamp {
            writeln!(out, "# generated_unix={t}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W, timestamp: Option<u64>) -> serde_json::Result<()> {
        #[derive(serde::Serialize)]
        struct Doc<'a> {
            #[serde(skip_serializing_if = "Option::is_none")]
            generated_unix: Option<u64>,
            #[serde(flatten)]
            table: &'a Table,
        }
        serde_json::to_writer_pretty(
            out,
            &Doc {
                generated_unix: timestamp,
                table: self,
            },
        )
    }
}
