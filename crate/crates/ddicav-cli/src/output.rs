//! Tabular output: a header block echoing every resolved parameter, fixed
//! column names, and rows of numbers or labels. CSV is the canonical
//! format; JSON mirrors it for programmatic consumers. Formatting is
//! deterministic: identical tables serialize to identical bytes.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Str(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x}"),
            Cell::Int(i) => format!("{i}"),
            Cell::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::json!(x),
            Cell::Int(i) => serde_json::json!(i),
            Cell::Str(s) => serde_json::json!(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    /// Ordered key/value pairs echoed into the output header.
    pub header: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            header: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.header.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut header = serde_json::Map::new();
        for (k, v) in &self.header {
            header.insert(k.clone(), serde_json::json!(v));
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| serde_json::Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        let doc = serde_json::json!({
            "header": header,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("static structure serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Default)]
pub enum Format {
    #[default]
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
