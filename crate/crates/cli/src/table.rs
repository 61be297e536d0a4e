//! Result tables with `#`-prefixed metadata, written as CSV or JSON.

use serde_json::{json, Value};
use std::io::Write;

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Empty for a clean row, otherwise the reason the row holds non-finite values.
    pub flags: Vec<String>,
    pub metadata: Vec<(String, String)>,
}

/// Shortest representation that reads back to the same binary64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), flags: Vec::new(), metadata: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>, flag: String) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.flags.push(flag);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn flagged(&self) -> usize {
        self.flags.iter().filter(|f| !f.is_empty()).count()
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}").map_err(io)?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let mut header = self.columns.clone();
            header.push("flag".into());
            w.write_record(&header).map_err(io)?;
            for (row, flag) in self.rows.iter().zip(&self.flags) {
                let mut rec: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
                rec.push(flag.clone());
                w.write_record(&rec).map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        String::from_utf8(out).map_err(io)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let meta: serde_json::Map<String, Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|v| if v.is_finite() { json!(v) } else { Value::Null }).collect()))
            .collect();
        let doc = json!({ "metadata": meta, "columns": self.columns, "rows": rows, "flags": self.flags });
        let mut s = serde_json::to_string_pretty(&doc).map_err(io)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut metadata = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((k, v)) = line[1..].split_once('=') {
                metadata.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(io)?.iter().map(str::to_string).collect();
        if header.last().map(String::as_str) != Some("flag") {
            return Err(CliError::Config("table has no flag column".into()));
        }
        let columns = header[..header.len() - 1].to_vec();
        let mut rows = Vec::new();
        let mut flags = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io)?;
            let mut row = Vec::with_capacity(columns.len());
            for field in rec.iter().take(columns.len()) {
                row.push(field.parse::<f64>().map_err(|e| CliError::Config(format!("bad number {field:?}: {e}")))?);
            }
            flags.push(rec.get(columns.len()).unwrap_or("").to_string());
            rows.push(row);
        }
        Ok(Self { columns, rows, flags, metadata })
    }
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}
