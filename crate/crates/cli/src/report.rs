use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Tabular result of one subcommand plus scalar summary fields.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(
        command: &'static str,
        config: Map<String, Value>,
        columns: &[&'static str],
    ) -> Self {
        Self {
            command,
            config,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .map(|c| c.to_string())
                            .zip(r.iter().cloned())
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "config": self.config,
                    "columns": self.columns,
                    "rows": rows,
                    "summary": self.summary,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# schema {SCHEMA} {}\n", self.command);
                for (k, v) in &self.summary {
                    s.push_str(&format!("# {k} = {}\n", cell(v)));
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(cell).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Writes the whole document at once; files go through a sibling temp file and a rename.
pub fn emit(out: Option<&Path>, body: &str) -> io::Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(format!(".tmp-{}", std::process::id()));
            fs::write(&tmp, body)?;
            fs::rename(&tmp, path).inspect_err(|_| {
                let _ = fs::remove_file(&tmp);
            })
        }
    }
}

/// Writes one JSON document per line to `path`, also via temp file and rename.
pub fn emit_lines(path: &Path, lines: impl IntoIterator<Item = Value>) -> io::Result<()> {
    let mut body = String::new();
    for l in lines {
        body.push_str(&l.to_string());
        body.push('\n');
    }
    emit(Some(path), &body)
}
